#pragma once

/**
 * @file hermite.hpp
 * @brief Gaussian-weighted Hermite functions.
 *
 * F_h(s) = H_h(s) * exp(-s^2/2) where H_h is the degree-h physicists'
 * Hermite polynomial, generated by the recurrence
 *
 *     F_0(s) = exp(-s^2/2),
 *     F_1(s) = 2 s exp(-s^2/2),
 *     F_{h+1}(s) = 2 s F_h(s) - 2 h F_{h-1}(s).
 *
 * These satisfy F_h'(s) = 2 h F_{h-1}(s) - s F_h(s).
 */

namespace ktlab {

/// Evaluate F_h(s).  Requires h >= 0.
[[nodiscard]] double hermite_F(int h, double s);

/// Evaluate the derivative F_h'(s) via the closed-form identity.
[[nodiscard]] double hermite_F_derivative(int h, double s);

}  // namespace ktlab
