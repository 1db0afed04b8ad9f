#pragma once

/**
 * @file metric.hpp
 * @brief Diagonal left-invariant metrics on KT^{2n+2}.
 *
 * The supported metric family declares the rescaled coframe
 *
 *     e^j/b_j,  f^j/c_j  (j <= n),  e^{n+1}/d,  f^{n+1}/a
 *
 * orthonormal, i.e. the frame vectors b_j d/dx_j, c_j Y_j, d d/dz, a d/dt
 * have unit length.  The associated Laplacian on functions is
 *
 *     Delta = sum_j (b_j^2 d^2/dx_j^2 + c_j^2 Y_j^2) + d^2 d^2/dz^2 + a^2 d^2/dt^2.
 *
 * All weights are strictly positive exact scalars; positivity is decided
 * exactly for Pi-free values and by the documented float projection
 * otherwise.
 */

#include <vector>

#include "ktlab/manifold.hpp"
#include "ktlab/scalar.hpp"

namespace ktlab {

/// Positive diagonal metric weights (frame scaling factors).
struct MetricParams {
    ExactScalar a;               ///< weight of d/dt
    std::vector<ExactScalar> b;  ///< weights of d/dx_j, length n
    std::vector<ExactScalar> c;  ///< weights of Y_j, length n
    ExactScalar d;               ///< weight of d/dz
};

/// All weights 1.
[[nodiscard]] MetricParams metric_identity(int n);

/// Throws std::invalid_argument unless shapes match n and all weights are
/// strictly positive reals.
void metric_validate(const MetricParams& g, int n);

/// Weight of each coframe slot (theta^c = weight * unit covector), in the
/// slot order of ManifoldModel.
[[nodiscard]] std::vector<ExactScalar> metric_coframe_weights(const MetricParams& g,
                                                              const ManifoldModel& model);

/**
 * @brief Metric for the kt4 family: phi^1, phi^2 orthonormal.
 *
 * Weights (a,b,c,d) = (1, |beta|, 1, |delta|).
 */
[[nodiscard]] MetricParams metric_kt4(const ExactScalar& beta, const ExactScalar& delta);

/**
 * @brief Metric for the kt6 family: rho*phi^1, sigma*phi^2, tau*phi^3
 *        orthonormal.
 *
 * Weights: a = 1/tau, b = (1/rho, |a_param|/rho), c = (1/sigma,
 * |b_param|/sigma), d = |c_param|/tau.
 */
[[nodiscard]] MetricParams metric_kt6(const ExactScalar& a_param, const ExactScalar& b_param,
                                      const ExactScalar& c_param, const ExactScalar& rho,
                                      const ExactScalar& sigma, const ExactScalar& tau);

}  // namespace ktlab
