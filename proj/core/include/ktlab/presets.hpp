#pragma once

/**
 * @file presets.hpp
 * @brief Named almost complex structures on KT^4 and KT^6.
 *
 * kt4(beta, delta), both parameters nonzero:
 *     V_1 = (1/2)(d/dt - i*beta d/dx),   V_2 = (1/2)(Y - i*delta d/dz)
 * with dual (1,0)-coframe
 *     phi^1 = dt + (i/beta) dx,          phi^2 = dy + (i/delta)(dz - x dy).
 *
 * kt6(a, b, c), all parameters nonzero:
 *     V_1 = (1/2)(d/dx_1 - i*a d/dx_2),
 *     V_2 = (1/2)(Y_1    - i*b Y_2),
 *     V_3 = (1/2)(d/dt   - i*c d/dz)
 * with dual coframe
 *     phi^1 = dx_1 + (i/a) dx_2,
 *     phi^2 = dy_1 + (i/b) dy_2,
 *     phi^3 = dt   + (i/c)(dz - x_1 dy_1 - x_2 dy_2).
 */

#include "ktlab/acs.hpp"
#include "ktlab/scalar.hpp"

namespace ktlab {

/// KT^4 family; throws std::invalid_argument when a parameter is zero.
[[nodiscard]] AlmostComplexStructure preset_kt4(const ExactScalar& beta, const ExactScalar& delta);

/// KT^6 family; throws std::invalid_argument when a parameter is zero.
[[nodiscard]] AlmostComplexStructure preset_kt6(const ExactScalar& a, const ExactScalar& b,
                                                const ExactScalar& c);

}  // namespace ktlab
