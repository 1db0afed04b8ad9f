#pragma once

/**
 * @file kodaira.hpp
 * @brief Kodaira dimension of a left-invariant almost complex structure.
 *
 * A pluricanonical section of the N-th canonical power is sought of the form
 * f * (phi^{1..n+1})^{tensor N} with f = e^{2 pi i (p.x + q.y + l.t)}; it is
 * dbar-closed exactly when
 *
 *     conj(V_j) f + N C_j f = 0   for j = 1..n+1,
 *
 * with C the torsion vector.  On such monomials conj(V_j) acts by the scalar
 * sum_i conj(A_ij) * 2 pi i * w_i with frame weight vector
 * w = (p_1..p_n, q_1..q_n, 0, l); splitting into real and imaginary parts
 * gives a real linear system in (p,q,l) whose solution scales linearly in N.
 * Outcomes:
 *
 *   - no solution (even over the fraction field)  -> kappa = -infinity;
 *   - a solution with some coordinate irrational  -> kappa = -infinity
 *     (no admissible N makes the weights integral);
 *   - a rational solution                         -> kappa = 0, with
 *     minimal_N the least N making N*(p,q,l) integral.
 *
 * Sections supported on the m != 0 (theta-like) part of the function space
 * never contribute: the z-direction weight of an invariant monomial section
 * is forced to zero by the structure equations, so only the w above needs to
 * be searched.  The verdict dichotomy {0, -infinity} is therefore decided by
 * this single exact system.
 */

#include <optional>
#include <string>
#include <vector>

#include "ktlab/acs.hpp"
#include "ktlab/linalg.hpp"
#include "ktlab/scalar.hpp"

namespace ktlab {

/// The real linear system M * (p,q,l) = rhs at N = 1.
struct KodairaSystem {
    Matrix M;  ///< (2n+2) x (2n+1); rows: n+1 real parts then n+1 imaginary parts
    Vec rhs;   ///< -Re C_j then -Im C_j
};

/// Build the exact linear system from the structure's torsion vector.
[[nodiscard]] KodairaSystem kodaira_system(const AlmostComplexStructure& acs);

enum class KodairaVerdict { Zero, MinusInfinity };
enum class KodairaObstruction { None, NoSolution, IrrationalSolution };

struct KodairaReport {
    KodairaVerdict verdict{KodairaVerdict::MinusInfinity};
    KodairaObstruction obstruction{KodairaObstruction::None};
    /// Rational (p,q,l) at N=1 when the verdict is Zero.
    std::optional<std::vector<Rational>> solution;
    /// Least N >= 1 with N * solution integral.
    std::optional<long> minimal_N;
    /// Witness description at minimal_N.
    std::optional<std::string> witness_section;
    /// Human-readable justification notes.
    std::string notes;
};

/// Decide kappa in {0, -infinity} with exact witnesses.
[[nodiscard]] KodairaReport kodaira_dimension(const AlmostComplexStructure& acs);

}  // namespace ktlab
