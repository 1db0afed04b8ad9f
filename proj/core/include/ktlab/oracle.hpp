#pragma once

/**
 * @file oracle.hpp
 * @brief Independent floating-point cross-checks of the exact machinery.
 *
 * Everything in this header recomputes claims of the exact modules by a
 * different route and in different arithmetic:
 *
 *  - torsion_bruteforce re-derives the torsion vector with explicit minor
 *    expansions instead of the form-calculus pipeline;
 *  - fd_* probes compare ladder/Laplacian predictions against central
 *    finite differences of the evaluated basis functions;
 *  - galerkin_kernel_count discretizes the harmonic-form operator pair
 *    (dbar, dbar*) on a truncated orthonormal basis, assembled from
 *    double-precision data (numeric frame inversion, numeric Gram and
 *    torsion), and counts near-zero singular values;
 *  - the quadrature witnesses integrate products of basis functions over
 *    the fundamental domain on a product grid, checking block-diagonality
 *    across sectors and the integration-by-parts sign convention.
 *
 * None of these routes share the ring arithmetic, the dual-coframe based
 * form calculus (beyond the definition of the coframe itself), or the exact
 * sector solvers, so agreement is evidence rather than tautology.
 */

#include <complex>
#include <vector>

#include "ktlab/acs.hpp"
#include "ktlab/basis.hpp"
#include "ktlab/metric.hpp"
#include "ktlab/scalar.hpp"

namespace ktlab {

// ============================================================================
// Torsion by explicit wedge algebra
// ============================================================================

/**
 * @brief Recompute the torsion vector by brute-force wedge expansion.
 *
 * Expands the canonical (n+1,0) monomial over the real coframe through
 * explicit (n+1) x (n+1) minors, differentiates monomial-by-monomial with
 * the structure equation, and converts each resulting real monomial to the
 * complex coframe alphabet through minors of the inverse basis-change
 * matrix.  Shares only the dual-coframe definition with torsion_vector;
 * the expansion, differentiation, and extraction engines are disjoint.
 *
 * Must agree exactly with torsion_vector; a mismatch indicates a defect in
 * one of the two form-calculus routes.
 */
[[nodiscard]] TorsionVector torsion_bruteforce(const AlmostComplexStructure& acs);

// ============================================================================
// Finite-difference probes
// ============================================================================

/// Which left-invariant frame operator to probe.
struct OperatorProbe {
    int leg{0};             ///< 0-based; leg < n is a ladder leg, leg == n the diagonal leg
    bool conjugated{false};
    bool zero{false};       ///< probe the zero operator instead (trivial sanity)
};

/**
 * @brief Relative error between the central finite difference of U_leg
 *        applied to g_{J,h} and the ladder prediction, at one point.
 *
 * The frame field is differentiated along its flow curves (the y-legs carry
 * the x-dependent vertical drift).  Requires step in [1e-7, 1e-3].
 * The error is |fd - predicted| / max(|fd|, |predicted|), and exactly 0
 * when both vanish (e.g. the zero probe, or lowering at h = 0).
 */
[[nodiscard]] double fd_operator_check(const OperatorProbe& probe, const HeisenbergIndex& J,
                                       const HermiteIndex& h, const MetricParams& g,
                                       const Point& pt, double step, int xi_cutoff = 8);

/// Same check for the twisted 4-dimensional family exp(-i x / delta) g_{J,h}
/// against twisted_ladder_apply (n == 1).
[[nodiscard]] double fd_twisted_operator_check(const OperatorProbe& probe,
                                               const HeisenbergIndex& J, long h,
                                               const ExactScalar& beta, const ExactScalar& delta,
                                               const Point& pt, double step, int xi_cutoff = 8);

/**
 * @brief Relative error between the second-difference discretization of the
 *        metric Laplacian and eigenvalue * f at one point.
 *
 * The Laplacian is the sum of squared frame fields; each square is realized
 * as a second central difference along the field's flow curve.
 */
[[nodiscard]] double fd_laplace_check(const TorusIndex& I, const MetricParams& g, const Point& pt,
                                      double step);
[[nodiscard]] double fd_laplace_check(const HeisenbergIndex& J, const HermiteIndex& h,
                                      const MetricParams& g, const Point& pt, double step,
                                      int xi_cutoff = 8);

// ============================================================================
// Galerkin near-kernel counting
// ============================================================================

/// Cutoffs and thresholds of the truncated discretization.
struct GalerkinConfig {
    long torus_radius{3};     ///< |I|_inf cutoff on torus sectors
    long m_cutoff{2};         ///< |m| <= this, m != 0
    long l_cutoff{2};         ///< |l| <= this on theta sectors
    long hermite_degree{6};   ///< |h|_inf <= this on theta sectors
    int quadrature_points{17};  ///< grid size per coordinate (prime; see notes)
    int xi_cutoff{8};         ///< theta-sum truncation for evaluations
    double epsilon{1e-6};     ///< singular values below this count as kernel
};

/// Near-kernel count plus the diagnostic head of the singular spectrum.
struct GalerkinResult {
    int kernel_count{0};
    /// Set when the spectrum has no clean gap at the threshold: the distance
    /// between the largest accepted and smallest rejected singular value is
    /// below 10 * epsilon.
    bool inconclusive{false};
    std::vector<double> spectrum_head;  ///< smallest singular values, ascending
};

/**
 * @brief Count near-kernel directions of the discretized harmonic-form
 *        operator pair on (0,1)-forms.
 *
 * Assembles, sector by sector (the operator is block-diagonal across
 * sectors), the matrix of (dbar, dbar-adjoint) over an orthonormalized
 * truncated basis and counts singular values below cfg.epsilon.  Rows are
 * kept for every target reachable from the window, so a kernel vector of
 * the assembled matrix is annihilated by both operators as maps into the
 * untruncated space — boundary artifacts of the cutoff are penalized, not
 * counted.
 *
 * All matrix data is double precision and numerically derived (numeric
 * coframe inversion, numeric Gram/torsion, normalized ladder amplitudes).
 * For the 4-dimensional preset family the theta blocks use the twisted
 * basis adapted to its harmonic system, which contains the resonant
 * solutions at finite order.
 */
[[nodiscard]] GalerkinResult galerkin_kernel_count(const AlmostComplexStructure& acs,
                                                   const MetricParams& g,
                                                   const GalerkinConfig& cfg);

/// Near-kernel count of the function (0-form) Laplacian over the same
/// truncated basis — the basis diagonalizes it, so this thresholds the
/// eigenvalues.  Always >= 1: the constants (all-zero torus index) are flat.
[[nodiscard]] int zero_form_kernel_count(const MetricParams& g, int n, const GalerkinConfig& cfg);

/// Singular values (ascending) of the single assembled torus-sector block;
/// the near-zero count is that sector's contribution to the kernel count.
[[nodiscard]] std::vector<double> galerkin_torus_singulars(const AlmostComplexStructure& acs,
                                                           const MetricParams& g,
                                                           const TorusIndex& I);

/// Singular values (ascending) of one assembled theta-sector block at the
/// given Hermite window (the 4-dimensional preset family switches to its
/// twisted basis automatically, as in the full sweep).
[[nodiscard]] std::vector<double> galerkin_theta_singulars(const AlmostComplexStructure& acs,
                                                           const MetricParams& g,
                                                           const HeisenbergIndex& J, long degree);

// ============================================================================
// Quadrature witnesses
// ============================================================================

/// One concrete basis function of either sector kind.
struct BasisFunction {
    bool torus{true};
    TorusIndex I;       ///< used when torus
    HeisenbergIndex J;  ///< used when !torus
    HermiteIndex h;     ///< used when !torus
};

/**
 * @brief Largest |<U a, b>| over frame legs and pairs a, b from different
 *        sectors, by product-grid quadrature over the fundamental domain.
 *
 * Functions are grid-normalized, so the result is a dimensionless coupling.
 * The grid has cfg.quadrature_points per coordinate; a prime count larger
 * than every frequency difference in play (including the theta-sum windings
 * up to |m| * xi_cutoff) makes the periodic-direction sums exact to
 * round-off, so genuine block-diagonality shows up at machine scale.
 */
[[nodiscard]] double max_cross_sector_entry(const std::vector<BasisFunction>& funcs, int n,
                                            const MetricParams& g, const GalerkinConfig& cfg);

/**
 * @brief Largest |<U f, g> + <f, conj(U) g>| over frame legs and same-sector
 *        pairs, by the same quadrature (grid-normalized inputs).
 *
 * The frame fields are divergence free, so integration by parts makes the
 * adjoint of U the negative of its conjugate; this witnesses the sign
 * convention carried by every adjoint row of the sector systems.
 */
[[nodiscard]] double adjoint_pairing_error(const std::vector<BasisFunction>& funcs, int n,
                                           const MetricParams& g, const GalerkinConfig& cfg);

}  // namespace ktlab
