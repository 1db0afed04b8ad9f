#pragma once

/**
 * @file basis.hpp
 * @brief Joint eigenfunction basis of L^2(KT^{2n+2}) and its ladder structure.
 *
 * Smooth functions decompose into sectors indexed by the central weight m
 * (the dz frequency):
 *
 *  - m == 0 (torus sector): plain characters
 *        f_I(x,y,z,t) = exp(2*pi*i (p.x + q.y + l t)),  I = (p, q, l).
 *
 *  - m != 0 (theta sector): for residues q_j in [0,|m|) and Hermite orders
 *    h in N_0^n,
 *        g_{J,h} = exp(2*pi*i (q.y + m z + l t))
 *                  * prod_j sum_{xi in Z} F_{h_j}(kappa_j (x_j + q_j/m + xi))
 *                           * exp(2*pi*i m xi y_j),
 *    with kappa_j = sqrt(2*pi*|m| c_j / b_j) for the diagonal metric weights
 *    (b_j, c_j).  Numeric evaluation truncates the xi-sum at a configurable
 *    cutoff; the discarded tail is bounded by a Gaussian factor
 *    exp(-pi |m| (c_j/b_j) Xi^2 / 2) up to a modest constant.
 *
 * Both families diagonalise the metric Laplacian, and the complex frame
 * fields U_j = b_j d/dx_j + i c_j Y_j act on the theta sectors as ladder
 * operators in the Hermite orders with exact coefficients of the form
 * (ring scalar) * sqrt(2*pi*|m| b_j c_j).  The square root is carried
 * formally (radical_power in {0,1} against the known square rho_sq) and is
 * simplified into the ring whenever the square has an exact ring root.
 */

#include <complex>
#include <string>
#include <vector>

#include "ktlab/metric.hpp"
#include "ktlab/scalar.hpp"

namespace ktlab {

// ============================================================================
// Index types
// ============================================================================

/// Character index for the m == 0 sector: frequencies (p, q) in Z^n x Z^n and
/// the dt frequency l.
struct TorusIndex {
    std::vector<long> p;
    std::vector<long> q;
    long l{0};
};

/// Sector index for m != 0: central weight m, residues q_j in [0, |m|), and
/// the dt frequency l.  Each sector carries a Hermite family g_{J,h}.
struct HeisenbergIndex {
    long m{0};
    std::vector<long> q;
    long l{0};
};

/// Multi-order of the Hermite factor, one nonnegative entry per j <= n.
struct HermiteIndex {
    std::vector<long> h;
};

/// Evaluation point: coordinates (x_1..x_n, y_1..y_n, z, t).
struct Point {
    std::vector<double> x;
    std::vector<double> y;
    double z{0.0};
    double t{0.0};
};

/// Throw std::invalid_argument unless the index shapes match n (and, for the
/// theta sector, m != 0, 0 <= q_j < |m|, h_j >= 0).
void index_validate(const TorusIndex& I, int n);
void index_validate(const HeisenbergIndex& J, const HermiteIndex& h, int n);

// ============================================================================
// Evaluation
// ============================================================================

/// Evaluate the torus character f_I at a point.
[[nodiscard]] std::complex<double> eval_basis(const TorusIndex& I, const Point& pt);

/**
 * @brief Evaluate g_{J,h} at a point, truncating each xi-sum at |xi| <= xi_cutoff.
 *
 * Requires xi_cutoff >= 1; the default 8 keeps the truncation error far below
 * double round-off for all unit-scale metrics.
 */
[[nodiscard]] std::complex<double> eval_basis(const HeisenbergIndex& J, const HermiteIndex& h,
                                              const MetricParams& g, const Point& pt,
                                              int xi_cutoff = 8);

/// Evaluate the twisted family exp(-i x / delta) * g_{J,h} used by the
/// 4-dimensional model (n == 1).
[[nodiscard]] std::complex<double> eval_twisted_basis(const HeisenbergIndex& J, long h,
                                                      const ExactScalar& beta,
                                                      const ExactScalar& delta, const Point& pt,
                                                      int xi_cutoff = 8);

// ============================================================================
// Laplace eigenvalues
// ============================================================================

/// Delta f_I = lambda f_I with
/// lambda = -4 pi^2 (a^2 l^2 + sum_j (b_j^2 p_j^2 + c_j^2 q_j^2)).
[[nodiscard]] ExactScalar laplace_eigenvalue(const TorusIndex& I, const MetricParams& g);

/// Delta g_{J,h} = lambda g_{J,h} with
/// lambda = -[ sum_j 2 pi |m| b_j c_j (2 h_j + 1) + 4 pi^2 (a^2 l^2 + d^2 m^2) ].
[[nodiscard]] ExactScalar laplace_eigenvalue(const HeisenbergIndex& J, const HermiteIndex& h,
                                             const MetricParams& g);

// ============================================================================
// Ladder action
// ============================================================================

/**
 * @brief One summand of a ladder image: coeff * sqrt(rho_sq)^radical_power * g_{J,h}.
 *
 * radical_power is 0 or 1; when the radical simplifies exactly into the ring
 * it is folded into coeff and radical_power is 0 (rho_sq then 1).
 */
struct LadderTerm {
    HermiteIndex h;
    ExactScalar coeff;
    int radical_power{0};
    ExactScalar rho_sq;

    /// Float value of coeff * sqrt(rho_sq)^radical_power.
    [[nodiscard]] std::complex<double> amplitude() const;
    /// Human-readable rendering against a base label, e.g. "g".
    [[nodiscard]] std::string to_string(const std::string& base_label) const;
};

/**
 * @brief Apply U_{j+1} (conjugated == false) or its conjugate (true) to g_{J,h}.
 *
 * j is 0-based: j < n selects the ladder leg U_{j+1} = b_j d/dx_j + i c_j Y_j,
 * j == n selects the diagonal leg U_{n+1} = a d/dt + i d d/dz, which acts as
 * multiplication by 2 pi i (a l + i d m) (conjugate: 2 pi i (a l - i d m)).
 *
 * For m > 0, U_{j+1} raises h_j with coefficient -sqrt(2 pi m b_j c_j) and its
 * conjugate lowers with 2 h_j sqrt(2 pi m b_j c_j); for m < 0 the roles swap.
 * Lowering at h_j == 0 yields the empty combination.
 */
[[nodiscard]] std::vector<LadderTerm> ladder_apply(int j, bool conjugated,
                                                   const HeisenbergIndex& J,
                                                   const HermiteIndex& h, const MetricParams& g);

/**
 * @brief Ladder action on the twisted family exp(-i x / delta) * g_{J,h}
 *        (4-dimensional model, n == 1, metric weights (1, beta, 1, delta)).
 *
 * The x-dependent twist adds the diagonal term -i (beta/delta) * (same h) to
 * both U_1 and its conjugate; the diagonal leg U_2 is unchanged.
 */
[[nodiscard]] std::vector<LadderTerm> twisted_ladder_apply(int j, bool conjugated,
                                                           const HeisenbergIndex& J, long h,
                                                           const ExactScalar& beta,
                                                           const ExactScalar& delta);

}  // namespace ktlab
