/**
 * @file oracle.cpp
 * @brief Floating-point cross-checks: brute-force torsion, finite-difference
 *        probes, Galerkin near-kernel counting, and quadrature witnesses.
 *
 * The exact modules and this file deliberately share as little as possible:
 * torsion_bruteforce uses explicit minor expansions instead of the form
 * calculus; the Galerkin assembly inverts the coframe, forms the Gram and
 * torsion data, and orthonormalizes entirely in double precision; the
 * quadrature witnesses integrate concrete function values on a grid.
 */

#include "ktlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>

#include "ktlab/harmonic.hpp"
#include "ktlab/linalg.hpp"
#include "ktlab/manifold.hpp"

namespace ktlab {

namespace {

using Cd = std::complex<double>;
using CVecD = std::vector<Cd>;
using CMatD = std::vector<CVecD>;  // row major

constexpr double k_two_pi = 6.283185307179586476925286766559;

// ============================================================================
// Wedge-key combinatorics
// ============================================================================

/// Sort a multi-index in place; return the permutation sign, or 0 on repeats.
int sort_with_parity(std::vector<int>& key) {
    int sign = 1;
    for (std::size_t i = 1; i < key.size(); ++i) {
        int v = key[i];
        std::size_t j = i;
        while (j > 0 && key[j - 1] > v) {
            key[j] = key[j - 1];
            --j;
            sign = -sign;
        }
        key[j] = v;
    }
    for (std::size_t i = 1; i < key.size(); ++i)
        if (key[i] == key[i - 1]) return 0;
    return sign;
}

/// Enumerate increasing k-subsets of {0..limit-1}.
std::vector<std::vector<int>> increasing_subsets(int limit, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) cur[static_cast<std::size_t>(i)] = i;
    if (k > limit) return out;
    while (true) {
        out.push_back(cur);
        int i = k - 1;
        while (i >= 0 && cur[static_cast<std::size_t>(i)] == limit - k + i) --i;
        if (i < 0) break;
        ++cur[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

}  // namespace

// ============================================================================
// Torsion by explicit wedge algebra
// ============================================================================

TorsionVector torsion_bruteforce(const AlmostComplexStructure& acs) {
    const int n = acs.n;
    const int dim = 2 * n + 2;
    const int m = n + 1;
    const DualCoframe dc = dual_coframe(acs);

    // omega = phi^1 ^ ... ^ phi^{n+1}: the theta^S coefficient is the minor
    // det P[0..n, S] of the coframe matrix.
    std::map<std::vector<int>, ExactScalar> omega;
    for (const auto& S : increasing_subsets(dim, m)) {
        Matrix sub(m, m);
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c)
                sub(r, c) = dc.complex_from_real(r, S[static_cast<std::size_t>(c)]);
        ExactScalar d = det(sub);
        if (!d.is_zero()) omega.emplace(S, std::move(d));
    }

    // d omega, monomial by monomial.  The only non-closed real generator is
    // slot n: d theta^n = -sum_j theta^j ^ theta^{n+1+j}.
    std::map<std::vector<int>, ExactScalar> domega;
    for (const auto& [S, coeff] : omega) {
        for (std::size_t pos = 0; pos < S.size(); ++pos) {
            if (S[pos] != n) continue;
            // Leibniz sign from moving d past the first `pos` factors, and
            // the structure-equation minus sign.
            const ExactScalar base =
                (pos % 2 == 0) ? ExactScalar{} - coeff : coeff;
            for (int j = 0; j < n; ++j) {
                std::vector<int> key;
                key.reserve(S.size() + 1);
                for (std::size_t r = 0; r < S.size(); ++r)
                    if (r != pos) key.push_back(S[r]);
                key.push_back(j);
                key.push_back(n + 1 + j);
                const int parity = sort_with_parity(key);
                if (parity == 0) continue;
                ExactScalar add = parity > 0 ? base : ExactScalar{} - base;
                auto it = domega.find(key);
                if (it == domega.end())
                    domega.emplace(std::move(key), std::move(add));
                else
                    it->second = it->second + add;
            }
        }
    }

    // Convert each real monomial to the complex alphabet through minors of
    // Wp (theta^c = sum_K Wp(c, K) Phi^K) and read off the coefficients at
    // the keys {0..n, m+j}.
    const Matrix& Wp = dc.real_from_complex;
    std::vector<ExactScalar> acc(static_cast<std::size_t>(m), ExactScalar{});
    for (const auto& [R, coeff] : domega) {
        if (coeff.is_zero()) continue;
        for (int j = 0; j < m; ++j) {
            Matrix sub(m + 1, m + 1);
            for (int r = 0; r <= m; ++r) {
                for (int c = 0; c < m; ++c)
                    sub(r, c) = Wp(R[static_cast<std::size_t>(r)], c);
                sub(r, m) = Wp(R[static_cast<std::size_t>(r)], m + j);
            }
            const ExactScalar d = det(sub);
            if (!d.is_zero())
                acc[static_cast<std::size_t>(j)] = acc[static_cast<std::size_t>(j)] + coeff * d;
        }
    }

    // The target component is conj(phi^{j+1}) ^ omega; moving the conjugate
    // factor to the back of the sorted key costs (-1)^{n+1}.
    TorsionVector tv;
    tv.C.reserve(static_cast<std::size_t>(m));
    const bool flip = (m % 2 == 1);
    for (int j = 0; j < m; ++j)
        tv.C.push_back(flip ? ExactScalar{} - acc[static_cast<std::size_t>(j)]
                            : acc[static_cast<std::size_t>(j)]);
    return tv;
}

// ============================================================================
// Finite-difference probes
// ============================================================================

namespace {

enum class FlowKind { X, Y, Z, T };

/// Point reached after flowing for time s along one frame field.  The Y-legs
/// carry the x-dependent vertical drift of the group flow, which makes the
/// curve an exact one-parameter subgroup orbit.
Point flow_point(const Point& base, FlowKind kind, int j, double s) {
    Point p = base;
    switch (kind) {
        case FlowKind::X:
            p.x[static_cast<std::size_t>(j)] += s;
            break;
        case FlowKind::Y:
            p.y[static_cast<std::size_t>(j)] += s;
            p.z += base.x[static_cast<std::size_t>(j)] * s;
            break;
        case FlowKind::Z:
            p.z += s;
            break;
        case FlowKind::T:
            p.t += s;
            break;
    }
    return p;
}

template <class F>
Cd central_diff(const F& f, const Point& base, FlowKind kind, int j, double step) {
    return (f(flow_point(base, kind, j, step)) - f(flow_point(base, kind, j, -step))) /
           (2.0 * step);
}

template <class F>
Cd second_diff(const F& f, const Cd& f_base, const Point& base, FlowKind kind, int j,
               double step) {
    return (f(flow_point(base, kind, j, step)) - 2.0 * f_base +
            f(flow_point(base, kind, j, -step))) /
           (step * step);
}

/// |fd - predicted| over the larger of the two magnitudes and a scale floor;
/// exactly 0 when everything vanishes.
double relative_error(const Cd& fd, const Cd& predicted, double scale_floor) {
    const double den = std::max({std::abs(fd), std::abs(predicted), scale_floor});
    if (den == 0.0) return 0.0;
    return std::abs(fd - predicted) / den;
}

void check_step(double step, const char* who) {
    if (!(step >= 1e-7 && step <= 1e-3))
        throw std::invalid_argument(std::string(who) + ": step must lie in [1e-7, 1e-3]");
}

double weight_value(const ExactScalar& s) { return s.to_complex().real(); }

}  // namespace

double fd_operator_check(const OperatorProbe& probe, const HeisenbergIndex& J,
                         const HermiteIndex& h, const MetricParams& g, const Point& pt,
                         double step, int xi_cutoff) {
    check_step(step, "fd_operator_check");
    const int n = static_cast<int>(J.q.size());
    index_validate(J, h, n);
    metric_validate(g, n);
    if (probe.zero) return 0.0;
    if (probe.leg < 0 || probe.leg > n)
        throw std::invalid_argument("fd_operator_check: leg out of range");

    const auto f = [&](const Point& p) { return eval_basis(J, h, g, p, xi_cutoff); };
    const Cd f_base = f(pt);

    const Cd i1{0.0, 1.0};
    Cd fd;
    double op_scale = 0.0;
    if (probe.leg < n) {
        const double b = weight_value(g.b[static_cast<std::size_t>(probe.leg)]);
        const double c = weight_value(g.c[static_cast<std::size_t>(probe.leg)]);
        const Cd dx = central_diff(f, pt, FlowKind::X, probe.leg, step);
        const Cd dy = central_diff(f, pt, FlowKind::Y, probe.leg, step);
        fd = probe.conjugated ? b * dx - i1 * c * dy : b * dx + i1 * c * dy;
        op_scale = std::sqrt(k_two_pi * static_cast<double>(std::labs(J.m)) * b * c);
    } else {
        const double a = weight_value(g.a);
        const double d = weight_value(g.d);
        const Cd dt = central_diff(f, pt, FlowKind::T, 0, step);
        const Cd dz = central_diff(f, pt, FlowKind::Z, 0, step);
        fd = probe.conjugated ? a * dt - i1 * d * dz : a * dt + i1 * d * dz;
        op_scale = std::abs(Cd{-d * static_cast<double>(J.m) * k_two_pi,
                               a * static_cast<double>(J.l) * k_two_pi});
    }

    Cd predicted{0.0, 0.0};
    for (const LadderTerm& term : ladder_apply(probe.leg, probe.conjugated, J, h, g))
        predicted += term.amplitude() * eval_basis(J, term.h, g, pt, xi_cutoff);

    return relative_error(fd, predicted, op_scale * std::abs(f_base));
}

double fd_twisted_operator_check(const OperatorProbe& probe, const HeisenbergIndex& J, long h,
                                 const ExactScalar& beta, const ExactScalar& delta,
                                 const Point& pt, double step, int xi_cutoff) {
    check_step(step, "fd_twisted_operator_check");
    if (J.q.size() != 1)
        throw std::invalid_argument("fd_twisted_operator_check: the twisted family has n == 1");
    index_validate(J, HermiteIndex{{h}}, 1);
    if (probe.zero) return 0.0;
    if (probe.leg < 0 || probe.leg > 1)
        throw std::invalid_argument("fd_twisted_operator_check: leg out of range");

    const double bf = weight_value(beta);
    const double df = weight_value(delta);
    const auto f = [&](const Point& p) {
        return eval_twisted_basis(J, h, beta, delta, p, xi_cutoff);
    };
    const Cd f_base = f(pt);

    // Family metric weights: (a, b, c, d) = (1, beta, 1, delta).
    const Cd i1{0.0, 1.0};
    Cd fd;
    double op_scale = 0.0;
    if (probe.leg == 0) {
        const Cd dx = central_diff(f, pt, FlowKind::X, 0, step);
        const Cd dy = central_diff(f, pt, FlowKind::Y, 0, step);
        fd = probe.conjugated ? bf * dx - i1 * dy : bf * dx + i1 * dy;
        op_scale = std::sqrt(k_two_pi * static_cast<double>(std::labs(J.m)) * bf) + bf / df;
    } else {
        const Cd dt = central_diff(f, pt, FlowKind::T, 0, step);
        const Cd dz = central_diff(f, pt, FlowKind::Z, 0, step);
        fd = probe.conjugated ? dt - i1 * df * dz : dt + i1 * df * dz;
        op_scale = std::abs(Cd{-df * static_cast<double>(J.m) * k_two_pi,
                               static_cast<double>(J.l) * k_two_pi});
    }

    Cd predicted{0.0, 0.0};
    for (const LadderTerm& term : twisted_ladder_apply(probe.leg, probe.conjugated, J, h, beta, delta))
        predicted +=
            term.amplitude() * eval_twisted_basis(J, term.h.h[0], beta, delta, pt, xi_cutoff);

    return relative_error(fd, predicted, op_scale * std::abs(f_base));
}

namespace {

/// Shared second-difference Laplacian against an eigenvalue prediction.
template <class F>
double laplace_check_impl(const F& f, const MetricParams& g, int n, const Point& pt, double step,
                          double lambda) {
    const Cd f_base = f(pt);
    Cd lap{0.0, 0.0};
    for (int j = 0; j < n; ++j) {
        const double b = weight_value(g.b[static_cast<std::size_t>(j)]);
        const double c = weight_value(g.c[static_cast<std::size_t>(j)]);
        lap += b * b * second_diff(f, f_base, pt, FlowKind::X, j, step);
        lap += c * c * second_diff(f, f_base, pt, FlowKind::Y, j, step);
    }
    const double a = weight_value(g.a);
    const double d = weight_value(g.d);
    lap += d * d * second_diff(f, f_base, pt, FlowKind::Z, 0, step);
    lap += a * a * second_diff(f, f_base, pt, FlowKind::T, 0, step);

    const Cd predicted = lambda * f_base;
    return relative_error(lap, predicted, std::abs(lambda) * std::abs(f_base));
}

}  // namespace

double fd_laplace_check(const TorusIndex& I, const MetricParams& g, const Point& pt,
                        double step) {
    check_step(step, "fd_laplace_check");
    const int n = static_cast<int>(I.p.size());
    index_validate(I, n);
    metric_validate(g, n);
    const double lambda = laplace_eigenvalue(I, g).to_complex().real();
    const auto f = [&](const Point& p) { return eval_basis(I, p); };
    return laplace_check_impl(f, g, n, pt, step, lambda);
}

double fd_laplace_check(const HeisenbergIndex& J, const HermiteIndex& h, const MetricParams& g,
                        const Point& pt, double step, int xi_cutoff) {
    check_step(step, "fd_laplace_check");
    const int n = static_cast<int>(J.q.size());
    index_validate(J, h, n);
    metric_validate(g, n);
    const double lambda = laplace_eigenvalue(J, h, g).to_complex().real();
    const auto f = [&](const Point& p) { return eval_basis(J, h, g, p, xi_cutoff); };
    return laplace_check_impl(f, g, n, pt, step, lambda);
}

// ============================================================================
// Double-precision linear algebra
// ============================================================================

namespace {

CMatD cmat(int rows, int cols) { return CMatD(static_cast<std::size_t>(rows), CVecD(static_cast<std::size_t>(cols), Cd{0.0, 0.0})); }

/// Gauss-Jordan inverse with partial pivoting.
CMatD cinverse(CMatD a) {
    const std::size_t nn = a.size();
    CMatD inv = cmat(static_cast<int>(nn), static_cast<int>(nn));
    for (std::size_t i = 0; i < nn; ++i) inv[i][i] = Cd{1.0, 0.0};
    for (std::size_t col = 0; col < nn; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < nn; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300)
            throw std::invalid_argument("oracle: numeric matrix inversion hit a singular pivot");
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        const Cd scale = Cd{1.0, 0.0} / a[col][col];
        for (std::size_t c = 0; c < nn; ++c) {
            a[col][c] *= scale;
            inv[col][c] *= scale;
        }
        for (std::size_t r = 0; r < nn; ++r) {
            if (r == col) continue;
            const Cd factor = a[r][col];
            if (factor == Cd{0.0, 0.0}) continue;
            for (std::size_t c = 0; c < nn; ++c) {
                a[r][c] -= factor * a[col][c];
                inv[r][c] -= factor * inv[col][c];
            }
        }
    }
    return inv;
}

/// Cholesky factor L (lower) of a Hermitian positive definite matrix.
CMatD cholesky_lower(const CMatD& q) {
    const std::size_t nn = q.size();
    CMatD l = cmat(static_cast<int>(nn), static_cast<int>(nn));
    for (std::size_t i = 0; i < nn; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            Cd s = q[i][j];
            for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * std::conj(l[j][k]);
            if (i == j) {
                const double d = s.real();
                if (!(d > 1e-300))
                    throw std::invalid_argument(
                        "oracle: Gram matrix is not numerically positive definite");
                l[i][j] = Cd{std::sqrt(d), 0.0};
            } else {
                l[i][j] = s / l[j][j].real();
            }
        }
    }
    return l;
}

/// Inverse of an upper-triangular matrix.
CMatD upper_inverse(const CMatD& u) {
    const std::size_t nn = u.size();
    CMatD inv = cmat(static_cast<int>(nn), static_cast<int>(nn));
    for (std::size_t j = nn; j-- > 0;) {
        inv[j][j] = Cd{1.0, 0.0} / u[j][j];
        for (std::size_t i = j; i-- > 0;) {
            Cd s{0.0, 0.0};
            for (std::size_t k = i + 1; k <= j; ++k) s += u[i][k] * inv[k][j];
            inv[i][j] = -s / u[i][i];
        }
    }
    return inv;
}

/// Conjugate transpose.
CMatD adjoint_mat(const CMatD& a) {
    const std::size_t r = a.size();
    const std::size_t c = r ? a[0].size() : 0;
    CMatD out = cmat(static_cast<int>(c), static_cast<int>(r));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) out[j][i] = std::conj(a[i][j]);
    return out;
}

/**
 * Singular values by one-sided Jacobi: rotate column pairs until mutually
 * orthogonal, then read the column norms.  Unlike forming T^dagger T, this
 * keeps full relative accuracy for singular values far below ||T||, which
 * the near-kernel threshold (1e-6 against norms of order 1) needs.
 */
std::vector<double> singular_values(const CMatD& a) {
    const std::size_t rows = a.size();
    const std::size_t cols = rows ? a[0].size() : 0;
    if (cols == 0) return {};
    // Column-major working copy.
    std::vector<CVecD> col(cols, CVecD(rows));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) col[c][r] = a[r][c];

    std::vector<double> norm2(cols, 0.0);
    for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t r = 0; r < rows; ++r) norm2[c] += std::norm(col[c][r]);

    const double tol = 1e-14;
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < cols; ++p) {
            for (std::size_t q = p + 1; q < cols; ++q) {
                Cd cpq{0.0, 0.0};
                for (std::size_t r = 0; r < rows; ++r) cpq += std::conj(col[p][r]) * col[q][r];
                const double off = std::abs(cpq);
                if (off < 1e-300 || off <= tol * std::sqrt(norm2[p] * norm2[q])) continue;
                rotated = true;
                // Absorb the phase into column q, then rotate in the real plane.
                const Cd phase = cpq / off;
                const double tau = (norm2[q] - norm2[p]) / (2.0 * off);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                double np = 0.0, nq = 0.0;
                for (std::size_t r = 0; r < rows; ++r) {
                    const Cd u = col[p][r];
                    const Cd v = col[q][r] * std::conj(phase);
                    col[p][r] = cs * u - sn * v;
                    col[q][r] = sn * u + cs * v;
                    np += std::norm(col[p][r]);
                    nq += std::norm(col[q][r]);
                }
                norm2[p] = np;
                norm2[q] = nq;
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sig(cols);
    for (std::size_t c = 0; c < cols; ++c) sig[c] = std::sqrt(norm2[c]);
    std::sort(sig.begin(), sig.end());
    return sig;
}

// ============================================================================
// Numeric operator data shared by the Galerkin blocks
// ============================================================================

struct FloatOperatorData {
    int n{1};
    CMatD Af;                   ///< structure matrix, (2n+2) x (n+1)
    CMatD P;                    ///< numeric dual coframe, (2n+2) x (2n+2)
    CMatD gram;                 ///< H(j,k) = sum_c P(j,c) conj(P(k,c)) w_c^2
    std::vector<CMatD> t02;     ///< t02[l](j,k): conj(phi^j)^conj(phi^k) in d conj(phi^l)
    CMatD u, ubar;              ///< V_k = sum_leg u(k,leg) U_leg + ubar(k,leg) conj(U_leg)
    std::vector<double> bw, cw; ///< ladder metric weights
    double aw{1.0}, dw{1.0};    ///< diagonal metric weights
};

FloatOperatorData float_operator_data(const AlmostComplexStructure& acs, const MetricParams& g) {
    const int n = acs.n;
    const int dim = 2 * n + 2;
    const int m = n + 1;
    metric_validate(g, n);
    const ManifoldModel model = acs.model();

    FloatOperatorData D;
    D.n = n;
    D.Af = cmat(dim, m);
    for (int i = 0; i < dim; ++i)
        for (int k = 0; k < m; ++k) D.Af[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = acs.A(i, k).to_complex();

    // Wp(c, K): theta^c over the complex alphabet; its inverse is the dual
    // coframe.  Inverted numerically — independent of the exact route.
    CMatD Wp = cmat(dim, dim);
    for (int c = 0; c < dim; ++c) {
        const int i = model.frame_of_coframe(c);
        for (int k = 0; k < m; ++k) {
            Wp[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)] = acs.A(i, k).to_complex();
            Wp[static_cast<std::size_t>(c)][static_cast<std::size_t>(m + k)] =
                std::conj(acs.A(i, k).to_complex());
        }
    }
    D.P = cinverse(Wp);

    const std::vector<ExactScalar> w = metric_coframe_weights(g, model);
    std::vector<double> w2(static_cast<std::size_t>(dim));
    for (int c = 0; c < dim; ++c) {
        const double wf = weight_value(w[static_cast<std::size_t>(c)]);
        w2[static_cast<std::size_t>(c)] = wf * wf;
    }

    D.gram = cmat(m, m);
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
            Cd s{0.0, 0.0};
            for (int c = 0; c < dim; ++c)
                s += D.P[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)] *
                     std::conj(D.P[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)]) *
                     w2[static_cast<std::size_t>(c)];
            D.gram[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = s;
        }

    // d conj(phi^l) = P(m+l, n) d theta^n; its (0,2) part in the conjugate
    // alphabet via the Wp columns m..2m-1.
    D.t02.assign(static_cast<std::size_t>(m), cmat(m, m));
    for (int l = 0; l < m; ++l) {
        const Cd pref = D.P[static_cast<std::size_t>(m + l)][static_cast<std::size_t>(n)];
        for (int j = 0; j < m; ++j)
            for (int k = j + 1; k < m; ++k) {
                Cd s{0.0, 0.0};
                for (int jj = 0; jj < n; ++jj) {
                    const std::size_t a = static_cast<std::size_t>(jj);
                    const std::size_t b = static_cast<std::size_t>(n + 1 + jj);
                    s -= Wp[a][static_cast<std::size_t>(m + j)] * Wp[b][static_cast<std::size_t>(m + k)] -
                         Wp[a][static_cast<std::size_t>(m + k)] * Wp[b][static_cast<std::size_t>(m + j)];
                }
                D.t02[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = pref * s;
                D.t02[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = -pref * s;
            }
    }

    // Frame expansion: solve B X = A with B = [U_0..U_n, conj(U_0)..conj(U_n)]
    // in frame coordinates.
    for (int j = 0; j < n; ++j) {
        D.bw.push_back(weight_value(g.b[static_cast<std::size_t>(j)]));
        D.cw.push_back(weight_value(g.c[static_cast<std::size_t>(j)]));
    }
    D.aw = weight_value(g.a);
    D.dw = weight_value(g.d);

    CMatD B = cmat(dim, dim);
    for (int leg = 0; leg < n; ++leg) {
        B[static_cast<std::size_t>(leg)][static_cast<std::size_t>(leg)] = Cd{D.bw[static_cast<std::size_t>(leg)], 0.0};
        B[static_cast<std::size_t>(n + leg)][static_cast<std::size_t>(leg)] = Cd{0.0, D.cw[static_cast<std::size_t>(leg)]};
        B[static_cast<std::size_t>(leg)][static_cast<std::size_t>(m + leg)] = Cd{D.bw[static_cast<std::size_t>(leg)], 0.0};
        B[static_cast<std::size_t>(n + leg)][static_cast<std::size_t>(m + leg)] = Cd{0.0, -D.cw[static_cast<std::size_t>(leg)]};
    }
    B[static_cast<std::size_t>(2 * n + 1)][static_cast<std::size_t>(n)] = Cd{D.aw, 0.0};
    B[static_cast<std::size_t>(2 * n)][static_cast<std::size_t>(n)] = Cd{0.0, D.dw};
    B[static_cast<std::size_t>(2 * n + 1)][static_cast<std::size_t>(m + n)] = Cd{D.aw, 0.0};
    B[static_cast<std::size_t>(2 * n)][static_cast<std::size_t>(m + n)] = Cd{0.0, -D.dw};

    const CMatD Binv = cinverse(B);
    D.u = cmat(m, m);
    D.ubar = cmat(m, m);
    for (int k = 0; k < m; ++k)
        for (int leg = 0; leg < m; ++leg) {
            Cd su{0.0, 0.0}, sub{0.0, 0.0};
            for (int i = 0; i < dim; ++i) {
                su += Binv[static_cast<std::size_t>(leg)][static_cast<std::size_t>(i)] *
                      D.Af[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
                sub += Binv[static_cast<std::size_t>(m + leg)][static_cast<std::size_t>(i)] *
                       D.Af[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            }
            D.u[static_cast<std::size_t>(k)][static_cast<std::size_t>(leg)] = su;
            D.ubar[static_cast<std::size_t>(k)][static_cast<std::size_t>(leg)] = sub;
        }
    return D;
}

/// Pair list (j < k) in assembly order, plus the induced (0,2) Gram in the
/// quadratic-form orientation matching the (0,1) Gram H.
std::vector<std::pair<int, int>> pair_list(int m) {
    std::vector<std::pair<int, int>> out;
    for (int j = 0; j < m; ++j)
        for (int k = j + 1; k < m; ++k) out.emplace_back(j, k);
    return out;
}

CMatD pair_gram(const CMatD& H, const std::vector<std::pair<int, int>>& pairs) {
    const std::size_t np = pairs.size();
    CMatD q2 = cmat(static_cast<int>(np), static_cast<int>(np));
    for (std::size_t a = 0; a < np; ++a)
        for (std::size_t b = 0; b < np; ++b) {
            const auto [j, k] = pairs[a];
            const auto [jp, kp] = pairs[b];
            q2[a][b] = H[static_cast<std::size_t>(j)][static_cast<std::size_t>(jp)] *
                           H[static_cast<std::size_t>(k)][static_cast<std::size_t>(kp)] -
                       H[static_cast<std::size_t>(j)][static_cast<std::size_t>(kp)] *
                           H[static_cast<std::size_t>(k)][static_cast<std::size_t>(jp)];
        }
    return q2;
}

/// Right-multiply, in place, the column block structure (owner x slot) by
/// K (owner mixing), preserving the slot index.
void mix_columns(CMatD& mat, const CMatD& K, std::size_t slots) {
    const std::size_t owners = K.size();
    for (auto& row : mat) {
        CVecD mixed(row.size(), Cd{0.0, 0.0});
        for (std::size_t jp = 0; jp < owners; ++jp)
            for (std::size_t j = 0; j < owners; ++j) {
                const Cd kv = K[jp][j];
                if (kv == Cd{0.0, 0.0}) continue;
                for (std::size_t s = 0; s < slots; ++s)
                    mixed[j * slots + s] += row[jp * slots + s] * kv;
            }
        row = std::move(mixed);
    }
}

/// Left-multiply the first `groups x slots` rows by M (group mixing).
void mix_rows(CMatD& mat, const CMatD& M, std::size_t slots) {
    const std::size_t groups = M.size();
    const std::size_t cols = mat.empty() ? 0 : mat[0].size();
    CMatD out(groups * slots, CVecD(cols, Cd{0.0, 0.0}));
    for (std::size_t a = 0; a < groups; ++a)
        for (std::size_t b = 0; b < groups; ++b) {
            const Cd mv = M[a][b];
            if (mv == Cd{0.0, 0.0}) continue;
            for (std::size_t s = 0; s < slots; ++s)
                for (std::size_t c = 0; c < cols; ++c)
                    out[a * slots + s][c] += mv * mat[b * slots + s][c];
        }
    for (std::size_t r = 0; r < groups * slots; ++r) mat[r] = std::move(out[r]);
}

// ============================================================================
// Sector blocks
// ============================================================================

std::vector<double> s_block_singulars(const FloatOperatorData& D, const TorusIndex& I) {
    const int n = D.n;
    const int m = n + 1;

    CVecD act(static_cast<std::size_t>(2 * n + 2), Cd{0.0, 0.0});
    for (int j = 0; j < n; ++j) {
        act[static_cast<std::size_t>(j)] = Cd{0.0, k_two_pi * static_cast<double>(I.p[static_cast<std::size_t>(j)])};
        act[static_cast<std::size_t>(n + j)] = Cd{0.0, k_two_pi * static_cast<double>(I.q[static_cast<std::size_t>(j)])};
    }
    act[static_cast<std::size_t>(2 * n + 1)] = Cd{0.0, k_two_pi * static_cast<double>(I.l)};

    CVecD vbar(static_cast<std::size_t>(m), Cd{0.0, 0.0});
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < 2 * n + 2; ++i)
            vbar[static_cast<std::size_t>(k)] +=
                std::conj(D.Af[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]) * act[static_cast<std::size_t>(i)];

    const auto pairs = pair_list(m);
    CMatD raw = cmat(static_cast<int>(pairs.size()) + 1, m);
    for (std::size_t r = 0; r < pairs.size(); ++r) {
        const auto [j, k] = pairs[r];
        raw[r][static_cast<std::size_t>(k)] += vbar[static_cast<std::size_t>(j)];
        raw[r][static_cast<std::size_t>(j)] -= vbar[static_cast<std::size_t>(k)];
        for (int l = 0; l < m; ++l)
            raw[r][static_cast<std::size_t>(l)] +=
                D.t02[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
    }
    // dbar* u = 0 is orthogonality to dbar f; pairing the j-th coefficient
    // against the k-th component of dbar f goes through conj(H(j,k)).
    for (int j = 0; j < m; ++j) {
        Cd s{0.0, 0.0};
        for (int k = 0; k < m; ++k)
            s += D.gram[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] * vbar[static_cast<std::size_t>(k)];
        raw[pairs.size()][static_cast<std::size_t>(j)] = std::conj(s);
    }

    // Orthonormalize: domain by the (0,1) Gram, the dbar rows by the induced
    // (0,2) Gram; the adjoint row's codomain (the sector function) is unit.
    const CMatD L = cholesky_lower(D.gram);
    const CMatD K = upper_inverse(adjoint_mat(L));
    if (!pairs.empty()) {
        const CMatD L2H = adjoint_mat(cholesky_lower(pair_gram(D.gram, pairs)));
        CMatD top(raw.begin(), raw.begin() + static_cast<long>(pairs.size()));
        mix_rows(top, L2H, 1);
        for (std::size_t r = 0; r < pairs.size(); ++r) raw[r] = std::move(top[r]);
    }
    mix_columns(raw, K, 1);
    return singular_values(raw);
}

/// Matrix-element terms of U_leg / conj(U_leg) on the orthonormal Hermite
/// slots of sector J; `twist` adds a diagonal constant to both leg-0 actions.
struct SlotTerm {
    std::vector<long> h;
    Cd amp;
};

void leg_terms(const FloatOperatorData& D, const HeisenbergIndex& J, int leg, bool conjugated,
               const std::vector<long>& h, const std::optional<Cd>& twist,
               std::vector<SlotTerm>& out) {
    const int n = D.n;
    if (leg == n) {
        const double al = D.aw * static_cast<double>(J.l) * k_two_pi;
        const double dm = D.dw * static_cast<double>(J.m) * k_two_pi;
        out.push_back({h, conjugated ? Cd{dm, al} : Cd{-dm, al}});
        return;
    }
    const double rho = std::sqrt(k_two_pi * static_cast<double>(std::labs(J.m)) *
                                 D.bw[static_cast<std::size_t>(leg)] * D.cw[static_cast<std::size_t>(leg)]);
    const bool raises = (J.m > 0) != conjugated;
    if (raises) {
        std::vector<long> up = h;
        ++up[static_cast<std::size_t>(leg)];
        out.push_back({std::move(up), Cd{-rho * std::sqrt(2.0 * static_cast<double>(h[static_cast<std::size_t>(leg)] + 1)), 0.0}});
    } else if (h[static_cast<std::size_t>(leg)] > 0) {
        std::vector<long> down = h;
        --down[static_cast<std::size_t>(leg)];
        out.push_back({std::move(down), Cd{rho * std::sqrt(2.0 * static_cast<double>(h[static_cast<std::size_t>(leg)])), 0.0}});
    }
    if (leg == 0 && twist) out.push_back({h, *twist});
}

/// Matrix-element terms of V_k or conj(V_k) through the frame expansion.
void field_terms(const FloatOperatorData& D, const HeisenbergIndex& J, int k, bool conjugated,
                 const std::vector<long>& h, const std::optional<Cd>& twist,
                 std::vector<SlotTerm>& out) {
    const int m = D.n + 1;
    for (int leg = 0; leg < m; ++leg) {
        const Cd cu = conjugated ? std::conj(D.ubar[static_cast<std::size_t>(k)][static_cast<std::size_t>(leg)])
                                 : D.u[static_cast<std::size_t>(k)][static_cast<std::size_t>(leg)];
        const Cd cubar = conjugated ? std::conj(D.u[static_cast<std::size_t>(k)][static_cast<std::size_t>(leg)])
                                    : D.ubar[static_cast<std::size_t>(k)][static_cast<std::size_t>(leg)];
        // cu always multiplies the U_leg action and cubar the conj(U_leg)
        // action: conj(V_k) = sum conj(u(k,leg)) conj(U_leg) + conj(ubar(k,leg)) U_leg.
        std::vector<SlotTerm> local;
        if (cu != Cd{0.0, 0.0}) {
            local.clear();
            leg_terms(D, J, leg, false, h, twist, local);
            for (auto& t : local) out.push_back({std::move(t.h), cu * t.amp});
        }
        if (cubar != Cd{0.0, 0.0}) {
            local.clear();
            leg_terms(D, J, leg, true, h, twist, local);
            for (auto& t : local) out.push_back({std::move(t.h), cubar * t.amp});
        }
    }
}

std::vector<double> t_block_singulars(const FloatOperatorData& D, const HeisenbergIndex& J,
                                      long degree, const std::optional<Cd>& twist) {
    const int n = D.n;
    const int m = n + 1;

    // Domain slots: |h|_inf <= degree.  Target slots reach one unit further,
    // so raising out of the window lands on a penalizing row instead of
    // silently vanishing.
    std::size_t dom_slots = 1, tgt_slots = 1;
    for (int j = 0; j < n; ++j) {
        dom_slots *= static_cast<std::size_t>(degree + 1);
        tgt_slots *= static_cast<std::size_t>(degree + 2);
    }
    const auto dom_id = [&](const std::vector<long>& h) {
        std::size_t id = 0, stride = 1;
        for (int j = 0; j < n; ++j) {
            id += static_cast<std::size_t>(h[static_cast<std::size_t>(j)]) * stride;
            stride *= static_cast<std::size_t>(degree + 1);
        }
        return id;
    };
    const auto tgt_id = [&](const std::vector<long>& h) {
        std::size_t id = 0, stride = 1;
        for (int j = 0; j < n; ++j) {
            id += static_cast<std::size_t>(h[static_cast<std::size_t>(j)]) * stride;
            stride *= static_cast<std::size_t>(degree + 2);
        }
        return id;
    };

    const auto pairs = pair_list(m);
    const std::size_t rows = (pairs.size() + 1) * tgt_slots;
    const std::size_t cols = static_cast<std::size_t>(m) * dom_slots;
    CMatD raw(rows, CVecD(cols, Cd{0.0, 0.0}));

    std::vector<long> h(static_cast<std::size_t>(n), 0);
    std::vector<SlotTerm> terms;
    while (true) {
        const std::size_t hd = dom_id(h);
        // dbar rows.
        for (std::size_t r = 0; r < pairs.size(); ++r) {
            const auto [j, k] = pairs[r];
            terms.clear();
            field_terms(D, J, j, true, h, twist, terms);
            for (const auto& t : terms)
                raw[r * tgt_slots + tgt_id(t.h)][static_cast<std::size_t>(k) * dom_slots + hd] += t.amp;
            terms.clear();
            field_terms(D, J, k, true, h, twist, terms);
            for (const auto& t : terms)
                raw[r * tgt_slots + tgt_id(t.h)][static_cast<std::size_t>(j) * dom_slots + hd] -= t.amp;
            for (int l = 0; l < m; ++l) {
                const Cd tv = D.t02[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
                if (tv != Cd{0.0, 0.0})
                    raw[r * tgt_slots + tgt_id(h)][static_cast<std::size_t>(l) * dom_slots + hd] += tv;
            }
        }
        // Adjoint rows: sum_{j,k} conj(H(j,k)) V_k s_j = 0 slot by slot.
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                const Cd hjk = std::conj(D.gram[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]);
                if (hjk == Cd{0.0, 0.0}) continue;
                terms.clear();
                field_terms(D, J, k, false, h, twist, terms);
                for (const auto& t : terms)
                    raw[pairs.size() * tgt_slots + tgt_id(t.h)][static_cast<std::size_t>(j) * dom_slots + hd] +=
                        hjk * t.amp;
            }
        // Odometer.
        int j = 0;
        for (; j < n; ++j) {
            if (h[static_cast<std::size_t>(j)] < degree) {
                ++h[static_cast<std::size_t>(j)];
                break;
            }
            h[static_cast<std::size_t>(j)] = 0;
        }
        if (j == n) break;
    }

    const CMatD L = cholesky_lower(D.gram);
    const CMatD K = upper_inverse(adjoint_mat(L));
    if (!pairs.empty()) {
        const CMatD L2H = adjoint_mat(cholesky_lower(pair_gram(D.gram, pairs)));
        CMatD top(raw.begin(), raw.begin() + static_cast<long>(pairs.size() * tgt_slots));
        mix_rows(top, L2H, tgt_slots);
        for (std::size_t r = 0; r < pairs.size() * tgt_slots; ++r) raw[r] = std::move(top[r]);
    }
    mix_columns(raw, K, dom_slots);
    return singular_values(raw);
}

}  // namespace

// ============================================================================
// Galerkin sweeps
// ============================================================================

namespace {

/// The 4-dimensional preset family needs the twisted Hermite basis; its
/// harmonic system carries the additive diagonal -i beta / (4 delta) on the
/// first ladder leg.
std::optional<Cd> family_twist(const AlmostComplexStructure& acs, const MetricParams& g) {
    if (auto f4 = detect_kt4(acs); f4 && kt4_metric_matches(g, *f4)) {
        const double e = f4->beta.to_complex().real() / (4.0 * f4->delta.to_complex().real());
        return Cd{0.0, -e};
    }
    return std::nullopt;
}

}  // namespace

GalerkinResult galerkin_kernel_count(const AlmostComplexStructure& acs, const MetricParams& g,
                                     const GalerkinConfig& cfg) {
    const int n = acs.n;
    metric_validate(g, n);
    if (cfg.torus_radius < 0 || cfg.m_cutoff < 1 || cfg.l_cutoff < 0 || cfg.hermite_degree < 0)
        throw std::invalid_argument("galerkin_kernel_count: cutoffs out of range");

    const FloatOperatorData D = float_operator_data(acs, g);
    const std::optional<Cd> twist = family_twist(acs, g);

    GalerkinResult res;
    double largest_kernel = 0.0;
    double smallest_rejected = std::numeric_limits<double>::infinity();
    std::vector<double> head;
    const auto absorb = [&](const std::vector<double>& sig) {
        for (double s : sig) {
            if (s < cfg.epsilon) {
                ++res.kernel_count;
                largest_kernel = std::max(largest_kernel, s);
            } else {
                smallest_rejected = std::min(smallest_rejected, s);
            }
        }
        head.insert(head.end(), sig.begin(), sig.end());
        std::sort(head.begin(), head.end());
        if (head.size() > 12) head.resize(12);
    };

    // Torus sectors: |p|, |q|, |l| <= torus_radius.
    {
        const long R = cfg.torus_radius;
        std::vector<long> digits(static_cast<std::size_t>(2 * n + 1), -R);
        while (true) {
            TorusIndex I;
            I.p.assign(digits.begin(), digits.begin() + n);
            I.q.assign(digits.begin() + n, digits.begin() + 2 * n);
            I.l = digits[static_cast<std::size_t>(2 * n)];
            absorb(s_block_singulars(D, I));
            std::size_t j = 0;
            for (; j < digits.size(); ++j) {
                if (digits[j] < R) {
                    ++digits[j];
                    break;
                }
                digits[j] = -R;
            }
            if (j == digits.size()) break;
        }
    }

    // Theta sectors: 0 < |m| <= m_cutoff, residues, |l| <= l_cutoff.
    for (long m = -cfg.m_cutoff; m <= cfg.m_cutoff; ++m) {
        if (m == 0) continue;
        const long mod = std::labs(m);
        std::vector<long> q(static_cast<std::size_t>(n), 0);
        while (true) {
            for (long l = -cfg.l_cutoff; l <= cfg.l_cutoff; ++l) {
                HeisenbergIndex J;
                J.m = m;
                J.q = q;
                J.l = l;
                absorb(t_block_singulars(D, J, cfg.hermite_degree, twist));
            }
            int j = 0;
            for (; j < n; ++j) {
                if (q[static_cast<std::size_t>(j)] < mod - 1) {
                    ++q[static_cast<std::size_t>(j)];
                    break;
                }
                q[static_cast<std::size_t>(j)] = 0;
            }
            if (j == n) break;
        }
    }

    const double upper = std::isinf(smallest_rejected) ? 0.0 : smallest_rejected;
    res.inconclusive =
        !std::isinf(smallest_rejected) && (upper - largest_kernel) < 10.0 * cfg.epsilon;
    res.spectrum_head = std::move(head);
    return res;
}

std::vector<double> galerkin_torus_singulars(const AlmostComplexStructure& acs,
                                             const MetricParams& g, const TorusIndex& I) {
    index_validate(I, acs.n);
    return s_block_singulars(float_operator_data(acs, g), I);
}

std::vector<double> galerkin_theta_singulars(const AlmostComplexStructure& acs,
                                             const MetricParams& g, const HeisenbergIndex& J,
                                             long degree) {
    index_validate(J, HermiteIndex{std::vector<long>(static_cast<std::size_t>(acs.n), 0)}, acs.n);
    if (degree < 0) throw std::invalid_argument("galerkin_theta_singulars: negative degree");
    return t_block_singulars(float_operator_data(acs, g), J, degree, family_twist(acs, g));
}

int zero_form_kernel_count(const MetricParams& g, int n, const GalerkinConfig& cfg) {
    metric_validate(g, n);
    int count = 0;
    // Torus part.
    {
        const long R = cfg.torus_radius;
        std::vector<long> digits(static_cast<std::size_t>(2 * n + 1), -R);
        while (true) {
            TorusIndex I;
            I.p.assign(digits.begin(), digits.begin() + n);
            I.q.assign(digits.begin() + n, digits.begin() + 2 * n);
            I.l = digits[static_cast<std::size_t>(2 * n)];
            if (std::abs(laplace_eigenvalue(I, g).to_complex().real()) < cfg.epsilon) ++count;
            std::size_t j = 0;
            for (; j < digits.size(); ++j) {
                if (digits[j] < R) {
                    ++digits[j];
                    break;
                }
                digits[j] = -R;
            }
            if (j == digits.size()) break;
        }
    }
    // Theta part: eigenvalues are bounded away from zero, but sweep anyway.
    for (long m = -cfg.m_cutoff; m <= cfg.m_cutoff; ++m) {
        if (m == 0) continue;
        const long mod = std::labs(m);
        std::vector<long> q(static_cast<std::size_t>(n), 0);
        while (true) {
            for (long l = -cfg.l_cutoff; l <= cfg.l_cutoff; ++l) {
                std::vector<long> h(static_cast<std::size_t>(n), 0);
                while (true) {
                    HeisenbergIndex J;
                    J.m = m;
                    J.q = q;
                    J.l = l;
                    if (std::abs(laplace_eigenvalue(J, HermiteIndex{h}, g).to_complex().real()) <
                        cfg.epsilon)
                        ++count;
                    int j = 0;
                    for (; j < n; ++j) {
                        if (h[static_cast<std::size_t>(j)] < cfg.hermite_degree) {
                            ++h[static_cast<std::size_t>(j)];
                            break;
                        }
                        h[static_cast<std::size_t>(j)] = 0;
                    }
                    if (j == n) break;
                }
            }
            int j = 0;
            for (; j < n; ++j) {
                if (q[static_cast<std::size_t>(j)] < mod - 1) {
                    ++q[static_cast<std::size_t>(j)];
                    break;
                }
                q[static_cast<std::size_t>(j)] = 0;
            }
            if (j == n) break;
        }
    }
    return count;
}

// ============================================================================
// Quadrature witnesses
// ============================================================================

namespace {

/// Grid evaluations of basis functions over the fundamental domain (n == 1),
/// memoized per index.
class GridEvaluator {
  public:
    GridEvaluator(int N, const MetricParams& g, int xi) : N_(N), g_(g), xi_(xi) {
        if (N < 2) throw std::invalid_argument("oracle quadrature: grid too small");
        total_ = static_cast<std::size_t>(N) * static_cast<std::size_t>(N) *
                 static_cast<std::size_t>(N) * static_cast<std::size_t>(N);
    }

    [[nodiscard]] std::size_t total() const { return total_; }

    const CVecD& torus_vals(const TorusIndex& I) {
        std::vector<long> key{0, I.p[0], I.q[0], I.l};
        return memoized(key, [&](CVecD& out) {
            for_grid([&](std::size_t idx, const Point& p) { out[idx] = eval_basis(I, p); });
        });
    }

    const CVecD& theta_vals(const HeisenbergIndex& J, const std::vector<long>& h) {
        std::vector<long> key{1, J.m, J.q[0], J.l, h[0]};
        return memoized(key, [&](CVecD& out) {
            const HermiteIndex hi{h};
            for_grid([&](std::size_t idx, const Point& p) { out[idx] = eval_basis(J, hi, g_, p, xi_); });
        });
    }

    Cd inner(const CVecD& u, const CVecD& v) const {
        Cd s{0.0, 0.0};
        for (std::size_t i = 0; i < total_; ++i) s += u[i] * std::conj(v[i]);
        return s / static_cast<double>(total_);
    }

  private:
    template <class F>
    void for_grid(const F& f) const {
        const double inv = 1.0 / static_cast<double>(N_);
        std::size_t idx = 0;
        Point p;
        p.x.assign(1, 0.0);
        p.y.assign(1, 0.0);
        for (int ix = 0; ix < N_; ++ix)
            for (int iy = 0; iy < N_; ++iy)
                for (int iz = 0; iz < N_; ++iz)
                    for (int it = 0; it < N_; ++it) {
                        p.x[0] = ix * inv;
                        p.y[0] = iy * inv;
                        p.z = iz * inv;
                        p.t = it * inv;
                        f(idx++, p);
                    }
    }

    template <class Fill>
    const CVecD& memoized(const std::vector<long>& key, const Fill& fill) {
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        CVecD out(total_, Cd{0.0, 0.0});
        fill(out);
        return memo_.emplace(key, std::move(out)).first->second;
    }

    int N_;
    MetricParams g_;
    int xi_;
    std::size_t total_{0};
    std::map<std::vector<long>, CVecD> memo_;
};

struct PreparedFunction {
    BasisFunction spec;
    const CVecD* vals{nullptr};
    double norm{1.0};
};

/// Same joint eigenspace of the invariant operators?  Torus indices are
/// sectors of their own; theta sectors are cut by (m, residues, l) with the
/// Hermite order varying inside.
bool same_sector(const BasisFunction& a, const BasisFunction& b) {
    if (a.torus != b.torus) return false;
    if (a.torus) return a.I.p == b.I.p && a.I.q == b.I.q && a.I.l == b.I.l;
    return a.J.m == b.J.m && a.J.q == b.J.q && a.J.l == b.J.l;
}

/// Image of U_leg / conj(U_leg) applied to one prepared function, as grid
/// values scaled by the function's normalization.
CVecD op_image(GridEvaluator& grid, const PreparedFunction& f, const MetricParams& g, int leg,
               bool conjugated) {
    CVecD out(grid.total(), Cd{0.0, 0.0});
    if (f.spec.torus) {
        const TorusIndex& I = f.spec.I;
        Cd scale;
        if (leg == 0) {
            const double b = weight_value(g.b[0]);
            const double c = weight_value(g.c[0]);
            const Cd dx{0.0, k_two_pi * static_cast<double>(I.p[0]) * b};
            const Cd dy{0.0, k_two_pi * static_cast<double>(I.q[0]) * c};
            scale = conjugated ? dx - Cd{0.0, 1.0} * dy : dx + Cd{0.0, 1.0} * dy;
        } else {
            const double a = weight_value(g.a);
            scale = Cd{0.0, k_two_pi * static_cast<double>(I.l) * a};
        }
        const CVecD& base = grid.torus_vals(I);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * base[i] / f.norm;
        return out;
    }
    const auto terms = ladder_apply(leg, conjugated, f.spec.J, f.spec.h, g);
    for (const LadderTerm& term : terms) {
        const Cd amp = term.amplitude() / f.norm;
        const CVecD& base = grid.theta_vals(f.spec.J, term.h.h);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += amp * base[i];
    }
    return out;
}

std::vector<PreparedFunction> prepare(GridEvaluator& grid, const std::vector<BasisFunction>& funcs,
                                      int n) {
    if (n != 1)
        throw std::invalid_argument(
            "oracle quadrature: the grid witnesses support n == 1 (cost grows as N^(2n+2))");
    std::vector<PreparedFunction> out;
    out.reserve(funcs.size());
    for (const BasisFunction& f : funcs) {
        PreparedFunction pf;
        pf.spec = f;
        if (f.torus) {
            index_validate(f.I, 1);
            pf.vals = &grid.torus_vals(f.I);
        } else {
            index_validate(f.J, f.h, 1);
            pf.vals = &grid.theta_vals(f.J, f.h.h);
        }
        pf.norm = std::sqrt(grid.inner(*pf.vals, *pf.vals).real());
        if (!(pf.norm > 1e-150))
            throw std::invalid_argument("oracle quadrature: basis function vanishes on the grid");
        out.push_back(pf);
    }
    return out;
}

}  // namespace

double max_cross_sector_entry(const std::vector<BasisFunction>& funcs, int n,
                              const MetricParams& g, const GalerkinConfig& cfg) {
    metric_validate(g, n);
    GridEvaluator grid(cfg.quadrature_points, g, cfg.xi_cutoff);
    const auto prepared = prepare(grid, funcs, n);

    double worst = 0.0;
    for (std::size_t a = 0; a < prepared.size(); ++a) {
        std::vector<CVecD> images;
        // Identity (mass matrix) plus every frame leg, both conjugations.
        {
            CVecD base(grid.total());
            for (std::size_t i = 0; i < base.size(); ++i)
                base[i] = (*prepared[a].vals)[i] / prepared[a].norm;
            images.push_back(std::move(base));
        }
        for (int leg = 0; leg <= n; ++leg)
            for (const bool conj_ : {false, true})
                images.push_back(op_image(grid, prepared[a], g, leg, conj_));

        for (std::size_t b = 0; b < prepared.size(); ++b) {
            if (same_sector(prepared[a].spec, prepared[b].spec)) continue;
            for (const CVecD& img : images) {
                const Cd e = grid.inner(img, *prepared[b].vals) / prepared[b].norm;
                worst = std::max(worst, std::abs(e));
            }
        }
    }
    return worst;
}

double adjoint_pairing_error(const std::vector<BasisFunction>& funcs, int n,
                             const MetricParams& g, const GalerkinConfig& cfg) {
    metric_validate(g, n);
    GridEvaluator grid(cfg.quadrature_points, g, cfg.xi_cutoff);
    const auto prepared = prepare(grid, funcs, n);

    double worst = 0.0;
    for (std::size_t a = 0; a < prepared.size(); ++a)
        for (std::size_t b = 0; b < prepared.size(); ++b) {
            if (!same_sector(prepared[a].spec, prepared[b].spec)) continue;
            CVecD fa(grid.total()), fb(grid.total());
            for (std::size_t i = 0; i < fa.size(); ++i) {
                fa[i] = (*prepared[a].vals)[i] / prepared[a].norm;
                fb[i] = (*prepared[b].vals)[i] / prepared[b].norm;
            }
            for (int leg = 0; leg <= n; ++leg) {
                const CVecD ua = op_image(grid, prepared[a], g, leg, false);
                const CVecD uconj_b = op_image(grid, prepared[b], g, leg, true);
                // <U f, g> + <f, conj(U) g> must vanish: the frame fields are
                // divergence free, so the adjoint of U is -conj(U).
                const Cd err = grid.inner(ua, fb) + grid.inner(fa, uconj_b);
                worst = std::max(worst, std::abs(err));
                const CVecD uca = op_image(grid, prepared[a], g, leg, true);
                const CVecD u_b = op_image(grid, prepared[b], g, leg, false);
                const Cd err2 = grid.inner(uca, fb) + grid.inner(fa, u_b);
                worst = std::max(worst, std::abs(err2));
            }
        }
    return worst;
}

}  // namespace ktlab
