/**
 * @file sector.cpp
 * @brief Sector-by-sector assembly of the harmonic (0,1)-form equations.
 */

#include "ktlab/sector.hpp"

#include <sstream>
#include <stdexcept>
#include <utility>

namespace ktlab {

namespace {

std::string join_longs(const std::vector<long>& v) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ',';
        out << v[i];
    }
    out << ']';
    return out.str();
}

/// a / b, throwing std::domain_error when the quotient leaves the ring.
ExactScalar divide_exact(const ExactScalar& a, const ExactScalar& b, const char* what) {
    auto q = a.try_divide(b);
    if (!q) throw std::domain_error(std::string("frame_expansion: ") + what +
                                    " does not divide exactly in the scalar ring");
    return *q;
}

}  // namespace

// ============================================================================
// Sector identity
// ============================================================================

std::string SectorIndex::label() const {
    std::ostringstream out;
    if (is_torus()) {
        const TorusIndex& I = torus();
        out << "S(p=" << join_longs(I.p) << ", q=" << join_longs(I.q) << ", l=" << I.l << ")";
    } else {
        const HeisenbergIndex& J = theta();
        out << "T(m=" << J.m << ", q=" << join_longs(J.q) << ", l=" << J.l << ")";
    }
    return out.str();
}

// ============================================================================
// Frame expansion
// ============================================================================

FrameExpansion frame_expansion(const AlmostComplexStructure& acs, const MetricParams& g) {
    const int n = acs.n;
    metric_validate(g, n);
    if (acs.A.rows() != 2 * n + 2 || acs.A.cols() != n + 1)
        throw std::invalid_argument("frame_expansion: structure matrix has wrong shape");

    // Invert the ladder-frame definitions:
    //   d/dx_j = (U_j + conj U_j) / (2 b_j),   Y_j = -i (U_j - conj U_j) / (2 c_j),
    //   d/dt   = (U_n + conj U_n) / (2 a),     d/dz = -i (U_n - conj U_n) / (2 d).
    const ExactScalar two{2L};
    const ExactScalar im = ExactScalar::i();

    FrameExpansion fe;
    fe.n = n;
    fe.u = Matrix(n + 1, n + 1);
    fe.ubar = Matrix(n + 1, n + 1);
    for (int k = 0; k <= n; ++k) {
        for (int j = 0; j < n; ++j) {
            const ExactScalar x = divide_exact(acs.A(j, k), two * g.b[j], "a d/dx coefficient");
            const ExactScalar y = divide_exact(acs.A(n + j, k), two * g.c[j], "a Y coefficient");
            fe.u(k, j) = x - im * y;
            fe.ubar(k, j) = x + im * y;
        }
        const ExactScalar z = divide_exact(acs.A(2 * n, k), two * g.d, "the d/dz coefficient");
        const ExactScalar t = divide_exact(acs.A(2 * n + 1, k), two * g.a, "the d/dt coefficient");
        fe.u(k, n) = t - im * z;
        fe.ubar(k, n) = t + im * z;
    }
    return fe;
}

// ============================================================================
// Scalar data
// ============================================================================

Vec scalar_actions(const Matrix& frame_matrix, const TorusIndex& I, int n) {
    index_validate(I, n);
    if (frame_matrix.rows() != 2 * n + 2)
        throw std::invalid_argument("scalar_actions: frame matrix has wrong row count");
    const ExactScalar two_pi_i = ExactScalar{2L} * ExactScalar::pi() * ExactScalar::i();

    Vec act(static_cast<std::size_t>(2 * n + 2), ExactScalar{});
    for (int j = 0; j < n; ++j) {
        act[j] = two_pi_i * ExactScalar{I.p[j]};
        act[n + j] = two_pi_i * ExactScalar{I.q[j]};
    }
    act[2 * n] = ExactScalar{};  // d/dz kills the torus characters
    act[2 * n + 1] = two_pi_i * ExactScalar{I.l};

    Vec v(static_cast<std::size_t>(frame_matrix.cols()), ExactScalar{});
    for (int k = 0; k < frame_matrix.cols(); ++k)
        for (int i = 0; i < 2 * n + 2; ++i) v[k] = v[k] + frame_matrix(i, k) * act[i];
    return v;
}

Matrix gram_01(const AlmostComplexStructure& acs, const MetricParams& g) {
    const int n = acs.n;
    metric_validate(g, n);
    const ManifoldModel model = acs.model();
    const std::vector<ExactScalar> w = metric_coframe_weights(g, model);
    const int dim = 2 * n + 2;

    // h(conj phi^j, conj phi^k) = sum_c w_c^2 conj(P(j,c)) P(k,c) with
    // P = (complex coframe in real coframe).  Rather than materialising P
    // (whose entries can leave the scalar ring even when the Gram matrix
    // itself does not), invert M(u, v) = sum_c F(c, u) conj(F(c, v)) / w_c^2
    // where F(c, k) = [A | conj A](frame dual to slot c, k); then the Gram
    // matrix is the leading (n+1) x (n+1) block of M^{-1}, transposed.
    // To avoid inverting individual weights (which may also leave the ring),
    // work with the scaled matrix S * M where S = prod_c w_c^2 is
    // division-free, using M^{-1} = S * (S M)^{-1} entrywise via Cramer.
    Matrix F(dim, dim);
    for (int c = 0; c < dim; ++c) {
        const int a = model.frame_of_coframe(c);
        for (int k = 0; k <= n; ++k) {
            F(c, k) = acs.A(a, k);
            F(c, n + 1 + k) = acs.A(a, k).conj();
        }
    }
    std::vector<ExactScalar> w2(static_cast<std::size_t>(dim));
    for (int c = 0; c < dim; ++c)
        w2[static_cast<std::size_t>(c)] =
            w[static_cast<std::size_t>(c)] * w[static_cast<std::size_t>(c)];
    ExactScalar S = ExactScalar::one();
    for (int c = 0; c < dim; ++c) S = S * w2[static_cast<std::size_t>(c)];
    std::vector<ExactScalar> excl(static_cast<std::size_t>(dim), ExactScalar::one());
    for (int c = 0; c < dim; ++c)
        for (int cc = 0; cc < dim; ++cc)
            if (cc != c)
                excl[static_cast<std::size_t>(c)] =
                    excl[static_cast<std::size_t>(c)] * w2[static_cast<std::size_t>(cc)];
    Matrix M(dim, dim);
    for (int u = 0; u < dim; ++u)
        for (int v = 0; v < dim; ++v) {
            ExactScalar s{};
            for (int c = 0; c < dim; ++c) {
                if (F(c, u).is_zero() || F(c, v).is_zero()) continue;
                s = s + F(c, u) * F(c, v).conj() * excl[static_cast<std::size_t>(c)];
            }
            M(u, v) = s;
        }
    const ExactScalar D = det(M);
    if (D.is_zero())
        throw std::invalid_argument("gram_01: structure matrix does not span the coframe");
    Matrix H(n + 1, n + 1);
    for (int j = 0; j <= n; ++j)
        for (int k = 0; k <= n; ++k) {
            Vec e(static_cast<std::size_t>(dim), ExactScalar{});
            e[static_cast<std::size_t>(j)] = ExactScalar::one();
            const auto q = (S * det(M.with_column(k, e))).try_divide(D);
            if (!q)
                throw std::domain_error(
                    "gram_01: coframe pairing leaves the scalar ring; this structure/metric "
                    "pair is unsupported");
            H(j, k) = *q;
        }
    return H;
}

std::vector<Matrix> torsion_02(const AlmostComplexStructure& acs) {
    const int n = acs.n;
    const ManifoldModel model = acs.model();
    const int dim = 2 * n + 2;

    // Bracket tensor of the real frame, [X_a, X_b] = sum_f gamma[f](a, b) X_f,
    // read off the structure equations: d e^c (X_a, X_b) = -e^c([X_a, X_b]).
    std::vector<Matrix> gamma(static_cast<std::size_t>(dim), Matrix(dim, dim));
    for (int c = 0; c < dim; ++c) {
        const InvariantForm de = exterior_d(InvariantForm::generator(c), model);
        const int f = model.frame_of_coframe(c);
        for (const auto& [key, coeff] : de.terms()) {
            const int a = model.frame_of_coframe(key[0]);
            const int b = model.frame_of_coframe(key[1]);
            gamma[static_cast<std::size_t>(f)](a, b) = -coeff;
            gamma[static_cast<std::size_t>(f)](b, a) = coeff;
        }
    }

    // Complex frame matrix F = [A | conj A] over the real frame.
    Matrix F(dim, dim);
    for (int a = 0; a < dim; ++a)
        for (int k = 0; k <= n; ++k) {
            F(a, k) = acs.A(a, k);
            F(a, n + 1 + k) = acs.A(a, k).conj();
        }
    const ExactScalar detF = det(F);
    if (detF.is_zero())
        throw std::invalid_argument("torsion_02: structure matrix does not span");

    // T[l](j, k) = -(conj(phi^l) component of [conj V_j, conj V_k]); solving
    // for each needed component by Cramer's rule keeps the computation inside
    // the scalar ring whenever the torsion constants themselves are (the full
    // dual coframe may not be).
    std::vector<Matrix> T(static_cast<std::size_t>(n) + 1, Matrix(n + 1, n + 1));
    for (int j = 0; j <= n; ++j)
        for (int k = j + 1; k <= n; ++k) {
            Vec W(static_cast<std::size_t>(dim), ExactScalar{});
            for (int a = 0; a < dim; ++a) {
                const ExactScalar aj = acs.A(a, j).conj();
                if (aj.is_zero()) continue;
                for (int b = 0; b < dim; ++b) {
                    const ExactScalar bk = acs.A(b, k).conj();
                    if (bk.is_zero()) continue;
                    for (int f = 0; f < dim; ++f) {
                        const ExactScalar& gfab = gamma[static_cast<std::size_t>(f)](a, b);
                        if (!gfab.is_zero())
                            W[static_cast<std::size_t>(f)] =
                                W[static_cast<std::size_t>(f)] + aj * bk * gfab;
                    }
                }
            }
            for (int l = 0; l <= n; ++l) {
                const ExactScalar dl = det(F.with_column(n + 1 + l, W));
                const auto q = dl.try_divide(detF);
                if (!q)
                    throw std::domain_error(
                        "torsion_02: torsion coefficients leave the scalar ring; this almost "
                        "complex structure is unsupported");
                T[static_cast<std::size_t>(l)](j, k) = -(*q);
                T[static_cast<std::size_t>(l)](k, j) = *q;
            }
        }
    return T;
}

SectorOperator sector_operator(const AlmostComplexStructure& acs, const MetricParams& g) {
    return SectorOperator{acs, g, frame_expansion(acs, g), gram_01(acs, g), torsion_02(acs)};
}

// ============================================================================
// Torus sectors
// ============================================================================

namespace {

std::vector<std::string> unknown_labels(int n) {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(n) + 1);
    for (int j = 1; j <= n + 1; ++j) labels.push_back("s_" + std::to_string(j));
    return labels;
}

}  // namespace

namespace {

SectorSystem s_system_impl(const Matrix& A, const Matrix& H, const std::vector<Matrix>& T,
                           const TorusIndex& I, int n) {
    const Vec v = scalar_actions(A, I, n);
    const Vec vbar = scalar_actions(A.conj(), I, n);

    const int pairs = n * (n + 1) / 2;
    SectorSystem sys;
    sys.sector = SectorIndex{I};
    sys.unknowns = unknown_labels(n);
    sys.equations = Matrix(pairs + 1, n + 1);

    int r = 0;
    for (int j = 0; j <= n; ++j)
        for (int k = j + 1; k <= n; ++k, ++r) {
            sys.equations(r, k) = sys.equations(r, k) + vbar[j];
            sys.equations(r, j) = sys.equations(r, j) - vbar[k];
            for (int l = 0; l <= n; ++l)
                sys.equations(r, l) = sys.equations(r, l) + T[l](j, k);
            sys.provenance.push_back("dbar(" + std::to_string(j + 1) + "," +
                                     std::to_string(k + 1) + ")");
        }
    // Adjoint row: dbar* u = 0 on the sector of f is orthogonality of u to
    // dbar f = sum_k (conj(V_k) f) conj(phi^k).  Pairing u_j conj(phi^j)
    // against the k-th component goes through <conj phi^j, conj phi^k>,
    // which is the (k, j) entry of the Gram returned by gram_01; the purely
    // imaginary torus actions turn the conjugated coefficients back into
    // v_k up to a global sign that does not affect the equation.
    for (int j = 0; j <= n; ++j) {
        ExactScalar e{};
        for (int k = 0; k <= n; ++k) e = e + H(k, j) * v[k];
        sys.equations(r, j) = e;
    }
    sys.provenance.push_back("adjoint");
    return sys;
}

}  // namespace

SectorSystem s_sector_system(const AlmostComplexStructure& acs, const MetricParams& g,
                             const TorusIndex& I) {
    return s_system_impl(acs.A, gram_01(acs, g), torsion_02(acs), I, acs.n);
}

SectorSystem s_sector_system(const SectorOperator& op, const TorusIndex& I) {
    return s_system_impl(op.acs.A, op.gram, op.torsion, I, op.acs.n);
}

// ============================================================================
// Theta sectors
// ============================================================================

void coeffvec_prune(CoeffVec& v) {
    for (auto it = v.begin(); it != v.end();)
        it = it->second.is_zero() ? v.erase(it) : std::next(it);
}

bool coeffvec_is_zero(const CoeffVec& v) {
    for (const auto& [h, c] : v)
        if (!c.is_zero()) return false;
    return true;
}

void ThetaAlgebra::apply_atom(const LadderAtom& atom, const CoeffVec& v, CoeffVec& out) const {
    if (atom.coeff.is_zero()) return;
    if (atom.kind == LadderAtom::Kind::Identity) {
        for (const auto& [h, c] : v) out[h] = out[h] + atom.coeff * c;
        return;
    }
    const int j = atom.leg;
    const bool conjugated = atom.kind == LadderAtom::Kind::Ubar;
    if (j == n) {
        const ExactScalar& d = conjugated ? diag_ubar : diag_u;
        for (const auto& [h, c] : v) out[h] = out[h] + atom.coeff * d * c;
        return;
    }
    // On the rescaled basis: with m > 0, U_j raises with coefficient -1 and
    // conj(U_j) lowers with coefficient 2 h_j rho_j^2; with m < 0 the roles
    // swap.  A nonzero twist adds a diagonal constant to both.
    const bool raises = (J.m > 0) != conjugated;
    for (const auto& [h, c] : v) {
        const ExactScalar contrib = atom.coeff * c;
        if (raises) {
            std::vector<long> up = h;
            ++up[j];
            out[up] = out[up] - contrib;
        } else if (h[static_cast<std::size_t>(j)] > 0) {
            std::vector<long> down = h;
            --down[j];
            out[down] = out[down] + ExactScalar{2 * h[static_cast<std::size_t>(j)]} * rho_sq[j] *
                                        contrib;
        }
        if (!twist[static_cast<std::size_t>(j)].is_zero())
            out[h] = out[h] + twist[static_cast<std::size_t>(j)] * contrib;
    }
}

CoeffVec ThetaAlgebra::apply(const LadderOp& op, const CoeffVec& v) const {
    CoeffVec out;
    for (const LadderAtom& atom : op) apply_atom(atom, v, out);
    coeffvec_prune(out);
    return out;
}

ThetaAlgebra theta_algebra(const HeisenbergIndex& J, const MetricParams& g, int n) {
    index_validate(J, HermiteIndex{std::vector<long>(static_cast<std::size_t>(n), 0)}, n);
    metric_validate(g, n);

    ThetaAlgebra alg;
    alg.n = n;
    alg.J = J;
    const ExactScalar two_pi = ExactScalar{2L} * ExactScalar::pi();
    const ExactScalar abs_m{J.m > 0 ? J.m : -J.m};
    for (int j = 0; j < n; ++j) alg.rho_sq.push_back(two_pi * abs_m * g.b[j] * g.c[j]);
    const ExactScalar il = ExactScalar::i() * g.a * ExactScalar{J.l};
    const ExactScalar dm = g.d * ExactScalar{J.m};
    alg.diag_u = two_pi * (il - dm);
    alg.diag_ubar = two_pi * (il + dm);
    alg.twist.assign(static_cast<std::size_t>(n), ExactScalar{});
    return alg;
}

LadderOp field_op(const FrameExpansion& fe, int k, bool conjugated) {
    LadderOp op;
    for (int j = 0; j <= fe.n; ++j) {
        // conj(V_k) = sum_j conj(u(k,j)) conj(U_j) + conj(ubar(k,j)) U_j.
        const ExactScalar cu = conjugated ? fe.ubar(k, j).conj() : fe.u(k, j);
        const ExactScalar cubar = conjugated ? fe.u(k, j).conj() : fe.ubar(k, j);
        if (!cu.is_zero()) op.push_back({LadderAtom::Kind::U, j, cu});
        if (!cubar.is_zero()) op.push_back({LadderAtom::Kind::Ubar, j, cubar});
    }
    return op;
}

namespace {

ThetaSystem t_system_impl(const FrameExpansion& fe, const Matrix& H,
                          const std::vector<Matrix>& T, const MetricParams& g,
                          const HeisenbergIndex& J, int n) {
    ThetaSystem sys;
    sys.sector = SectorIndex{J};
    sys.unknowns = unknown_labels(n);
    sys.algebra = theta_algebra(J, g, n);
    for (int j = 0; j <= n; ++j)
        for (int k = j + 1; k <= n; ++k) {
            std::vector<LadderOp> row(static_cast<std::size_t>(n) + 1);
            LadderOp vjbar = field_op(fe, j, true);
            for (LadderAtom& a : vjbar) row[static_cast<std::size_t>(k)].push_back(a);
            LadderOp vkbar = field_op(fe, k, true);
            for (LadderAtom& a : vkbar) {
                a.coeff = -a.coeff;
                row[static_cast<std::size_t>(j)].push_back(a);
            }
            for (int l = 0; l <= n; ++l)
                if (!T[l](j, k).is_zero())
                    row[static_cast<std::size_t>(l)].push_back(
                        {LadderAtom::Kind::Identity, 0, T[l](j, k)});
            sys.rows.push_back(std::move(row));
            sys.provenance.push_back("dbar(" + std::to_string(j + 1) + "," +
                                     std::to_string(k + 1) + ")");
        }
    {
        // Adjoint row: integrating by parts against a test function of the
        // sector (the frame fields are divergence free) gives
        // sum_{j,k} <conj phi^j, conj phi^k> V_k s_j = 0, and the pairing is
        // the (k, j) entry of the Gram returned by gram_01.
        std::vector<LadderOp> row(static_cast<std::size_t>(n) + 1);
        for (int j = 0; j <= n; ++j)
            for (int k = 0; k <= n; ++k) {
                if (H(k, j).is_zero()) continue;
                LadderOp vk = field_op(fe, k, false);
                for (LadderAtom& a : vk) {
                    a.coeff = H(k, j) * a.coeff;
                    row[static_cast<std::size_t>(j)].push_back(a);
                }
            }
        sys.rows.push_back(std::move(row));
        sys.provenance.push_back("adjoint");
    }
    return sys;
}

}  // namespace

ThetaSystem t_sector_system(const AlmostComplexStructure& acs, const MetricParams& g,
                            const HeisenbergIndex& J) {
    return t_system_impl(frame_expansion(acs, g), gram_01(acs, g), torsion_02(acs), g, J, acs.n);
}

ThetaSystem t_sector_system(const SectorOperator& op, const HeisenbergIndex& J) {
    return t_system_impl(op.fe, op.gram, op.torsion, op.g, J, op.acs.n);
}

std::vector<CoeffVec> theta_apply_rows(const ThetaSystem& sys, const std::vector<CoeffVec>& s) {
    if (s.size() != sys.unknowns.size())
        throw std::invalid_argument("theta_apply_rows: wrong number of sections");
    std::vector<CoeffVec> residuals;
    residuals.reserve(sys.rows.size());
    for (const auto& row : sys.rows) {
        CoeffVec r;
        for (std::size_t u = 0; u < row.size(); ++u) {
            CoeffVec part = sys.algebra.apply(row[u], s[u]);
            for (const auto& [h, c] : part) r[h] = r[h] + c;
        }
        coeffvec_prune(r);
        residuals.push_back(std::move(r));
    }
    return residuals;
}

}  // namespace ktlab
