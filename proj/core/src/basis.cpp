#include "ktlab/basis.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "ktlab/hermite.hpp"

namespace ktlab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::complex<double> unit_phase(double cycles) {
    // exp(2*pi*i*cycles)
    return {std::cos(kTwoPi * cycles), std::sin(kTwoPi * cycles)};
}

void point_validate(const Point& pt, int n) {
    if (pt.x.size() != static_cast<std::size_t>(n) || pt.y.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("evaluation point has wrong dimension");
    }
}

ExactScalar scalar_of(long v) { return ExactScalar(make_rational(v)); }

}  // namespace

// ============================================================================
// Index validation
// ============================================================================

void index_validate(const TorusIndex& I, int n) {
    if (n < 1) {
        throw std::invalid_argument("index_validate: n must be >= 1");
    }
    if (I.p.size() != static_cast<std::size_t>(n) || I.q.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("torus index (p, q) must each have length n");
    }
}

void index_validate(const HeisenbergIndex& J, const HermiteIndex& h, int n) {
    if (n < 1) {
        throw std::invalid_argument("index_validate: n must be >= 1");
    }
    if (J.m == 0) {
        throw std::invalid_argument("theta-sector index requires a nonzero central weight m");
    }
    if (J.q.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("theta-sector residues q must have length n");
    }
    for (long qj : J.q) {
        if (qj < 0 || qj >= std::labs(J.m)) {
            throw std::invalid_argument("theta-sector residues must satisfy 0 <= q_j < |m|");
        }
    }
    if (h.h.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("Hermite multi-order must have length n");
    }
    for (long hj : h.h) {
        if (hj < 0) {
            throw std::invalid_argument("Hermite orders must be nonnegative");
        }
    }
}

// ============================================================================
// Evaluation
// ============================================================================

std::complex<double> eval_basis(const TorusIndex& I, const Point& pt) {
    const int n = static_cast<int>(I.p.size());
    index_validate(I, n);
    point_validate(pt, n);
    double cycles = static_cast<double>(I.l) * pt.t;
    for (int j = 0; j < n; ++j) {
        cycles += static_cast<double>(I.p[static_cast<std::size_t>(j)]) *
                  pt.x[static_cast<std::size_t>(j)];
        cycles += static_cast<double>(I.q[static_cast<std::size_t>(j)]) *
                  pt.y[static_cast<std::size_t>(j)];
    }
    return unit_phase(cycles);
}

std::complex<double> eval_basis(const HeisenbergIndex& J, const HermiteIndex& h,
                                const MetricParams& g, const Point& pt, int xi_cutoff) {
    const int n = static_cast<int>(J.q.size());
    index_validate(J, h, n);
    metric_validate(g, n);
    point_validate(pt, n);
    if (xi_cutoff < 1) {
        throw std::invalid_argument("xi_cutoff must be >= 1");
    }
    const double m = static_cast<double>(J.m);
    double cycles = static_cast<double>(J.l) * pt.t + m * pt.z;
    for (int j = 0; j < n; ++j) {
        cycles += static_cast<double>(J.q[static_cast<std::size_t>(j)]) *
                  pt.y[static_cast<std::size_t>(j)];
    }
    std::complex<double> value = unit_phase(cycles);
    for (int j = 0; j < n; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        const double bj = scalar_to_float(g.b[ju]).real();
        const double cj = scalar_to_float(g.c[ju]).real();
        const double kappa = std::sqrt(kTwoPi * std::abs(m) * cj / bj);
        const double shift = pt.x[ju] + static_cast<double>(J.q[ju]) / m;
        std::complex<double> factor{0.0, 0.0};
        for (int xi = -xi_cutoff; xi <= xi_cutoff; ++xi) {
            const double s = kappa * (shift + static_cast<double>(xi));
            factor += hermite_F(static_cast<int>(h.h[ju]), s) *
                      unit_phase(m * static_cast<double>(xi) * pt.y[ju]);
        }
        value *= factor;
    }
    return value;
}

std::complex<double> eval_twisted_basis(const HeisenbergIndex& J, long h, const ExactScalar& beta,
                                        const ExactScalar& delta, const Point& pt, int xi_cutoff) {
    const MetricParams g = metric_kt4(beta, delta);
    HermiteIndex hh;
    hh.h = {h};
    const std::complex<double> base = eval_basis(J, hh, g, pt, xi_cutoff);
    const double inv_delta = 1.0 / scalar_to_float(delta).real();
    const double angle = -pt.x.at(0) * inv_delta;
    return base * std::complex<double>{std::cos(angle), std::sin(angle)};
}

// ============================================================================
// Laplace eigenvalues
// ============================================================================

ExactScalar laplace_eigenvalue(const TorusIndex& I, const MetricParams& g) {
    const int n = static_cast<int>(I.p.size());
    index_validate(I, n);
    metric_validate(g, n);
    ExactScalar sum = g.a * g.a * scalar_of(I.l) * scalar_of(I.l);
    for (int j = 0; j < n; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        sum = sum + g.b[ju] * g.b[ju] * scalar_of(I.p[ju]) * scalar_of(I.p[ju]);
        sum = sum + g.c[ju] * g.c[ju] * scalar_of(I.q[ju]) * scalar_of(I.q[ju]);
    }
    return -(ExactScalar(make_rational(4)) * ExactScalar::pi(2) * sum);
}

ExactScalar laplace_eigenvalue(const HeisenbergIndex& J, const HermiteIndex& h,
                               const MetricParams& g) {
    const int n = static_cast<int>(J.q.size());
    index_validate(J, h, n);
    metric_validate(g, n);
    const long am = std::labs(J.m);
    ExactScalar ladder_part;
    for (int j = 0; j < n; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        ladder_part = ladder_part + ExactScalar::pi() * scalar_of(2 * am) * g.b[ju] * g.c[ju] *
                                        scalar_of(2 * h.h[ju] + 1);
    }
    ExactScalar char_part = g.a * g.a * scalar_of(J.l) * scalar_of(J.l) +
                            g.d * g.d * scalar_of(J.m) * scalar_of(J.m);
    return -(ladder_part + ExactScalar(make_rational(4)) * ExactScalar::pi(2) * char_part);
}

// ============================================================================
// Ladder action
// ============================================================================

std::complex<double> LadderTerm::amplitude() const {
    std::complex<double> value = scalar_to_float(coeff);
    if (radical_power != 0) {
        value *= std::sqrt(scalar_to_float(rho_sq).real());
    }
    return value;
}

std::string LadderTerm::to_string(const std::string& base_label) const {
    std::string label = base_label + "[h=(";
    for (std::size_t j = 0; j < h.h.size(); ++j) {
        if (j > 0) label += ",";
        label += std::to_string(h.h[j]);
    }
    label += ")]";
    const std::string coeff_text = coeff.to_string();
    std::string out;
    if (coeff_text == "1") {
        out = "";
    } else if (coeff_text == "-1") {
        out = "-";
    } else if (coeff_text.find(' ') != std::string::npos) {
        out = "(" + coeff_text + ")*";
    } else {
        out = coeff_text + "*";
    }
    if (radical_power != 0) {
        out += "sqrt(" + rho_sq.to_string() + ")*";
    }
    return out + label;
}

namespace {

/// Build the ladder term, folding the radical into the ring when possible.
LadderTerm make_ladder_term(HermiteIndex h_out, ExactScalar base_coeff, ExactScalar rho_sq) {
    LadderTerm term;
    term.h = std::move(h_out);
    if (auto root = scalar_sqrt(rho_sq); root.has_value()) {
        term.coeff = base_coeff * (*root);
        term.radical_power = 0;
        term.rho_sq = ExactScalar::one();
    } else {
        term.coeff = std::move(base_coeff);
        term.radical_power = 1;
        term.rho_sq = std::move(rho_sq);
    }
    return term;
}

}  // namespace

std::vector<LadderTerm> ladder_apply(int j, bool conjugated, const HeisenbergIndex& J,
                                     const HermiteIndex& h, const MetricParams& g) {
    const int n = static_cast<int>(J.q.size());
    index_validate(J, h, n);
    metric_validate(g, n);
    if (j < 0 || j > n) {
        throw std::invalid_argument("ladder_apply: leg index out of range");
    }

    std::vector<LadderTerm> out;
    if (j == n) {
        // Diagonal leg: multiplication by 2 pi i (a l +/- i d m).
        const ExactScalar il = ExactScalar::i() * g.a * scalar_of(J.l);
        const ExactScalar dm = g.d * scalar_of(J.m);
        const ExactScalar inner = conjugated ? il + dm : il - dm;
        LadderTerm term;
        term.h = h;
        term.coeff = ExactScalar(make_rational(2)) * ExactScalar::pi() * inner;
        term.radical_power = 0;
        term.rho_sq = ExactScalar::one();
        out.push_back(std::move(term));
        return out;
    }

    const auto ju = static_cast<std::size_t>(j);
    const long am = std::labs(J.m);
    const ExactScalar rho_sq = ExactScalar::pi() * scalar_of(2 * am) * g.b[ju] * g.c[ju];
    const bool raises = (J.m > 0) != conjugated;
    if (raises) {
        HermiteIndex up = h;
        up.h[ju] += 1;
        out.push_back(make_ladder_term(std::move(up), -ExactScalar::one(), rho_sq));
    } else {
        if (h.h[ju] == 0) {
            return out;  // lowering annihilates the ground order
        }
        HermiteIndex down = h;
        down.h[ju] -= 1;
        out.push_back(make_ladder_term(std::move(down), scalar_of(2 * h.h[ju]), rho_sq));
    }
    return out;
}

std::vector<LadderTerm> twisted_ladder_apply(int j, bool conjugated, const HeisenbergIndex& J,
                                             long h, const ExactScalar& beta,
                                             const ExactScalar& delta) {
    const MetricParams g = metric_kt4(beta, delta);
    HermiteIndex hh;
    hh.h = {h};
    index_validate(J, hh, 1);
    if (j < 0 || j > 1) {
        throw std::invalid_argument("twisted_ladder_apply: leg index out of range");
    }
    if (j == 1) {
        return ladder_apply(1, conjugated, J, hh, g);
    }
    std::vector<LadderTerm> out = ladder_apply(0, conjugated, J, hh, g);
    // The x-dependent twist exp(-i x / delta) contributes the diagonal term
    // b_1 * d/dx(twist)/twist = -i beta / delta for both U_1 and its conjugate.
    LadderTerm diag;
    diag.h = hh;
    diag.coeff = -(ExactScalar::i() * g.b[0] / g.d);
    diag.radical_power = 0;
    diag.rho_sq = ExactScalar::one();
    out.push_back(std::move(diag));
    return out;
}

}  // namespace ktlab
