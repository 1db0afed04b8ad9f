#include "ktlab/acs.hpp"

#include <stdexcept>

namespace ktlab {

namespace {

/// Permuted frame matrix Wp: row c (coframe slot), column k (complex frame
/// slot: V_1..V_{n+1}, conj V_1..conj V_{n+1}).  Wp(c,k) is the nu-component
/// of the k-th complex frame vector dual to theta^c, so theta = Wp * Phi.
Matrix permuted_frame_matrix(const AlmostComplexStructure& acs) {
    const ManifoldModel model = acs.model();
    const int dim = model.dim();
    const int m = acs.n + 1;
    if (acs.A.rows() != dim || acs.A.cols() != m)
        throw std::invalid_argument("AlmostComplexStructure: A must be (2n+2) x (n+1)");
    Matrix wp(dim, dim);
    for (int c = 0; c < dim; ++c) {
        const int i = model.frame_of_coframe(c);
        for (int k = 0; k < m; ++k) {
            wp(c, k) = acs.A(i, k);
            wp(c, m + k) = acs.A(i, k).conj();
        }
    }
    return wp;
}

/// Substitute each degree-1 slot of `form` by a row-combination given by
/// `sub`: slot s expands to sum_k sub(s,k) * (new slot k).
InvariantForm substitute_slots(const InvariantForm& form, const Matrix& sub) {
    InvariantForm out(form.degree());
    const int dim = sub.cols();
    for (const auto& [key, c] : form.terms()) {
        std::vector<std::pair<std::vector<int>, ExactScalar>> acc;
        acc.emplace_back(std::vector<int>{}, c);
        for (const int slot : key) {
            std::vector<std::pair<std::vector<int>, ExactScalar>> next;
            for (const auto& [partial, coeff] : acc) {
                for (int k = 0; k < dim; ++k) {
                    const ExactScalar& w = sub(slot, k);
                    if (w.is_zero()) continue;
                    std::vector<int> grown = partial;
                    grown.push_back(k);
                    next.emplace_back(std::move(grown), coeff * w);
                }
            }
            acc = std::move(next);
        }
        for (auto& [idx, coeff] : acc) out.add_term(std::move(idx), coeff);
    }
    return out;
}

}  // namespace

bool acs_spans(const AlmostComplexStructure& acs) {
    const Matrix wp = permuted_frame_matrix(acs);
    return rank(wp) == wp.rows();
}

DualCoframe dual_coframe(const AlmostComplexStructure& acs) {
    const Matrix wp = permuted_frame_matrix(acs);
    if (det(wp).is_zero())
        throw std::invalid_argument(
            "almost complex structure is degenerate: V_j and conjugates do not span");
    auto inv = try_inverse(wp);
    if (!inv)
        throw std::domain_error(
            "dual coframe coefficients leave the scalar ring; "
            "this almost complex structure is unsupported");
    DualCoframe dc;
    dc.real_from_complex = wp;
    dc.complex_from_real = *inv;
    const int m = acs.n + 1;
    for (int j = 0; j < m; ++j) {
        InvariantForm phi(1);
        for (int c = 0; c < wp.cols(); ++c) phi.add_term({c}, dc.complex_from_real(j, c));
        dc.phi.push_back(std::move(phi));
    }
    return dc;
}

Bidegrees bidegree_split(const InvariantForm& form, const AlmostComplexStructure& acs) {
    const Matrix wp = permuted_frame_matrix(acs);
    const InvariantForm in_phi = substitute_slots(form, wp);
    const int m = acs.n + 1;
    Bidegrees out;
    for (const auto& [key, c] : in_phi.terms()) {
        int p = 0;
        for (const int k : key) p += (k < m) ? 1 : 0;
        const int q = static_cast<int>(key.size()) - p;
        auto it = out.find({p, q});
        if (it == out.end()) {
            InvariantForm comp(form.degree());
            comp.add_term(key, c);
            out.emplace(std::make_pair(p, q), std::move(comp));
        } else {
            it->second.add_term(key, c);
        }
    }
    return out;
}

InvariantForm complex_to_real(const InvariantForm& phi_form, const DualCoframe& dc) {
    return substitute_slots(phi_form, dc.complex_from_real);
}

TorsionVector torsion_vector(const AlmostComplexStructure& acs) {
    const DualCoframe dc = dual_coframe(acs);
    const ManifoldModel model = acs.model();
    const int m = acs.n + 1;

    InvariantForm omega = dc.phi[0];
    for (int j = 1; j < m; ++j) omega = wedge(omega, dc.phi[j]);

    const InvariantForm d_omega = exterior_d(omega, model);
    const Bidegrees parts = bidegree_split(d_omega, acs);

    TorsionVector tv;
    tv.C.assign(static_cast<size_t>(m), ExactScalar());
    auto it = parts.find({m, 1});
    if (it == parts.end()) return tv;

    // (n+1,1) keys necessarily contain every unbarred slot 0..n plus one
    // barred slot m+j; conj(phi^{j+1}) ^ omega = (-1)^{n+1} * that monomial.
    const bool flip = (m % 2 == 1);  // (-1)^{n+1} with m = n+1
    for (int j = 0; j < m; ++j) {
        std::vector<int> key(static_cast<size_t>(m));
        for (int k = 0; k < m; ++k) key[static_cast<size_t>(k)] = k;
        key.push_back(m + j);
        ExactScalar c = it->second.coefficient(key);
        if (flip) c = -c;
        tv.C[static_cast<size_t>(j)] = c;
    }
    return tv;
}

}  // namespace ktlab
