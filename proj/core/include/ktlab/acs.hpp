#pragma once

/**
 * @file acs.hpp
 * @brief Left-invariant almost complex structures on KT^{2n+2}: dual (1,0)
 *        coframes, bidegree decomposition, and the torsion vector.
 *
 * An almost complex structure is given by a (2n+2) x (n+1) exact matrix A
 * defining the (1,0) frame V_j = sum_i A_{ij} nu_i; validity means
 * [A | conj A] has full rank, i.e. the V_j together with their conjugates
 * span the complexified tangent space.
 *
 * Complexified coframe slot convention (0-based, used for bidegree output):
 *   slot k in [0,n]        <-> phi^{k+1}        (type (1,0))
 *   slot k in [n+1,2n+1]   <-> conj phi^{k-n}   (type (0,1))
 *
 * No inverse is needed to *split* a real form into bidegrees: the real
 * coframe expands through the frame matrix itself (theta = Wp * Phi).  The
 * inverse (computed exactly via the adjugate) is needed only to express the
 * phi^j as real invariant forms; structures whose dual coframe would leave
 * the scalar ring are reported as unsupported.
 */

#include <map>
#include <utility>
#include <vector>

#include "ktlab/linalg.hpp"
#include "ktlab/manifold.hpp"
#include "ktlab/scalar.hpp"

namespace ktlab {

/// Left-invariant almost complex structure V_j = sum_i A_{ij} nu_i.
struct AlmostComplexStructure {
    int n{1};
    Matrix A;  ///< (2n+2) x (n+1), rows in frame (nu) order

    [[nodiscard]] ManifoldModel model() const { return ManifoldModel(n); }
};

/// Validate shape and the spanning invariant (rank of [A | conj A]).
[[nodiscard]] bool acs_spans(const AlmostComplexStructure& acs);

/// The dual complexified coframe of an almost complex structure.
struct DualCoframe {
    /// phi^1..phi^{n+1} as invariant 1-forms in real coframe coordinates.
    std::vector<InvariantForm> phi;
    /// P: Phi^k = sum_c P(k,c) theta^c; rows n+1.. are the conjugates.
    Matrix complex_from_real;
    /// Wp = P^{-1}: theta^c = sum_k Wp(c,k) Phi^k (the permuted frame matrix).
    Matrix real_from_complex;
};

/**
 * @brief Compute phi^1..phi^{n+1} with phi^j(V_k) = delta_jk, phi^j(conj V_k)=0.
 *
 * Throws std::invalid_argument when [A | conj A] is singular (not an almost
 * complex structure) and std::domain_error when the dual coframe exists but
 * its coefficients leave the scalar ring (unsupported input).
 */
[[nodiscard]] DualCoframe dual_coframe(const AlmostComplexStructure& acs);

/// Bidegree components of a form, keyed by (p,q); absent key means zero.
using Bidegrees = std::map<std::pair<int, int>, InvariantForm>;

/// Rewrite a real-coframe form in the phi/conj-phi basis and group by
/// bidegree.  Summing all components (converted back) returns the input.
[[nodiscard]] Bidegrees bidegree_split(const InvariantForm& form,
                                       const AlmostComplexStructure& acs);

/// Convert a complexified-coframe form back to real coframe coordinates.
[[nodiscard]] InvariantForm complex_to_real(const InvariantForm& phi_form, const DualCoframe& dc);

/// The torsion vector C: the (n+1,1) part of d(phi^{1..n+1}) equals
/// (sum_j C_j conj(phi^j)) ^ phi^{1..n+1}.
struct TorsionVector {
    std::vector<ExactScalar> C;  ///< length n+1
};

[[nodiscard]] TorsionVector torsion_vector(const AlmostComplexStructure& acs);

}  // namespace ktlab
