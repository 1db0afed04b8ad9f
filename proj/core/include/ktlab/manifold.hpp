#pragma once

/**
 * @file manifold.hpp
 * @brief Left-invariant exterior calculus on the nilmanifolds KT^{2n+2}.
 *
 * The model has real dimension 2n+2 with global invariant frame
 *
 *     nu_1..nu_n      = d/dx_1 .. d/dx_n
 *     nu_{n+1}..nu_2n = Y_j = d/dy_j + x_j d/dz
 *     nu_{2n+1}       = d/dz
 *     nu_{2n+2}       = d/dt
 *
 * and dual invariant coframe, ordered (e^1..e^{n+1}, f^1..f^{n+1}):
 *
 *     e^j = dx_j (j <= n),   e^{n+1} = dz - sum_j x_j dy_j,
 *     f^j = dy_j (j <= n),   f^{n+1} = dt.
 *
 * The only nonzero structure equation is
 *
 *     d e^{n+1} = -(e^1 ^ f^1 + ... + e^n ^ f^n),
 *
 * every other coframe generator is closed.  Invariant forms are stored
 * sparsely as maps from strictly increasing coframe index tuples to exact
 * scalars; antisymmetry is canonicalized by sorting with permutation parity.
 *
 * Index conventions (0-based slots used throughout the code):
 *   coframe slot c in [0,n]       <-> e^{c+1}
 *   coframe slot c in [n+1,2n+1]  <-> f^{c-n}
 *   frame slot   i in [0,n-1]     <-> d/dx_{i+1}
 *   frame slot   i in [n,2n-1]    <-> Y_{i-n+1}
 *   frame slot   2n = d/dz,  2n+1 = d/dt.
 */

#include <map>
#include <string>
#include <vector>

#include "ktlab/scalar.hpp"

namespace ktlab {

/// The manifold KT^{2n+2} with its fixed invariant frame and coframe.
struct ManifoldModel {
    int n{1};

    explicit ManifoldModel(int n_) : n(n_) {
        if (n_ < 1) throw std::invalid_argument("ManifoldModel: n must be positive");
    }

    [[nodiscard]] int dim() const { return 2 * n + 2; }

    /// Frame slot dual to a coframe slot (theta^c (nu_i) = delta).
    [[nodiscard]] int frame_of_coframe(int c) const {
        if (c < n) return c;             // e^{c+1} = dx_{c+1}  <->  d/dx_{c+1}
        if (c == n) return 2 * n;        // e^{n+1}             <->  d/dz
        if (c <= 2 * n) return c - 1;    // f^{c-n} = dy_{c-n}  <->  Y_{c-n}
        return 2 * n + 1;                // f^{n+1} = dt        <->  d/dt
    }

    /// Inverse of frame_of_coframe.
    [[nodiscard]] int coframe_of_frame(int i) const {
        if (i < n) return i;
        if (i < 2 * n) return i + 1;
        if (i == 2 * n) return n;
        return 2 * n + 1;
    }

    [[nodiscard]] std::string coframe_label(int c) const {
        return c <= n ? "e^" + std::to_string(c + 1) : "f^" + std::to_string(c - n);
    }

    [[nodiscard]] std::string frame_label(int i) const {
        if (i < n) return "dx_" + std::to_string(i + 1);
        if (i < 2 * n) return "Y_" + std::to_string(i - n + 1);
        return i == 2 * n ? "dz" : "dt";
    }
};

/**
 * @brief Invariant differential form with exact coefficients.
 *
 * Keys are strictly increasing tuples of coframe (or (1,0)/(0,1)-coframe)
 * slots; the empty tuple is the 0-form slot.  Zero coefficients are pruned,
 * so is_zero and operator== are structural.
 */
class InvariantForm {
public:
    InvariantForm() = default;
    explicit InvariantForm(int degree) : degree_(degree) {}

    /// Degree-1 generator theta^index.
    [[nodiscard]] static InvariantForm generator(int index);
    /// Degree-0 constant.
    [[nodiscard]] static InvariantForm constant(const ExactScalar& c);

    [[nodiscard]] int degree() const { return degree_; }
    [[nodiscard]] bool is_zero() const { return coeff_.empty(); }
    [[nodiscard]] const std::map<std::vector<int>, ExactScalar>& terms() const { return coeff_; }

    /// Coefficient of a (sorted) key; zero when absent.
    [[nodiscard]] ExactScalar coefficient(const std::vector<int>& key) const;

    /// Add c * theta^{idx} where idx may be unsorted: the term is sorted with
    /// permutation parity and dropped when an index repeats.
    void add_term(std::vector<int> idx, ExactScalar c);

    InvariantForm operator+(const InvariantForm& o) const;
    InvariantForm operator-(const InvariantForm& o) const;
    InvariantForm operator-() const;
    InvariantForm operator*(const ExactScalar& c) const;
    bool operator==(const InvariantForm& o) const { return (*this - o).is_zero(); }
    bool operator!=(const InvariantForm& o) const { return !(*this == o); }

    [[nodiscard]] std::string to_string() const;

private:
    int degree_{0};
    std::map<std::vector<int>, ExactScalar> coeff_;
};

/// Exterior product (graded-commutative, associative).
[[nodiscard]] InvariantForm wedge(const InvariantForm& a, const InvariantForm& b);

/// Invariant exterior derivative: zero on every coframe generator except
/// d e^{n+1} = -sum_j e^j ^ f^j; extended by linearity and Leibniz.
[[nodiscard]] InvariantForm exterior_d(const InvariantForm& form, const ManifoldModel& model);

/// Pair an invariant 1-form (coframe coordinates) with a frame vector given in
/// nu-coordinates.
[[nodiscard]] ExactScalar pair_one_form(const InvariantForm& omega, const std::vector<ExactScalar>& v,
                                        const ManifoldModel& model);

}  // namespace ktlab
