#pragma once

/**
 * @file linalg.hpp
 * @brief Exact dense linear algebra over the scalar ring.
 *
 * All elimination is fraction-free (Bareiss): the one-step update
 *
 *     a[i][j] <- (a[r][c]*a[i][j] - a[i][c]*a[r][j]) / previous_pivot
 *
 * divides exactly in any integral domain by the Sylvester determinant
 * identity, so no solver step ever needs an inverse that might leave the
 * ring.  Pivots are chosen by row swap only; monomial pivots (ring units)
 * are preferred to keep intermediate entries small.
 *
 * The right kernel is computed by fraction-free reduction of [A^T | I]:
 * rows whose A^T-part vanishes carry exact ring-valued kernel vectors of A
 * in their identity-part tail.
 */

#include <optional>
#include <vector>

#include "ktlab/scalar.hpp"

namespace ktlab {

using Vec = std::vector<ExactScalar>;

/// Dense matrix of exact scalars, row-major.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}

    [[nodiscard]] static Matrix identity(int n);

    [[nodiscard]] int rows() const { return rows_; }
    [[nodiscard]] int cols() const { return cols_; }

    ExactScalar& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    const ExactScalar& operator()(int i, int j) const {
        return a_[static_cast<size_t>(i) * cols_ + j];
    }

    [[nodiscard]] Matrix transpose() const;
    /// Entry-wise complex conjugation.
    [[nodiscard]] Matrix conj() const;
    [[nodiscard]] Matrix operator*(const Matrix& o) const;
    [[nodiscard]] Vec operator*(const Vec& v) const;

    /// Copy with column j replaced by b (for Cramer determinants).
    [[nodiscard]] Matrix with_column(int j, const Vec& b) const;

    void swap_rows(int i, int k);

private:
    int rows_{0};
    int cols_{0};
    std::vector<ExactScalar> a_;
};

/// Fraction-free row echelon form.
struct EchelonResult {
    Matrix mat;                   ///< reduced matrix (entries are minors of the input)
    std::vector<int> pivot_cols;  ///< column of each pivot row, ascending
    int rank{0};
    int sign{1};                  ///< parity of row swaps performed
    ExactScalar last_pivot;       ///< det of the rank x rank pivot block (unsigned)
};

[[nodiscard]] EchelonResult bareiss_echelon(Matrix a);

/// Exact determinant of a square matrix.
[[nodiscard]] ExactScalar det(const Matrix& a);

[[nodiscard]] int rank(const Matrix& a);

/// Exact basis of the right kernel { v : A v = 0 }; vectors have ring entries
/// (multiples of minors, not normalized).  Size equals cols - rank.
[[nodiscard]] std::vector<Vec> kernel_basis(const Matrix& a);

/// Exact inverse via adjugate/determinant; std::nullopt when the matrix is
/// singular or some adjugate entry is not divisible by the determinant in the
/// ring (the inverse then has entries outside the ring).
[[nodiscard]] std::optional<Matrix> try_inverse(const Matrix& a);

}  // namespace ktlab
