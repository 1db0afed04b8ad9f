#include "ktlab/linalg.hpp"

#include <stdexcept>
#include <utility>

namespace ktlab {

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = ExactScalar(1);
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::conj() const {
    Matrix t(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(i, j) = (*this)(i, j).conj();
    return t;
}

Matrix Matrix::operator*(const Matrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("Matrix::operator*: shape mismatch");
    Matrix out(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const ExactScalar& aik = (*this)(i, k);
            if (aik.is_zero()) continue;
            for (int j = 0; j < o.cols_; ++j) out(i, j) = out(i, j) + aik * o(k, j);
        }
    return out;
}

Vec Matrix::operator*(const Vec& v) const {
    if (cols_ != static_cast<int>(v.size()))
        throw std::invalid_argument("Matrix::operator*: vector length mismatch");
    Vec out(rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) out[i] = out[i] + (*this)(i, j) * v[j];
    return out;
}

Matrix Matrix::with_column(int j, const Vec& b) const {
    if (static_cast<int>(b.size()) != rows_)
        throw std::invalid_argument("Matrix::with_column: length mismatch");
    Matrix out = *this;
    for (int i = 0; i < rows_; ++i) out(i, j) = b[i];
    return out;
}

void Matrix::swap_rows(int i, int k) {
    for (int j = 0; j < cols_; ++j) std::swap((*this)(i, j), (*this)(k, j));
}

EchelonResult bareiss_echelon(Matrix a) {
    EchelonResult res;
    const int rows = a.rows();
    const int cols = a.cols();
    int r = 0;
    ExactScalar prev(1);
    for (int c = 0; c < cols && r < rows; ++c) {
        int p = -1;
        for (int i = r; i < rows; ++i) {
            if (a(i, c).is_zero()) continue;
            if (p < 0) p = i;
            if (a(i, c).is_monomial()) {
                p = i;
                break;
            }
        }
        if (p < 0) continue;
        if (p != r) {
            a.swap_rows(p, r);
            res.sign = -res.sign;
        }
        for (int i = r + 1; i < rows; ++i) {
            for (int j = c + 1; j < cols; ++j) {
                a(i, j) = (a(r, c) * a(i, j) - a(i, c) * a(r, j)) / prev;
            }
            a(i, c) = ExactScalar();
        }
        prev = a(r, c);
        res.pivot_cols.push_back(c);
        ++r;
    }
    res.rank = r;
    res.last_pivot = r > 0 ? prev : ExactScalar(1);
    res.mat = std::move(a);
    return res;
}

ExactScalar det(const Matrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("det: matrix not square");
    if (a.rows() == 0) return ExactScalar(1);
    const EchelonResult e = bareiss_echelon(a);
    if (e.rank < a.rows()) return ExactScalar();
    return e.sign < 0 ? -e.last_pivot : e.last_pivot;
}

int rank(const Matrix& a) { return bareiss_echelon(a).rank; }

std::vector<Vec> kernel_basis(const Matrix& a) {
    const int m = a.rows();
    const int n = a.cols();
    // Reduce [A^T | I_n]; rows whose A^T-part becomes zero span the left null
    // space of A^T, i.e. the right kernel of A.  Restrict pivot search to the
    // first m columns so identity-part columns never become pivots.
    Matrix b(n, m + n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) b(i, j) = a(j, i);
        b(i, m + i) = ExactScalar(1);
    }
    int r = 0;
    ExactScalar prev(1);
    for (int c = 0; c < m && r < n; ++c) {
        int p = -1;
        for (int i = r; i < n; ++i) {
            if (b(i, c).is_zero()) continue;
            if (p < 0) p = i;
            if (b(i, c).is_monomial()) {
                p = i;
                break;
            }
        }
        if (p < 0) continue;
        if (p != r) b.swap_rows(p, r);
        for (int i = r + 1; i < n; ++i) {
            for (int j = c + 1; j < m + n; ++j) {
                b(i, j) = (b(r, c) * b(i, j) - b(i, c) * b(r, j)) / prev;
            }
            b(i, c) = ExactScalar();
        }
        prev = b(r, c);
        ++r;
    }
    std::vector<Vec> basis;
    for (int i = r; i < n; ++i) {
        Vec v(n);
        for (int j = 0; j < n; ++j) v[j] = b(i, m + j);
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<Matrix> try_inverse(const Matrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("try_inverse: matrix not square");
    const int n = a.rows();
    const ExactScalar d = det(a);
    if (d.is_zero()) return std::nullopt;
    Matrix inv(n, n);
    // Adjugate entry (j,i) = (-1)^{i+j} * minor(i,j); each entry of the
    // inverse must be exactly divisible by the determinant.
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Matrix minor(n - 1, n - 1);
            for (int r = 0, rr = 0; r < n; ++r) {
                if (r == i) continue;
                for (int c = 0, cc = 0; c < n; ++c) {
                    if (c == j) continue;
                    minor(rr, cc) = a(r, c);
                    ++cc;
                }
                ++rr;
            }
            ExactScalar cof = det(minor);
            if ((i + j) % 2 == 1) cof = -cof;
            auto q = cof.try_divide(d);
            if (!q) return std::nullopt;
            inv(j, i) = *q;
        }
    }
    return inv;
}

}  // namespace ktlab
