#pragma once

#include "hplab/error.hpp"
#include "hplab/scalar.hpp"

#include <cstddef>
#include <vector>

namespace hplab {

/// Row-major dense matrix.
template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols, const T& fill) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    T& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
    const T& operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<T> a_;
};

template <class T>
struct Nullspace {
    std::vector<std::vector<T>> basis;
    int rank = 0;
    /// Float path only: max |M x| over the basis and the precision that achieved it.
    double residual = 0.0;
    int precision_bits = 0;
};

/// Exact nullspace via fraction-free elimination. Rows are scaled to integer
/// (resp. Z[sqrt d]) entries, eliminated with exact divisions, then the
/// echelon form is back-substituted in the field.
Nullspace<Rational> exact_nullspace(const Matrix<Rational>& m);
Nullspace<QF> exact_nullspace(const Matrix<QF>& m);

/// Householder QR with column pivoting. Columns whose remaining norm drops
/// below tol times the largest column norm are treated as dependent.
Nullspace<BigComplex> float_nullspace(const Matrix<BigComplex>& m, double tol_log2);

/// M x for a candidate vector, in the matrix's own arithmetic.
template <class T>
std::vector<T> apply(const Matrix<T>& m, const std::vector<T>& x)
{
    if (static_cast<int>(x.size()) != m.cols()) throw DomainError("dimension mismatch in matrix-vector product");
    std::vector<T> out;
    out.reserve(static_cast<std::size_t>(m.rows()));
    for (int r = 0; r < m.rows(); ++r) {
        T acc = zero_like(x.at(0));
        for (int c = 0; c < m.cols(); ++c)
            if (!is_zero(m(r, c))) acc += m(r, c) * x[static_cast<std::size_t>(c)];
        out.push_back(std::move(acc));
    }
    return out;
}

}  // namespace hplab
