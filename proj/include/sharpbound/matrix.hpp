#pragma once

#include <cstddef>
#include <vector>

namespace sharpbound {

// Dense row-major matrix of doubles. Sized for desk-scale problems
// (parameter dimension of a few hundred at most), so everything is
// explicit and value-semantic.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix transpose(const Matrix& a);
Matrix multiply(const Matrix& a, const Matrix& b);

double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);
// max |a_ij - a_ji| over all pairs; 0 for an exactly symmetric matrix.
double symmetry_gap(const Matrix& a);

// Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.
// Sweeps run until the off-diagonal Frobenius norm drops below
// 1e-12 * ||A||_F. Eigenvalues are returned in descending order; when
// requested, column d of `vectors` is the eigenvector for `values[d]`.
struct EigenSystem {
    std::vector<double> values;
    Matrix vectors;
    int sweeps = 0;
};

EigenSystem jacobi_eigensystem(Matrix a, bool want_vectors = true);
std::vector<double> jacobi_eigenvalues(Matrix a);

}  // namespace sharpbound
