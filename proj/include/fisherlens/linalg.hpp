// Copyright 2026 The FisherLens Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fisherlens {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double> column(std::size_t c) const;
    void set_column(std::size_t c, std::span<const double> values);

    const std::vector<double>& data() const { return data_; }

    Matrix& operator*=(double s) {
        for (double& v : data_) v *= s;
        return *this;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix transpose(const Matrix& a);
Matrix multiply(const Matrix& a, const Matrix& b);
/// aᵀ · b without materializing the transpose.
Matrix multiply_at_b(const Matrix& a, const Matrix& b);

double frobenius_norm(const Matrix& a);
double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

/// Flips v so its first component with |v_i| > 1e-8 * max|v| is positive.
void canonicalize_sign(std::span<double> v);

/// Scales every column of a to unit Euclidean norm (zero columns untouched).
void normalize_columns(Matrix& a);

struct EigenResult {
    std::vector<double> values;  // descending
    Matrix vectors;              // column i pairs with values[i]
    int sweeps = 0;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Stops once every
/// off-diagonal magnitude is below 1e-12 * ||A||_F, or after 100 sweeps
/// (NumericalError). Throws ArgumentError when A is not symmetric to 1e-10.
EigenResult eigen_symmetric(const Matrix& a);

/// Lower-triangular L with A = L Lᵀ; NumericalError when A is not positive definite.
Matrix cholesky(const Matrix& a);

/// Solves L x = b for lower-triangular L.
std::vector<double> forward_substitute(const Matrix& l, std::span<const double> b);
/// Solves Lᵀ x = b for lower-triangular L.
std::vector<double> back_substitute_transposed(const Matrix& l, std::span<const double> b);

}  // namespace fisherlens
