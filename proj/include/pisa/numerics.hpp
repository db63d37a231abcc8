#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "pisa/common.hpp"

namespace pisa {

// Dense row-major matrix of doubles. Vectors are n x 1 (or 1 x n) matrices so
// every trainable parameter shares one type and one optimizer path.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::size_t size() const { return data.size(); }
    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

std::string shape_str(const Matrix& m);

// Gaussian init, scaled by `stddev`.
Matrix randn(std::size_t rows, std::size_t cols, Rng& rng, double stddev = 1.0);

bool all_finite(const Matrix& m);
void require_finite(const Matrix& m, const std::string& name);

// Number of OpenMP threads used by the parallel kernels. Defaults to 1;
// results are identical for any setting (each output row is owned by one
// thread and accumulated in index order).
void set_threads(int n);
int threads();

// Serial reference kernels. Kept as the oracle the parallel kernels are
// tested (and benchmarked) against.
namespace serial {
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_tn(const Matrix& a, const Matrix& b); // a^T * b
Matrix matmul_nt(const Matrix& a, const Matrix& b); // a * b^T
} // namespace serial

// OpenMP kernels, parallel over output rows.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_tn(const Matrix& a, const Matrix& b);
Matrix matmul_nt(const Matrix& a, const Matrix& b);

// Adam optimizer state for one parameter. Step counter starts at 0 and is
// incremented before each bias-corrected update.
struct AdamState {
    Matrix m;
    Matrix v;
    long step = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    AdamState() = default;
    AdamState(std::size_t rows, std::size_t cols, double lr_) : m(rows, cols), v(rows, cols), lr(lr_) {}
};

void adam_step(Matrix& param, const Matrix& grad, AdamState& state);

// Central-difference gradient check. `loss_fn` evaluates the loss at the
// current values of `params`; coordinates are perturbed in place and
// restored. Relative error per coordinate uses max(|analytic|, |numeric|,
// 1e-8) as denominator.
struct GradCheckReport {
    double max_rel_err = 0.0;
    double mean_rel_err = 0.0;
    std::size_t checked = 0;
    bool pass = false;
};

GradCheckReport finite_diff_check(const std::function<double()>& loss_fn,
                                  const std::vector<Matrix*>& params,
                                  const std::vector<const Matrix*>& analytic_grads,
                                  double step, double tolerance);

// Small dense-vector helpers shared by the model code.
double dot(const std::vector<double>& a, const std::vector<double>& b);
void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y);

} // namespace pisa
