#include "pisa/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pisa {

namespace {
int g_threads = 1;

void check_mul_shapes(std::size_t inner_a, std::size_t inner_b, const Matrix& a, const Matrix& b) {
    if (inner_a != inner_b) {
        throw ShapeError("matmul: incompatible shapes " + shape_str(a) + " x " + shape_str(b));
    }
}
} // namespace

std::string shape_str(const Matrix& m) {
    std::ostringstream os;
    os << m.rows << "x" << m.cols;
    return os.str();
}

Matrix randn(std::size_t rows, std::size_t cols, Rng& rng, double stddev) {
    Matrix m(rows, cols);
    for (double& x : m.data) x = rng.normal() * stddev;
    return m;
}

bool all_finite(const Matrix& m) {
    for (double x : m.data) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

void require_finite(const Matrix& m, const std::string& name) {
    if (!all_finite(m)) {
        throw NumericError("non-finite values in " + name);
    }
}

void set_threads(int n) {
    g_threads = n < 1 ? 1 : n;
#ifdef _OPENMP
    omp_set_num_threads(g_threads);
#endif
}

int threads() { return g_threads; }

namespace serial {

Matrix matmul(const Matrix& a, const Matrix& b) {
    check_mul_shapes(a.cols, b.rows, a, b);
    Matrix out(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = a.data[i * a.cols + k];
            const double* brow = &b.data[k * b.cols];
            double* orow = &out.data[i * out.cols];
            for (std::size_t j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
        }
    }
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    check_mul_shapes(a.rows, b.rows, a, b);
    Matrix out(a.cols, b.cols);
    for (std::size_t i = 0; i < a.cols; ++i) {
        for (std::size_t k = 0; k < a.rows; ++k) {
            const double aki = a.data[k * a.cols + i];
            const double* brow = &b.data[k * b.cols];
            double* orow = &out.data[i * out.cols];
            for (std::size_t j = 0; j < b.cols; ++j) orow[j] += aki * brow[j];
        }
    }
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    check_mul_shapes(a.cols, b.cols, a, b);
    Matrix out(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* arow = &a.data[i * a.cols];
        for (std::size_t j = 0; j < b.rows; ++j) {
            const double* brow = &b.data[j * b.cols];
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) s += arow[k] * brow[k];
            out.data[i * out.cols + j] = s;
        }
    }
    return out;
}

} // namespace serial

// Each output row is produced by exactly one thread with the same inner
// accumulation order as the serial kernel, so results match bitwise.

Matrix matmul(const Matrix& a, const Matrix& b) {
    check_mul_shapes(a.cols, b.rows, a, b);
    Matrix out(a.rows, b.cols);
    const long n = static_cast<long>(a.rows);
#pragma omp parallel for schedule(static) if (g_threads > 1 && n > 1)
    for (long i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = a.data[static_cast<std::size_t>(i) * a.cols + k];
            const double* brow = &b.data[k * b.cols];
            double* orow = &out.data[static_cast<std::size_t>(i) * out.cols];
            for (std::size_t j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
        }
    }
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    check_mul_shapes(a.rows, b.rows, a, b);
    Matrix out(a.cols, b.cols);
    const long n = static_cast<long>(a.cols);
#pragma omp parallel for schedule(static) if (g_threads > 1 && n > 1)
    for (long i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < a.rows; ++k) {
            const double aki = a.data[k * a.cols + static_cast<std::size_t>(i)];
            const double* brow = &b.data[k * b.cols];
            double* orow = &out.data[static_cast<std::size_t>(i) * out.cols];
            for (std::size_t j = 0; j < b.cols; ++j) orow[j] += aki * brow[j];
        }
    }
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    check_mul_shapes(a.cols, b.cols, a, b);
    Matrix out(a.rows, b.rows);
    const long n = static_cast<long>(a.rows);
#pragma omp parallel for schedule(static) if (g_threads > 1 && n > 1)
    for (long i = 0; i < n; ++i) {
        const double* arow = &a.data[static_cast<std::size_t>(i) * a.cols];
        for (std::size_t j = 0; j < b.rows; ++j) {
            const double* brow = &b.data[j * b.cols];
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) s += arow[k] * brow[k];
            out.data[static_cast<std::size_t>(i) * out.cols + j] = s;
        }
    }
    return out;
}

void adam_step(Matrix& param, const Matrix& grad, AdamState& state) {
    if (!param.same_shape(grad) || !param.same_shape(state.m)) {
        throw ShapeError("adam_step: shape mismatch param " + shape_str(param) + " vs grad " +
                         shape_str(grad) + " vs state " + shape_str(state.m));
    }
    if (state.lr <= 0.0) {
        throw UsageError("adam_step: learning rate must be > 0");
    }
    require_finite(grad, "gradient for parameter " + shape_str(param));

    state.step += 1;
    const double b1 = state.beta1;
    const double b2 = state.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < param.data.size(); ++i) {
        const double g = grad.data[i];
        state.m.data[i] = b1 * state.m.data[i] + (1.0 - b1) * g;
        state.v.data[i] = b2 * state.v.data[i] + (1.0 - b2) * g * g;
        const double mhat = state.m.data[i] / bc1;
        const double vhat = state.v.data[i] / bc2;
        param.data[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
}

GradCheckReport finite_diff_check(const std::function<double()>& loss_fn,
                                  const std::vector<Matrix*>& params,
                                  const std::vector<const Matrix*>& analytic_grads,
                                  double step, double tolerance) {
    if (step <= 0.0) throw UsageError("finite_diff_check: step must be > 0");
    if (params.size() != analytic_grads.size()) {
        throw UsageError("finite_diff_check: params/grads count mismatch");
    }

    GradCheckReport report;
    double sum_rel = 0.0;
    for (std::size_t p = 0; p < params.size(); ++p) {
        Matrix& param = *params[p];
        const Matrix& ana = *analytic_grads[p];
        if (!param.same_shape(ana)) {
            throw ShapeError("finite_diff_check: grad shape " + shape_str(ana) +
                             " does not match param " + shape_str(param));
        }
        for (std::size_t i = 0; i < param.data.size(); ++i) {
            const double saved = param.data[i];
            param.data[i] = saved + step;
            const double up = loss_fn();
            param.data[i] = saved - step;
            const double down = loss_fn();
            param.data[i] = saved;
            if (!std::isfinite(up) || !std::isfinite(down)) {
                throw NumericError("finite_diff_check: non-finite loss at probe point");
            }
            const double numeric = (up - down) / (2.0 * step);
            const double a = ana.data[i];
            const double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-8});
            const double rel = std::fabs(a - numeric) / denom;
            report.max_rel_err = std::max(report.max_rel_err, rel);
            sum_rel += rel;
            report.checked += 1;
        }
    }
    report.mean_rel_err = report.checked ? sum_rel / static_cast<double>(report.checked) : 0.0;
    report.pass = report.max_rel_err < tolerance;
    return report;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

} // namespace pisa
