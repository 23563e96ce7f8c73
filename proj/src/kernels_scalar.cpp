// Reference kernels. Every SIMD variant is equivalence-tested against these.

#include <algorithm>
#include <cmath>

#include "veritab/kernels.hpp"

namespace veritab::kernels {
namespace {

void matmul_scalar(const double* a, const double* b, double* c, int m, int k, int n) {
    std::fill(c, c + static_cast<size_t>(m) * n, 0.0);
    for (int i = 0; i < m; ++i) {
        const double* arow = a + static_cast<size_t>(i) * k;
        double* crow = c + static_cast<size_t>(i) * n;
        for (int kk = 0; kk < k; ++kk) {
            const double av = arow[kk];
            const double* brow = b + static_cast<size_t>(kk) * n;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void matmul_transb_scalar(const double* a, const double* b, double* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const double* arow = a + static_cast<size_t>(i) * k;
        double* crow = c + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const double* brow = b + static_cast<size_t>(j) * k;
            double acc = 0.0;
            for (int kk = 0; kk < k; ++kk) acc += arow[kk] * brow[kk];
            crow[j] = acc;
        }
    }
}

double dot_scalar(const double* x, const double* y, int n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, int n) {
    for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void add_scalar(const double* x, const double* y, double* out, int n) {
    for (int i = 0; i < n; ++i) out[i] = x[i] + y[i];
}

void mul_scalar(const double* x, const double* y, double* out, int n) {
    for (int i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

void scale_scalar(const double* x, double alpha, double* out, int n) {
    for (int i = 0; i < n; ++i) out[i] = x[i] * alpha;
}

void add_bias_rows_scalar(double* x, const double* bias, int rows, int cols) {
    for (int i = 0; i < rows; ++i) {
        double* row = x + static_cast<size_t>(i) * cols;
        for (int j = 0; j < cols; ++j) row[j] += bias[j];
    }
}

void relu_scalar(const double* x, double* out, int n) {
    for (int i = 0; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward_scalar(const double* x, const double* g, double* gx, int n) {
    for (int i = 0; i < n; ++i)
        if (x[i] > 0.0) gx[i] += g[i];
}

double reduce_sum_scalar(const double* x, int n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double reduce_max_scalar(const double* x, int n) {
    double best = x[0];
    for (int i = 1; i < n; ++i) best = std::max(best, x[i]);
    return best;
}

void adam_update_scalar(double* value, const double* grad, double* m, double* v, int n,
                        double lr, double beta1, double beta2, double eps,
                        double bc1, double bc2) {
    for (int i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        value[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

}  // namespace

const Table scalar_table = {
    matmul_scalar,     matmul_transb_scalar, dot_scalar,
    axpy_scalar,       add_scalar,           mul_scalar,
    scale_scalar,      add_bias_rows_scalar, relu_scalar,
    relu_backward_scalar, reduce_sum_scalar, reduce_max_scalar,
    adam_update_scalar,
};

}  // namespace veritab::kernels
