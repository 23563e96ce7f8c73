// AVX2+FMA kernel variants. This translation unit is the only one compiled
// with -mavx2 -mfma; callers reach it through the runtime dispatch table.

#include "veritab/kernels.hpp"

#if defined(VERITAB_HAVE_AVX2)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace veritab::kernels {
namespace {

inline double hsum256(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

void matmul_avx2(const double* a, const double* b, double* c, int m, int k, int n) {
    std::fill(c, c + static_cast<size_t>(m) * n, 0.0);
    const int n4 = n & ~3;
    for (int i = 0; i < m; ++i) {
        const double* arow = a + static_cast<size_t>(i) * k;
        double* crow = c + static_cast<size_t>(i) * n;
        for (int kk = 0; kk < k; ++kk) {
            const __m256d av = _mm256_set1_pd(arow[kk]);
            const double* brow = b + static_cast<size_t>(kk) * n;
            int j = 0;
            for (; j < n4; j += 4) {
                __m256d cv = _mm256_loadu_pd(crow + j);
                cv = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + j), cv);
                _mm256_storeu_pd(crow + j, cv);
            }
            for (; j < n; ++j) crow[j] += arow[kk] * brow[j];
        }
    }
}

double dot_avx2(const double* x, const double* y, int n) {
    const int n4 = n & ~3;
    __m256d acc = _mm256_setzero_pd();
    int i = 0;
    for (; i < n4; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    double out = hsum256(acc);
    for (; i < n; ++i) out += x[i] * y[i];
    return out;
}

void matmul_transb_avx2(const double* a, const double* b, double* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const double* arow = a + static_cast<size_t>(i) * k;
        double* crow = c + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j)
            crow[j] = dot_avx2(arow, b + static_cast<size_t>(j) * k, k);
    }
}

void axpy_avx2(double alpha, const double* x, double* y, int n) {
    const __m256d av = _mm256_set1_pd(alpha);
    const int n4 = n & ~3;
    int i = 0;
    for (; i < n4; i += 4) {
        __m256d yv = _mm256_loadu_pd(y + i);
        yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yv);
        _mm256_storeu_pd(y + i, yv);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void add_avx2(const double* x, const double* y, double* out, int n) {
    const int n4 = n & ~3;
    int i = 0;
    for (; i < n4; i += 4)
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) out[i] = x[i] + y[i];
}

void mul_avx2(const double* x, const double* y, double* out, int n) {
    const int n4 = n & ~3;
    int i = 0;
    for (; i < n4; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) out[i] = x[i] * y[i];
}

void scale_avx2(const double* x, double alpha, double* out, int n) {
    const __m256d av = _mm256_set1_pd(alpha);
    const int n4 = n & ~3;
    int i = 0;
    for (; i < n4; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), av));
    for (; i < n; ++i) out[i] = x[i] * alpha;
}

void add_bias_rows_avx2(double* x, const double* bias, int rows, int cols) {
    const int n4 = cols & ~3;
    for (int r = 0; r < rows; ++r) {
        double* row = x + static_cast<size_t>(r) * cols;
        int j = 0;
        for (; j < n4; j += 4)
            _mm256_storeu_pd(row + j, _mm256_add_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(bias + j)));
        for (; j < cols; ++j) row[j] += bias[j];
    }
}

void relu_avx2(const double* x, double* out, int n) {
    const __m256d zero = _mm256_setzero_pd();
    const int n4 = n & ~3;
    int i = 0;
    for (; i < n4; i += 4)
        _mm256_storeu_pd(out + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
    for (; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward_avx2(const double* x, const double* g, double* gx, int n) {
    const __m256d zero = _mm256_setzero_pd();
    const int n4 = n & ~3;
    int i = 0;
    for (; i < n4; i += 4) {
        const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(x + i), zero, _CMP_GT_OQ);
        const __m256d gv = _mm256_and_pd(_mm256_loadu_pd(g + i), mask);
        _mm256_storeu_pd(gx + i, _mm256_add_pd(_mm256_loadu_pd(gx + i), gv));
    }
    for (; i < n; ++i)
        if (x[i] > 0.0) gx[i] += g[i];
}

double reduce_sum_avx2(const double* x, int n) {
    const int n4 = n & ~3;
    __m256d acc = _mm256_setzero_pd();
    int i = 0;
    for (; i < n4; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double out = hsum256(acc);
    for (; i < n; ++i) out += x[i];
    return out;
}

double reduce_max_avx2(const double* x, int n) {
    if (n < 8) {
        double best = x[0];
        for (int i = 1; i < n; ++i) best = std::max(best, x[i]);
        return best;
    }
    __m256d acc = _mm256_loadu_pd(x);
    const int n4 = n & ~3;
    int i = 4;
    for (; i < n4; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    lo = _mm_max_pd(lo, hi);
    double best = std::max(_mm_cvtsd_f64(lo), _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) best = std::max(best, x[i]);
    return best;
}

void adam_update_avx2(double* value, const double* grad, double* m, double* v, int n,
                      double lr, double beta1, double beta2, double eps,
                      double bc1, double bc2) {
    const __m256d b1 = _mm256_set1_pd(beta1);
    const __m256d b2 = _mm256_set1_pd(beta2);
    const __m256d one_m_b1 = _mm256_set1_pd(1.0 - beta1);
    const __m256d one_m_b2 = _mm256_set1_pd(1.0 - beta2);
    const __m256d inv_bc1 = _mm256_set1_pd(1.0 / bc1);
    const __m256d inv_bc2 = _mm256_set1_pd(1.0 / bc2);
    const __m256d lrv = _mm256_set1_pd(lr);
    const __m256d epsv = _mm256_set1_pd(eps);
    const int n4 = n & ~3;
    int i = 0;
    for (; i < n4; i += 4) {
        const __m256d g = _mm256_loadu_pd(grad + i);
        __m256d mv = _mm256_loadu_pd(m + i);
        __m256d vv = _mm256_loadu_pd(v + i);
        mv = _mm256_fmadd_pd(b1, mv, _mm256_mul_pd(one_m_b1, g));
        vv = _mm256_fmadd_pd(b2, vv, _mm256_mul_pd(one_m_b2, _mm256_mul_pd(g, g)));
        _mm256_storeu_pd(m + i, mv);
        _mm256_storeu_pd(v + i, vv);
        const __m256d mhat = _mm256_mul_pd(mv, inv_bc1);
        const __m256d vhat = _mm256_mul_pd(vv, inv_bc2);
        const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), epsv);
        const __m256d step = _mm256_div_pd(_mm256_mul_pd(lrv, mhat), denom);
        _mm256_storeu_pd(value + i, _mm256_sub_pd(_mm256_loadu_pd(value + i), step));
    }
    for (; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
        value[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
    }
}

const Table avx2_impl = {
    matmul_avx2,     matmul_transb_avx2, dot_avx2,
    axpy_avx2,       add_avx2,           mul_avx2,
    scale_avx2,      add_bias_rows_avx2, relu_avx2,
    relu_backward_avx2, reduce_sum_avx2, reduce_max_avx2,
    adam_update_avx2,
};

}  // namespace

const Table* avx2_table() { return &avx2_impl; }

}  // namespace veritab::kernels

#else

namespace veritab::kernels {
const Table* avx2_table() { return nullptr; }
}  // namespace veritab::kernels

#endif
