#pragma once

#include <string>

namespace veritab::kernels {

// Flat-array numeric kernels behind every tape operation. Each entry has a
// scalar reference implementation and, on x86-64 builds, an AVX2+FMA variant;
// the active table is picked once at startup from CPUID and can be forced via
// the VERITAB_KERNELS env var ("scalar" | "avx2") or force_backend().
//
// Backends agree to rounding error, not bitwise: vector variants change the
// floating-point summation order. Equivalence is tested to 1e-10 relative.
struct Table {
    // c = a (m x k) * b (k x n), all row-major; c is overwritten.
    void (*matmul)(const double* a, const double* b, double* c, int m, int k, int n);
    // c = a (m x k) * b^T (n x k): rows of b are dotted against rows of a.
    void (*matmul_transb)(const double* a, const double* b, double* c, int m, int k, int n);
    double (*dot)(const double* x, const double* y, int n);
    void (*axpy)(double alpha, const double* x, double* y, int n);  // y += alpha*x
    void (*add)(const double* x, const double* y, double* out, int n);
    void (*mul)(const double* x, const double* y, double* out, int n);
    void (*scale)(const double* x, double alpha, double* out, int n);
    void (*add_bias_rows)(double* x, const double* bias, int rows, int cols);
    void (*relu)(const double* x, double* out, int n);
    // gx += g where x > 0
    void (*relu_backward)(const double* x, const double* g, double* gx, int n);
    double (*reduce_sum)(const double* x, int n);
    double (*reduce_max)(const double* x, int n);  // n >= 1
    // Adam with bias correction folded into bc1 = 1-beta1^t, bc2 = 1-beta2^t.
    void (*adam_update)(double* value, const double* grad, double* m, double* v, int n,
                        double lr, double beta1, double beta2, double eps,
                        double bc1, double bc2);
};

enum class Backend { kScalar, kAvx2 };

extern const Table scalar_table;

const Table& active();
Backend active_backend();
std::string backend_name(Backend b);

// Throws ConfigError if the backend is not available on this build/CPU.
void force_backend(Backend b);

bool avx2_available();
const Table* avx2_table();  // nullptr when not compiled in

}  // namespace veritab::kernels
