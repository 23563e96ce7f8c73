// Scalar/AVX2 kernel equivalence. The scalar table is the reference; the
// vector variants must agree on every size, including non-multiple-of-4
// remainders, to tight relative tolerance (summation order may differ).

#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "veritab/kernels.hpp"
#include "veritab/rng.hpp"

using namespace veritab;

namespace {

std::vector<double> random_vec(RngState& rng, int n, double lo = -2.0, double hi = 2.0) {
    std::vector<double> v(static_cast<size_t>(n));
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

bool close(double a, double b, double tol = 1e-10) {
    const double scale = std::max({std::abs(a), std::abs(b), 1.0});
    return std::abs(a - b) <= tol * scale;
}

bool close_all(const std::vector<double>& a, const std::vector<double>& b, double tol = 1e-10) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (!close(a[i], b[i], tol)) return false;
    return true;
}

}  // namespace

TEST_CASE("kernel dispatch reports a usable backend") {
    const auto& t = kernels::active();
    CHECK(t.matmul != nullptr);
    CHECK(t.adam_update != nullptr);
    if (kernels::avx2_available()) CHECK(kernels::avx2_table() != nullptr);
}

TEST_CASE("avx2 kernels match scalar reference") {
    if (!kernels::avx2_available()) return;  // nothing to compare on this host
    const auto& s = kernels::scalar_table;
    const auto& a = *kernels::avx2_table();
    RngState rng(20240817);

    for (int n : {1, 2, 3, 4, 5, 7, 8, 15, 16, 31, 64, 67, 129}) {
        auto x = random_vec(rng, n);
        auto y = random_vec(rng, n);

        CHECK(close(s.dot(x.data(), y.data(), n), a.dot(x.data(), y.data(), n)));
        CHECK(close(s.reduce_sum(x.data(), n), a.reduce_sum(x.data(), n)));
        CHECK(s.reduce_max(x.data(), n) == a.reduce_max(x.data(), n));

        std::vector<double> o1(x.size()), o2(x.size());
        s.add(x.data(), y.data(), o1.data(), n);
        a.add(x.data(), y.data(), o2.data(), n);
        CHECK(close_all(o1, o2));
        s.mul(x.data(), y.data(), o1.data(), n);
        a.mul(x.data(), y.data(), o2.data(), n);
        CHECK(close_all(o1, o2));
        s.scale(x.data(), 1.7, o1.data(), n);
        a.scale(x.data(), 1.7, o2.data(), n);
        CHECK(close_all(o1, o2));
        s.relu(x.data(), o1.data(), n);
        a.relu(x.data(), o2.data(), n);
        CHECK(close_all(o1, o2));

        auto y1 = y, y2 = y;
        s.axpy(0.37, x.data(), y1.data(), n);
        a.axpy(0.37, x.data(), y2.data(), n);
        CHECK(close_all(y1, y2));

        auto g = random_vec(rng, n);
        auto gx1 = random_vec(rng, n);
        auto gx2 = gx1;
        s.relu_backward(x.data(), g.data(), gx1.data(), n);
        a.relu_backward(x.data(), g.data(), gx2.data(), n);
        CHECK(close_all(gx1, gx2));
    }
}

TEST_CASE("avx2 matmul variants match scalar on odd shapes") {
    if (!kernels::avx2_available()) return;
    const auto& s = kernels::scalar_table;
    const auto& a = *kernels::avx2_table();
    RngState rng(7);

    const std::vector<std::array<int, 3>> shapes = {
        {1, 1, 1}, {2, 3, 5}, {7, 4, 9}, {5, 17, 3}, {8, 8, 8}, {3, 6, 13}};
    for (auto [m, k, n] : shapes) {
        auto A = random_vec(rng, m * k);
        auto B = random_vec(rng, k * n);
        std::vector<double> c1(static_cast<size_t>(m) * n), c2(c1.size());
        s.matmul(A.data(), B.data(), c1.data(), m, k, n);
        a.matmul(A.data(), B.data(), c2.data(), m, k, n);
        CHECK(close_all(c1, c2));

        auto Bt = random_vec(rng, n * k);
        s.matmul_transb(A.data(), Bt.data(), c1.data(), m, k, n);
        a.matmul_transb(A.data(), Bt.data(), c2.data(), m, k, n);
        CHECK(close_all(c1, c2));
    }
}

TEST_CASE("avx2 adam update matches scalar") {
    if (!kernels::avx2_available()) return;
    const auto& s = kernels::scalar_table;
    const auto& a = *kernels::avx2_table();
    RngState rng(99);

    for (int n : {1, 3, 4, 9, 33}) {
        auto grad = random_vec(rng, n);
        auto v1 = random_vec(rng, n), v2 = v1;
        std::vector<double> m1(static_cast<size_t>(n), 0.01), m2 = m1;
        std::vector<double> s1(static_cast<size_t>(n), 0.02), s2 = s1;
        s.adam_update(v1.data(), grad.data(), m1.data(), s1.data(), n, 1e-3, 0.9, 0.999, 1e-8, 0.1, 0.001999);
        a.adam_update(v2.data(), grad.data(), m2.data(), s2.data(), n, 1e-3, 0.9, 0.999, 1e-8, 0.1, 0.001999);
        CHECK(close_all(v1, v2));
        CHECK(close_all(m1, m2));
        CHECK(close_all(s1, s2));
    }
}

TEST_CASE("backend can be forced to scalar and back") {
    const auto before = kernels::active_backend();
    kernels::force_backend(kernels::Backend::kScalar);
    CHECK(kernels::active_backend() == kernels::Backend::kScalar);
    kernels::force_backend(before);
    CHECK(kernels::active_backend() == before);
}
