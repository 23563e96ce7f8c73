#include "veritab/kernels.hpp"

#include <cstdlib>
#include <string>

#include "veritab/errors.hpp"

namespace veritab::kernels {
namespace {

const Table* g_active = nullptr;

Backend detect_backend() {
    if (const char* env = std::getenv("VERITAB_KERNELS")) {
        std::string s(env);
        if (s == "scalar") return Backend::kScalar;
        if (s == "avx2") {
            if (!avx2_available())
                throw ConfigError("VERITAB_KERNELS=avx2 but AVX2 is unavailable on this host/build");
            return Backend::kAvx2;
        }
        throw ConfigError("VERITAB_KERNELS: unknown backend '" + s + "' (expected scalar|avx2)");
    }
    return avx2_available() ? Backend::kAvx2 : Backend::kScalar;
}

const Table* table_for(Backend b) {
    if (b == Backend::kAvx2) return avx2_table();
    return &scalar_table;
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
    return avx2_table() != nullptr && __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Table& active() {
    if (!g_active) g_active = table_for(detect_backend());
    return *g_active;
}

Backend active_backend() {
    active();
    return g_active == avx2_table() ? Backend::kAvx2 : Backend::kScalar;
}

std::string backend_name(Backend b) { return b == Backend::kAvx2 ? "avx2" : "scalar"; }

void force_backend(Backend b) {
    if (b == Backend::kAvx2 && !avx2_available())
        throw ConfigError("AVX2 backend requested but unavailable on this host/build");
    g_active = table_for(b);
}

}  // namespace veritab::kernels
