#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "veritab/array2d.hpp"
#include "veritab/rng.hpp"

namespace veritab {

struct AdamConfig {
    double lr = 1e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Named trainable arrays with paired gradient slots and Adam moment
// accumulators. std::map keeps iteration order deterministic; backward and
// adam_step require exclusive access.
class ParameterStore {
public:
    struct Entry {
        Array2D value;
        Array2D grad;
        Array2D m;
        Array2D v;
    };

    // Zero-initialized parameter; ConfigError on duplicate names.
    Array2D& create(const std::string& name, int rows, int cols);

    // uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
    Array2D& create_xavier(const std::string& name, int rows, int cols, RngState& rng);

    // All-ones init (layer-norm gains).
    Array2D& create_ones(const std::string& name, int rows, int cols);

    bool has(const std::string& name) const { return entries_.count(name) > 0; }
    Array2D& value(const std::string& name);
    const Array2D& value(const std::string& name) const;
    Array2D& grad(const std::string& name);

    const std::map<std::string, Entry>& entries() const { return entries_; }
    std::map<std::string, Entry>& entries() { return entries_; }
    size_t scalar_count() const;

    void zero_grads();

    // Standard Adam with bias correction; increments step_count and zeroes
    // gradients after a successful update. A non-finite gradient anywhere
    // aborts before any parameter is touched and names the offender.
    void adam_step(const AdamConfig& cfg);

    int64_t step_count() const { return step_count_; }

private:
    std::map<std::string, Entry> entries_;
    int64_t step_count_ = 0;
};

// Central differences (f(t+h) - f(t-h)) / 2h for every scalar entry of every
// parameter. f must be deterministic (dropout disabled). Parameters are
// restored bit-exactly afterwards.
std::map<std::string, Array2D> finite_diff_grad(const std::function<double()>& f,
                                                ParameterStore& store, double h);

}  // namespace veritab
