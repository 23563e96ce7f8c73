#include "veritab/params.hpp"

#include <cmath>

#include "veritab/errors.hpp"
#include "veritab/kernels.hpp"

namespace veritab {

Array2D& ParameterStore::create(const std::string& name, int rows, int cols) {
    if (entries_.count(name))
        throw ConfigError("ParameterStore: duplicate parameter '" + name + "'");
    Entry e;
    e.value = Array2D(rows, cols);
    e.grad = Array2D(rows, cols);
    e.m = Array2D(rows, cols);
    e.v = Array2D(rows, cols);
    return entries_.emplace(name, std::move(e)).first->second.value;
}

Array2D& ParameterStore::create_xavier(const std::string& name, int rows, int cols, RngState& rng) {
    Array2D& v = create(name, rows, cols);
    const double a = std::sqrt(6.0 / (rows + cols));
    for (double& x : v.data) x = rng.uniform(-a, a);
    return v;
}

Array2D& ParameterStore::create_ones(const std::string& name, int rows, int cols) {
    Array2D& v = create(name, rows, cols);
    for (double& x : v.data) x = 1.0;
    return v;
}

Array2D& ParameterStore::value(const std::string& name) {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ConfigError("ParameterStore: unknown parameter '" + name + "'");
    return it->second.value;
}

const Array2D& ParameterStore::value(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ConfigError("ParameterStore: unknown parameter '" + name + "'");
    return it->second.value;
}

Array2D& ParameterStore::grad(const std::string& name) {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ConfigError("ParameterStore: unknown parameter '" + name + "'");
    return it->second.grad;
}

size_t ParameterStore::scalar_count() const {
    size_t n = 0;
    for (const auto& [name, e] : entries_) n += e.value.size();
    return n;
}

void ParameterStore::zero_grads() {
    for (auto& [name, e] : entries_)
        std::fill(e.grad.data.begin(), e.grad.data.end(), 0.0);
}

void ParameterStore::adam_step(const AdamConfig& cfg) {
    for (const auto& [name, e] : entries_)
        if (!e.grad.all_finite())
            throw NonFiniteGradient("adam_step: non-finite gradient in parameter '" + name + "'");

    const auto& k = kernels::active();
    ++step_count_;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step_count_));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step_count_));
    for (auto& [name, e] : entries_) {
        k.adam_update(e.value.data.data(), e.grad.data.data(), e.m.data.data(), e.v.data.data(),
                      static_cast<int>(e.value.size()), cfg.lr, cfg.beta1, cfg.beta2, cfg.eps, bc1, bc2);
        std::fill(e.grad.data.begin(), e.grad.data.end(), 0.0);
    }
}

std::map<std::string, Array2D> finite_diff_grad(const std::function<double()>& f,
                                                ParameterStore& store, double h) {
    if (h <= 0.0) throw ConfigError("finite_diff_grad: h must be positive");
    std::map<std::string, Array2D> out;
    for (auto& [name, e] : store.entries()) {
        Array2D est(e.value.rows, e.value.cols);
        for (size_t i = 0; i < e.value.size(); ++i) {
            const double saved = e.value.data[i];
            e.value.data[i] = saved + h;
            const double fp = f();
            e.value.data[i] = saved - h;
            const double fm = f();
            e.value.data[i] = saved;
            est.data[i] = (fp - fm) / (2.0 * h);
        }
        out.emplace(name, std::move(est));
    }
    return out;
}

}  // namespace veritab
