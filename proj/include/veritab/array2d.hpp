#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "veritab/errors.hpp"

namespace veritab {

// Dense row-major matrix of doubles. Row vectors are 1xN, scalars 1x1.
struct Array2D {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Array2D() = default;
    Array2D(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {
        if (r < 0 || c < 0) throw ShapeMismatch("Array2D: negative dimension");
    }
    Array2D(std::initializer_list<std::initializer_list<double>> init) {
        rows = static_cast<int>(init.size());
        cols = rows > 0 ? static_cast<int>(init.begin()->size()) : 0;
        data.reserve(static_cast<size_t>(rows) * cols);
        for (const auto& r : init) {
            if (static_cast<int>(r.size()) != cols)
                throw ShapeMismatch("Array2D: ragged initializer");
            data.insert(data.end(), r.begin(), r.end());
        }
    }

    static Array2D zeros(int r, int c) { return Array2D(r, c); }
    static Array2D identity(int n) {
        Array2D out(n, n);
        for (int i = 0; i < n; ++i) out.at(i, i) = 1.0;
        return out;
    }
    static Array2D row_vector(std::span<const double> v) {
        Array2D out(1, static_cast<int>(v.size()));
        out.data.assign(v.begin(), v.end());
        return out;
    }

    double& at(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
    double at(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }

    size_t size() const { return data.size(); }
    bool same_shape(const Array2D& o) const { return rows == o.rows && cols == o.cols; }

    std::span<double> row_span(int i) { return {data.data() + static_cast<size_t>(i) * cols, static_cast<size_t>(cols)}; }
    std::span<const double> row_span(int i) const { return {data.data() + static_cast<size_t>(i) * cols, static_cast<size_t>(cols)}; }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline bool operator==(const Array2D& a, const Array2D& b) {
    return a.rows == b.rows && a.cols == b.cols && a.data == b.data;
}

}  // namespace veritab
