#include "veritab/tape.hpp"

#include <cmath>
#include <cstring>

#include "veritab/errors.hpp"
#include "veritab/kernels.hpp"

namespace veritab {

namespace {
const kernels::Table& K() { return kernels::active(); }
}  // namespace

ValueId Tape::push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<ValueId>(nodes_.size() - 1);
}

void Tape::check_id(ValueId id) const {
    if (id < 0 || static_cast<size_t>(id) >= nodes_.size())
        throw NoRecordedForward("tape: value id " + std::to_string(id) + " was not recorded");
}

Tape::Node& Tape::node(ValueId id) {
    check_id(id);
    return nodes_[static_cast<size_t>(id)];
}

const Tape::Node& Tape::node(ValueId id) const {
    check_id(id);
    return nodes_[static_cast<size_t>(id)];
}

const Array2D& Tape::value(ValueId id) const { return node(id).value; }

Array2D Tape::grad_of(ValueId id) const {
    const Node& n = node(id);
    if (n.grad.size() == 0) return Array2D(n.value.rows, n.value.cols);
    return n.grad;
}

Array2D& Tape::gbuf(ValueId id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.grad.size() == 0) n.grad = Array2D(n.value.rows, n.value.cols);
    return n.grad;
}

ValueId Tape::input(Array2D v) {
    Node n;
    n.value = std::move(v);
    return push(std::move(n));
}

ValueId Tape::param(ParameterStore& store, const std::string& name) {
    if (store_ && store_ != &store)
        throw NoRecordedForward("tape: parameters from two different stores on one tape");
    store_ = &store;
    auto it = param_cache_.find(name);
    if (it != param_cache_.end()) return it->second;
    Node n;
    n.value = store.value(name);
    n.requires_grad = true;
    n.param_name = name;
    ValueId id = push(std::move(n));
    param_cache_.emplace(name, id);
    return id;
}

ValueId Tape::matmul(ValueId a, ValueId b) {
    const Array2D& av = value(a);
    const Array2D& bv = value(b);
    if (av.cols != bv.rows)
        throw ShapeMismatch("matmul: " + std::to_string(av.rows) + "x" + std::to_string(av.cols) +
                            " * " + std::to_string(bv.rows) + "x" + std::to_string(bv.cols));
    Node n;
    n.value = Array2D(av.rows, bv.cols);
    K().matmul(av.data.data(), bv.data.data(), n.value.data.data(), av.rows, av.cols, bv.cols);
    n.requires_grad = wants_grad(a) || wants_grad(b);
    if (n.requires_grad) {
        n.backward_fn = [a, b](Tape& t, Node& self) {
            const Array2D& g = self.grad;
            const Array2D& av = t.value(a);
            const Array2D& bv = t.value(b);
            const int m = av.rows, k = av.cols, nn = bv.cols;
            if (t.wants_grad(a)) {
                Array2D& ga = t.gbuf(a);  // ga += g * bv^T
                for (int i = 0; i < m; ++i) {
                    const double* grow = &g.data[static_cast<size_t>(i) * nn];
                    double* garow = &ga.data[static_cast<size_t>(i) * k];
                    for (int kk = 0; kk < k; ++kk)
                        garow[kk] += K().dot(grow, &bv.data[static_cast<size_t>(kk) * nn], nn);
                }
            }
            if (t.wants_grad(b)) {
                Array2D& gb = t.gbuf(b);  // gb += av^T * g
                for (int i = 0; i < m; ++i)
                    for (int kk = 0; kk < k; ++kk)
                        K().axpy(av.at(i, kk), &g.data[static_cast<size_t>(i) * nn], &gb.data[static_cast<size_t>(kk) * nn], nn);
            }
        };
    }
    return push(std::move(n));
}

ValueId Tape::transpose(ValueId a) {
    const Array2D& av = value(a);
    Node n;
    n.value = Array2D(av.cols, av.rows);
    for (int i = 0; i < av.rows; ++i)
        for (int j = 0; j < av.cols; ++j) n.value.at(j, i) = av.at(i, j);
    n.requires_grad = wants_grad(a);
    if (n.requires_grad) {
        n.backward_fn = [a](Tape& t, Node& self) {
            Array2D& ga = t.gbuf(a);
            for (int i = 0; i < self.grad.rows; ++i)
                for (int j = 0; j < self.grad.cols; ++j) ga.at(j, i) += self.grad.at(i, j);
        };
    }
    return push(std::move(n));
}

ValueId Tape::add(ValueId a, ValueId b) {
    const Array2D& av = value(a);
    const Array2D& bv = value(b);
    if (!av.same_shape(bv)) throw ShapeMismatch("add: shapes differ");
    Node n;
    n.value = Array2D(av.rows, av.cols);
    K().add(av.data.data(), bv.data.data(), n.value.data.data(), static_cast<int>(av.size()));
    n.requires_grad = wants_grad(a) || wants_grad(b);
    if (n.requires_grad) {
        n.backward_fn = [a, b](Tape& t, Node& self) {
            const int sz = static_cast<int>(self.grad.size());
            if (t.wants_grad(a)) K().axpy(1.0, self.grad.data.data(), t.gbuf(a).data.data(), sz);
            if (t.wants_grad(b)) K().axpy(1.0, self.grad.data.data(), t.gbuf(b).data.data(), sz);
        };
    }
    return push(std::move(n));
}

ValueId Tape::add_bias(ValueId x, ValueId bias_row) {
    const Array2D& xv = value(x);
    const Array2D& bv = value(bias_row);
    if (bv.rows != 1 || bv.cols != xv.cols)
        throw ShapeMismatch("add_bias: bias must be 1x" + std::to_string(xv.cols));
    Node n;
    n.value = xv;
    K().add_bias_rows(n.value.data.data(), bv.data.data(), xv.rows, xv.cols);
    n.requires_grad = wants_grad(x) || wants_grad(bias_row);
    if (n.requires_grad) {
        n.backward_fn = [x, bias_row](Tape& t, Node& self) {
            if (t.wants_grad(x))
                K().axpy(1.0, self.grad.data.data(), t.gbuf(x).data.data(), static_cast<int>(self.grad.size()));
            if (t.wants_grad(bias_row)) {
                Array2D& gb = t.gbuf(bias_row);
                for (int i = 0; i < self.grad.rows; ++i)
                    K().axpy(1.0, &self.grad.data[static_cast<size_t>(i) * self.grad.cols], gb.data.data(), self.grad.cols);
            }
        };
    }
    return push(std::move(n));
}

ValueId Tape::scale(ValueId a, double alpha) {
    const Array2D& av = value(a);
    Node n;
    n.value = Array2D(av.rows, av.cols);
    K().scale(av.data.data(), alpha, n.value.data.data(), static_cast<int>(av.size()));
    n.requires_grad = wants_grad(a);
    if (n.requires_grad) {
        n.backward_fn = [a, alpha](Tape& t, Node& self) {
            K().axpy(alpha, self.grad.data.data(), t.gbuf(a).data.data(), static_cast<int>(self.grad.size()));
        };
    }
    return push(std::move(n));
}

ValueId Tape::relu(ValueId a) {
    const Array2D& av = value(a);
    Node n;
    n.value = Array2D(av.rows, av.cols);
    K().relu(av.data.data(), n.value.data.data(), static_cast<int>(av.size()));
    n.requires_grad = wants_grad(a);
    if (n.requires_grad) {
        n.backward_fn = [a](Tape& t, Node& self) {
            const Array2D& av = t.value(a);
            K().relu_backward(av.data.data(), self.grad.data.data(), t.gbuf(a).data.data(),
                              static_cast<int>(av.size()));
        };
    }
    return push(std::move(n));
}

ValueId Tape::masked_softmax_rows(ValueId logits, const std::vector<bool>& key_mask) {
    const Array2D& lv = value(logits);
    if (lv.cols == 0) throw EmptyInput("softmax: empty row");
    if (static_cast<int>(key_mask.size()) != lv.cols)
        throw ShapeMismatch("masked_softmax: mask length != columns");
    int live = 0;
    for (bool b : key_mask) live += b ? 1 : 0;
    if (live == 0) throw AllMasked("masked_softmax: every key is masked");

    Node n;
    n.value = Array2D(lv.rows, lv.cols);
    for (int i = 0; i < lv.rows; ++i) {
        double mx = -HUGE_VAL;
        for (int j = 0; j < lv.cols; ++j)
            if (key_mask[j] && lv.at(i, j) > mx) mx = lv.at(i, j);
        double denom = 0.0;
        for (int j = 0; j < lv.cols; ++j)
            if (key_mask[j]) {
                const double e = std::exp(lv.at(i, j) - mx);
                n.value.at(i, j) = e;
                denom += e;
            }
        for (int j = 0; j < lv.cols; ++j)
            n.value.at(i, j) = key_mask[j] ? n.value.at(i, j) / denom : 0.0;
    }
    n.requires_grad = wants_grad(logits);
    if (n.requires_grad) {
        // Masked outputs are exactly 0, so y*(g - <g,y>) vanishes there on its own.
        n.backward_fn = [logits](Tape& t, Node& self) {
            Array2D& gx = t.gbuf(logits);
            const Array2D& y = self.value;
            const Array2D& g = self.grad;
            for (int i = 0; i < y.rows; ++i) {
                const double* yr = &y.data[static_cast<size_t>(i) * y.cols];
                const double* gr = &g.data[static_cast<size_t>(i) * y.cols];
                const double inner = K().dot(gr, yr, y.cols);
                double* out = &gx.data[static_cast<size_t>(i) * y.cols];
                for (int j = 0; j < y.cols; ++j) out[j] += yr[j] * (gr[j] - inner);
            }
        };
    }
    return push(std::move(n));
}

ValueId Tape::softmax_rows(ValueId logits) {
    return masked_softmax_rows(logits, std::vector<bool>(static_cast<size_t>(value(logits).cols), true));
}

ValueId Tape::layer_norm(ValueId x, ValueId gain, ValueId bias, double eps) {
    const Array2D& xv = value(x);
    const Array2D& gv = value(gain);
    const Array2D& bv = value(bias);
    if (gv.rows != 1 || bv.rows != 1 || gv.cols != xv.cols || bv.cols != xv.cols)
        throw ShapeMismatch("layer_norm: gain/bias must be 1x" + std::to_string(xv.cols));

    const int rows = xv.rows, cols = xv.cols;
    Array2D xhat(rows, cols);
    std::vector<double> inv_std(static_cast<size_t>(rows));
    Node n;
    n.value = Array2D(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const double* xr = &xv.data[static_cast<size_t>(i) * cols];
        const double mu = K().reduce_sum(xr, cols) / cols;
        double var = 0.0;
        for (int j = 0; j < cols; ++j) {
            const double d = xr[j] - mu;
            var += d * d;
        }
        var /= cols;
        const double s = 1.0 / std::sqrt(var + eps);
        inv_std[static_cast<size_t>(i)] = s;
        for (int j = 0; j < cols; ++j) {
            const double xh = (xr[j] - mu) * s;
            xhat.at(i, j) = xh;
            n.value.at(i, j) = xh * gv.data[static_cast<size_t>(j)] + bv.data[static_cast<size_t>(j)];
        }
    }
    n.requires_grad = wants_grad(x) || wants_grad(gain) || wants_grad(bias);
    if (n.requires_grad) {
        n.backward_fn = [x, gain, bias, xhat = std::move(xhat), inv_std = std::move(inv_std)](Tape& t, Node& self) {
            const Array2D& g = self.grad;
            const Array2D& gainv = t.value(gain);
            const int rows = g.rows, cols = g.cols;
            if (t.wants_grad(gain)) {
                Array2D& gg = t.gbuf(gain);
                for (int i = 0; i < rows; ++i)
                    for (int j = 0; j < cols; ++j) gg.data[static_cast<size_t>(j)] += g.at(i, j) * xhat.at(i, j);
            }
            if (t.wants_grad(bias)) {
                Array2D& gb = t.gbuf(bias);
                for (int i = 0; i < rows; ++i)
                    K().axpy(1.0, &g.data[static_cast<size_t>(i) * cols], gb.data.data(), cols);
            }
            if (t.wants_grad(x)) {
                Array2D& gx = t.gbuf(x);
                std::vector<double> dxhat(static_cast<size_t>(cols));
                for (int i = 0; i < rows; ++i) {
                    double m1 = 0.0, m2 = 0.0;
                    for (int j = 0; j < cols; ++j) {
                        dxhat[static_cast<size_t>(j)] = g.at(i, j) * gainv.data[static_cast<size_t>(j)];
                        m1 += dxhat[static_cast<size_t>(j)];
                        m2 += dxhat[static_cast<size_t>(j)] * xhat.at(i, j);
                    }
                    m1 /= cols;
                    m2 /= cols;
                    const double s = inv_std[static_cast<size_t>(i)];
                    for (int j = 0; j < cols; ++j)
                        gx.at(i, j) += s * (dxhat[static_cast<size_t>(j)] - m1 - xhat.at(i, j) * m2);
                }
            }
        };
    }
    return push(std::move(n));
}

ValueId Tape::dropout(ValueId x, double rate, RngState& rng, Mode mode) {
    if (rate < 0.0 || rate >= 1.0) {
        if (rate != 0.0) throw ConfigError("dropout: rate must lie in [0, 1)");
    }
    if (mode == Mode::kEval || rate == 0.0) return x;
    const Array2D& xv = value(x);
    const double keep_scale = 1.0 / (1.0 - rate);
    std::vector<uint8_t> keep(xv.size());
    Node n;
    n.value = Array2D(xv.rows, xv.cols);
    for (size_t i = 0; i < xv.size(); ++i) {
        keep[i] = rng.next_double() >= rate ? 1 : 0;
        n.value.data[i] = keep[i] ? xv.data[i] * keep_scale : 0.0;
    }
    n.requires_grad = wants_grad(x);
    if (n.requires_grad) {
        n.backward_fn = [x, keep = std::move(keep), keep_scale](Tape& t, Node& self) {
            Array2D& gx = t.gbuf(x);
            for (size_t i = 0; i < keep.size(); ++i)
                if (keep[i]) gx.data[i] += self.grad.data[i] * keep_scale;
        };
    }
    return push(std::move(n));
}

ValueId Tape::gather_rows(ValueId table, const std::vector<int>& ids) {
    const Array2D& tv = value(table);
    for (int id : ids)
        if (id < 0 || id >= tv.rows)
            throw IndexOutOfRange("gather_rows: id " + std::to_string(id) + " outside 0.." +
                                  std::to_string(tv.rows - 1));
    Node n;
    n.value = Array2D(static_cast<int>(ids.size()), tv.cols);
    for (size_t t = 0; t < ids.size(); ++t)
        std::memcpy(&n.value.data[t * static_cast<size_t>(tv.cols)],
                    &tv.data[static_cast<size_t>(ids[t]) * tv.cols], sizeof(double) * tv.cols);
    n.requires_grad = wants_grad(table);
    if (n.requires_grad) {
        n.backward_fn = [table, ids](Tape& t, Node& self) {
            Array2D& gt = t.gbuf(table);
            const int cols = self.grad.cols;
            for (size_t r = 0; r < ids.size(); ++r)
                K().axpy(1.0, &self.grad.data[r * static_cast<size_t>(cols)],
                         &gt.data[static_cast<size_t>(ids[r]) * cols], cols);
        };
    }
    return push(std::move(n));
}

ValueId Tape::concat_rows(const std::vector<ValueId>& parts) {
    if (parts.empty()) throw EmptyInput("concat_rows: no parts");
    const int cols = value(parts[0]).cols;
    int rows = 0;
    bool rg = false;
    for (ValueId p : parts) {
        if (value(p).cols != cols) throw ShapeMismatch("concat_rows: column mismatch");
        rows += value(p).rows;
        rg = rg || wants_grad(p);
    }
    Node n;
    n.value = Array2D(rows, cols);
    int at = 0;
    for (ValueId p : parts) {
        const Array2D& pv = value(p);
        std::memcpy(&n.value.data[static_cast<size_t>(at) * cols], pv.data.data(),
                    sizeof(double) * pv.size());
        at += pv.rows;
    }
    n.requires_grad = rg;
    if (rg) {
        n.backward_fn = [parts](Tape& t, Node& self) {
            int at = 0;
            const int cols = self.grad.cols;
            for (ValueId p : parts) {
                const int pr = t.value(p).rows;
                if (t.wants_grad(p))
                    K().axpy(1.0, &self.grad.data[static_cast<size_t>(at) * cols],
                             t.gbuf(p).data.data(), pr * cols);
                at += pr;
            }
        };
    }
    return push(std::move(n));
}

ValueId Tape::concat_cols(const std::vector<ValueId>& parts) {
    if (parts.empty()) throw EmptyInput("concat_cols: no parts");
    const int rows = value(parts[0]).rows;
    int cols = 0;
    bool rg = false;
    for (ValueId p : parts) {
        if (value(p).rows != rows) throw ShapeMismatch("concat_cols: row mismatch");
        cols += value(p).cols;
        rg = rg || wants_grad(p);
    }
    Node n;
    n.value = Array2D(rows, cols);
    int at = 0;
    for (ValueId p : parts) {
        const Array2D& pv = value(p);
        for (int i = 0; i < rows; ++i)
            std::memcpy(&n.value.data[static_cast<size_t>(i) * cols + at],
                        &pv.data[static_cast<size_t>(i) * pv.cols], sizeof(double) * pv.cols);
        at += pv.cols;
    }
    n.requires_grad = rg;
    if (rg) {
        n.backward_fn = [parts](Tape& t, Node& self) {
            int at = 0;
            const int cols = self.grad.cols;
            for (ValueId p : parts) {
                const Array2D& pv = t.value(p);
                if (t.wants_grad(p)) {
                    Array2D& gp = t.gbuf(p);
                    for (int i = 0; i < pv.rows; ++i)
                        K().axpy(1.0, &self.grad.data[static_cast<size_t>(i) * cols + at],
                                 &gp.data[static_cast<size_t>(i) * pv.cols], pv.cols);
                }
                at += pv.cols;
            }
        };
    }
    return push(std::move(n));
}

ValueId Tape::slice_cols(ValueId x, int c0, int c1) {
    const Array2D& xv = value(x);
    if (c0 < 0 || c1 > xv.cols || c0 >= c1) throw ShapeMismatch("slice_cols: bad range");
    Node n;
    n.value = Array2D(xv.rows, c1 - c0);
    for (int i = 0; i < xv.rows; ++i)
        std::memcpy(&n.value.data[static_cast<size_t>(i) * (c1 - c0)],
                    &xv.data[static_cast<size_t>(i) * xv.cols + c0], sizeof(double) * (c1 - c0));
    n.requires_grad = wants_grad(x);
    if (n.requires_grad) {
        n.backward_fn = [x, c0](Tape& t, Node& self) {
            Array2D& gx = t.gbuf(x);
            const int w = self.grad.cols;
            for (int i = 0; i < self.grad.rows; ++i)
                K().axpy(1.0, &self.grad.data[static_cast<size_t>(i) * w],
                         &gx.data[static_cast<size_t>(i) * gx.cols + c0], w);
        };
    }
    return push(std::move(n));
}

ValueId Tape::row(ValueId x, int r) {
    const Array2D& xv = value(x);
    if (r < 0 || r >= xv.rows) throw IndexOutOfRange("row: index outside matrix");
    Node n;
    n.value = Array2D(1, xv.cols);
    std::memcpy(n.value.data.data(), &xv.data[static_cast<size_t>(r) * xv.cols], sizeof(double) * xv.cols);
    n.requires_grad = wants_grad(x);
    if (n.requires_grad) {
        n.backward_fn = [x, r](Tape& t, Node& self) {
            Array2D& gx = t.gbuf(x);
            K().axpy(1.0, self.grad.data.data(), &gx.data[static_cast<size_t>(r) * gx.cols], gx.cols);
        };
    }
    return push(std::move(n));
}

ValueId Tape::sum(ValueId x) {
    const Array2D& xv = value(x);
    Node n;
    n.value = Array2D(1, 1);
    n.value.data[0] = K().reduce_sum(xv.data.data(), static_cast<int>(xv.size()));
    n.requires_grad = wants_grad(x);
    if (n.requires_grad) {
        n.backward_fn = [x](Tape& t, Node& self) {
            Array2D& gx = t.gbuf(x);
            const double g = self.grad.data[0];
            for (double& v : gx.data) v += g;
        };
    }
    return push(std::move(n));
}

ValueId Tape::mean_of(const std::vector<ValueId>& scalars) {
    if (scalars.empty()) throw EmptyInput("mean_of: no inputs");
    Node n;
    n.value = Array2D(1, 1);
    bool rg = false;
    double acc = 0.0;
    for (ValueId s : scalars) {
        const Array2D& sv = value(s);
        if (sv.rows != 1 || sv.cols != 1) throw ShapeMismatch("mean_of: inputs must be 1x1");
        acc += sv.data[0];
        rg = rg || wants_grad(s);
    }
    n.value.data[0] = acc / static_cast<double>(scalars.size());
    n.requires_grad = rg;
    if (rg) {
        n.backward_fn = [scalars](Tape& t, Node& self) {
            const double g = self.grad.data[0] / static_cast<double>(scalars.size());
            for (ValueId s : scalars)
                if (t.wants_grad(s)) t.gbuf(s).data[0] += g;
        };
    }
    return push(std::move(n));
}

ValueId Tape::cross_entropy(ValueId probs_row, int target) {
    static constexpr double kClamp = 1e-12;
    const Array2D& pv = value(probs_row);
    if (pv.rows != 1) throw ShapeMismatch("cross_entropy: expected a 1xC row");
    if (target < 0 || target >= pv.cols)
        throw IndexOutOfRange("cross_entropy: class index " + std::to_string(target));
    double s = 0.0;
    for (double p : pv.data) {
        if (p < -1e-9) throw NotADistribution("cross_entropy: negative probability");
        s += p;
    }
    if (std::abs(s - 1.0) > 1e-6)
        throw NotADistribution("cross_entropy: probabilities sum to " + std::to_string(s));
    Node n;
    n.value = Array2D(1, 1);
    const double py = pv.data[static_cast<size_t>(target)];
    n.value.data[0] = -std::log(py > kClamp ? py : kClamp);
    n.requires_grad = wants_grad(probs_row);
    if (n.requires_grad) {
        n.backward_fn = [probs_row, target](Tape& t, Node& self) {
            const double py = t.value(probs_row).data[static_cast<size_t>(target)];
            if (py > kClamp)
                t.gbuf(probs_row).data[static_cast<size_t>(target)] -= self.grad.data[0] / py;
        };
    }
    return push(std::move(n));
}

ValueId Tape::linear(ValueId x, ValueId w, ValueId bias_row) {
    const Array2D& xv = value(x);
    const Array2D& wv = value(w);
    const Array2D& bv = value(bias_row);
    if (xv.cols != wv.rows)
        throw ShapeMismatch("linear: x.cols " + std::to_string(xv.cols) + " != W.rows " +
                            std::to_string(wv.rows));
    if (bv.rows != 1 || bv.cols != wv.cols)
        throw ShapeMismatch("linear: bias must be 1x" + std::to_string(wv.cols));
    return add_bias(matmul(x, w), bias_row);
}

void Tape::backward(ValueId loss, ParameterStore& store) {
    if (nodes_.empty()) throw NoRecordedForward("backward: tape is empty");
    check_id(loss);
    if (backward_done_) throw NoRecordedForward("backward: already run on this tape");
    const Node& ln = nodes_[static_cast<size_t>(loss)];
    if (ln.value.rows != 1 || ln.value.cols != 1)
        throw NoRecordedForward("backward: loss must be 1x1");
    if (store_ && store_ != &store)
        throw NoRecordedForward("backward: store does not match the recorded forward");
    backward_done_ = true;

    gbuf(loss).data[0] = 1.0;
    for (ValueId id = loss; id >= 0; --id) {
        Node& n = nodes_[static_cast<size_t>(id)];
        if (!n.requires_grad || n.grad.size() == 0 || !n.backward_fn) continue;
        n.backward_fn(*this, n);
    }
    for (const auto& [name, id] : param_cache_) {
        const Node& n = nodes_[static_cast<size_t>(id)];
        if (n.grad.size() == 0) continue;
        Array2D& g = store.grad(name);
        K().axpy(1.0, n.grad.data.data(), g.data.data(), static_cast<int>(g.size()));
    }
}

}  // namespace veritab
