#pragma once

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "veritab/array2d.hpp"
#include "veritab/params.hpp"
#include "veritab/rng.hpp"

namespace veritab {

enum class Mode { kTrain, kEval };

using ValueId = int;

// Recorded-operation reverse-mode differentiation over a fixed kernel
// vocabulary. Nodes are appended in topological order during the forward
// pass; backward() sweeps them in reverse and accumulates parameter
// gradients into the bound ParameterStore.
//
// One tape covers one training step: record the forward, call backward()
// once, then discard. Parameter leaves are cached per name, so an encoder
// reused across several inputs shares one leaf (and its gradient
// accumulates).
class Tape {
public:
    // Constant (no gradient flows into it).
    ValueId input(Array2D v);
    ValueId zeros(int rows, int cols) { return input(Array2D(rows, cols)); }

    // Trainable leaf bound to store[name]; copies the current value.
    ValueId param(ParameterStore& store, const std::string& name);

    ValueId matmul(ValueId a, ValueId b);
    ValueId transpose(ValueId a);
    ValueId add(ValueId a, ValueId b);
    ValueId add_bias(ValueId x, ValueId bias_row);
    ValueId scale(ValueId a, double alpha);
    ValueId relu(ValueId a);
    // Row-wise softmax over unmasked columns only; masked outputs are exactly
    // 0 and never enter the normalization. Throws AllMasked / EmptyInput.
    ValueId masked_softmax_rows(ValueId logits, const std::vector<bool>& key_mask);
    ValueId softmax_rows(ValueId logits);
    ValueId layer_norm(ValueId x, ValueId gain, ValueId bias, double eps = 1e-5);
    // Identity in eval mode or when rate == 0; inverted dropout otherwise.
    ValueId dropout(ValueId x, double rate, RngState& rng, Mode mode);
    ValueId gather_rows(ValueId table, const std::vector<int>& ids);
    ValueId concat_rows(const std::vector<ValueId>& parts);
    ValueId concat_cols(const std::vector<ValueId>& parts);
    ValueId slice_cols(ValueId x, int c0, int c1);
    ValueId row(ValueId x, int r);
    ValueId sum(ValueId x);
    ValueId mean_of(const std::vector<ValueId>& scalars);
    // -log(max(p[target], 1e-12)); p must be a 1xC distribution.
    ValueId cross_entropy(ValueId probs_row, int target);

    // x*W + b with the standard shape contract (x.cols = W.rows, b.cols = W.cols).
    ValueId linear(ValueId x, ValueId w, ValueId bias_row);

    const Array2D& value(ValueId id) const;
    // Gradient buffer of a node after backward(); zeros if untouched.
    Array2D grad_of(ValueId id) const;

    // Seeds d(loss)/d(loss) = 1, sweeps the tape, then adds each parameter
    // leaf's gradient into the store. Throws NoRecordedForward if nothing was
    // recorded, the id is invalid, the loss is not 1x1, or backward already ran.
    void backward(ValueId loss, ParameterStore& store);

    size_t size() const { return nodes_.size(); }

private:
    struct Node {
        Array2D value;
        Array2D grad;  // empty until touched during backward
        bool requires_grad = false;
        std::function<void(Tape&, Node&)> backward_fn;
        std::string param_name;
    };

    ValueId push(Node n);
    Node& node(ValueId id);
    const Node& node(ValueId id) const;
    Array2D& gbuf(ValueId id);
    bool wants_grad(ValueId id) const { return nodes_[static_cast<size_t>(id)].requires_grad; }
    void check_id(ValueId id) const;

    std::vector<Node> nodes_;
    std::unordered_map<std::string, ValueId> param_cache_;
    ParameterStore* store_ = nullptr;
    bool backward_done_ = false;
};

}  // namespace veritab
