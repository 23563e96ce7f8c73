#include "veritab/primitives.hpp"

#include <cmath>

#include "veritab/errors.hpp"

namespace veritab {

std::vector<double> softmax(std::span<const double> v) {
    if (v.empty()) throw EmptyInput("softmax: empty input");
    Tape tape;
    ValueId x = tape.input(Array2D::row_vector(v));
    ValueId y = tape.softmax_rows(x);
    return tape.value(y).data;
}

Array2D linear(const Array2D& x, const Array2D& w, const Array2D& bias_row) {
    Tape tape;
    ValueId out = tape.linear(tape.input(x), tape.input(w), tape.input(bias_row));
    return tape.value(out);
}

double cross_entropy(std::span<const double> p, int target) {
    Tape tape;
    ValueId loss = tape.cross_entropy(tape.input(Array2D::row_vector(p)), target);
    return tape.value(loss).data[0];
}

ValueId scaled_dot_attention_node(Tape& tape, ValueId q, ValueId k, ValueId v,
                                  const std::vector<bool>& key_mask) {
    const Array2D& qv = tape.value(q);
    const Array2D& kv = tape.value(k);
    const Array2D& vv = tape.value(v);
    if (qv.cols != kv.cols)
        throw ShapeMismatch("attention: query width " + std::to_string(qv.cols) +
                            " != key width " + std::to_string(kv.cols));
    if (kv.rows != vv.rows || static_cast<size_t>(kv.rows) != key_mask.size())
        throw ShapeMismatch("attention: keys, values and mask must agree on row count");
    const int d_k = qv.cols;
    ValueId scores = tape.scale(tape.matmul(q, tape.transpose(k)), 1.0 / std::sqrt(static_cast<double>(d_k)));
    ValueId weights = tape.masked_softmax_rows(scores, key_mask);
    return tape.matmul(weights, v);
}

Array2D scaled_dot_attention(const Array2D& q, const Array2D& k, const Array2D& v,
                             const std::vector<bool>& key_mask) {
    Tape tape;
    ValueId out = scaled_dot_attention_node(tape, tape.input(q), tape.input(k), tape.input(v), key_mask);
    return tape.value(out);
}

MhaParams MhaParams::identity(int dim) {
    MhaParams p;
    p.wq = p.wk = p.wv = p.wo = Array2D::identity(dim);
    p.bq = p.bk = p.bv = p.bo = Array2D(1, dim);
    return p;
}

ValueId multi_head_attention_node(Tape& tape, ValueId q, ValueId k, ValueId v,
                                  const std::vector<bool>& key_mask, const MhaParamIds& p,
                                  int heads) {
    const int hidden = tape.value(p.wq).cols;
    if (heads <= 0 || hidden % heads != 0)
        throw ConfigError("multi_head_attention: hidden " + std::to_string(hidden) +
                          " not divisible by heads " + std::to_string(heads));
    ValueId qp = tape.linear(q, p.wq, p.bq);
    ValueId kp = tape.linear(k, p.wk, p.bk);
    ValueId vp = tape.linear(v, p.wv, p.bv);
    const int head_dim = hidden / heads;
    std::vector<ValueId> head_outs;
    head_outs.reserve(static_cast<size_t>(heads));
    for (int h = 0; h < heads; ++h) {
        const int c0 = h * head_dim, c1 = c0 + head_dim;
        head_outs.push_back(scaled_dot_attention_node(tape, tape.slice_cols(qp, c0, c1),
                                                      tape.slice_cols(kp, c0, c1),
                                                      tape.slice_cols(vp, c0, c1), key_mask));
    }
    ValueId cat = heads == 1 ? head_outs[0] : tape.concat_cols(head_outs);
    return tape.linear(cat, p.wo, p.bo);
}

Array2D multi_head_attention(const Array2D& q, const Array2D& k, const Array2D& v,
                             const std::vector<bool>& key_mask, const MhaParams& params,
                             int heads) {
    Tape tape;
    MhaParamIds ids{tape.input(params.wq), tape.input(params.bq), tape.input(params.wk),
                    tape.input(params.bk), tape.input(params.wv), tape.input(params.bv),
                    tape.input(params.wo), tape.input(params.bo)};
    ValueId out = multi_head_attention_node(tape, tape.input(q), tape.input(k), tape.input(v),
                                            key_mask, ids, heads);
    return tape.value(out);
}

}  // namespace veritab
