#pragma once

#include <span>
#include <vector>

#include "veritab/array2d.hpp"
#include "veritab/tape.hpp"

namespace veritab {

// Numerically stable softmax of a row vector (max-subtraction). EmptyInput on
// length 0; output entries are nonnegative and sum to 1 within 1e-6.
std::vector<double> softmax(std::span<const double> v);

// out[i,j] = sum_k x[i,k]*W[k,j] + b[j]. ShapeMismatch when dimensions disagree.
Array2D linear(const Array2D& x, const Array2D& w, const Array2D& bias_row);

// softmax(Q K^T / sqrt(d_k)) V over unmasked keys; masked keys get weight
// exactly 0. AllMasked when no key survives, ShapeMismatch otherwise.
Array2D scaled_dot_attention(const Array2D& q, const Array2D& k, const Array2D& v,
                             const std::vector<bool>& key_mask);

// -log(max(p[target], 1e-12)). NotADistribution / IndexOutOfRange on bad input.
double cross_entropy(std::span<const double> p, int target);

struct MhaParams {
    Array2D wq, bq, wk, bk, wv, bv, wo, bo;

    // Identity projections sized for inputs of width dim (reduction case).
    static MhaParams identity(int dim);
};

Array2D multi_head_attention(const Array2D& q, const Array2D& k, const Array2D& v,
                             const std::vector<bool>& key_mask, const MhaParams& params,
                             int heads);

// --- tape-level building blocks used by the encoders and the fusion head ---

ValueId scaled_dot_attention_node(Tape& tape, ValueId q, ValueId k, ValueId v,
                                  const std::vector<bool>& key_mask);

struct MhaParamIds {
    ValueId wq, bq, wk, bk, wv, bv, wo, bo;
};

// Split-project-attend-concat-project; per-head key width = hidden / heads
// (ConfigError when that does not divide). With one head and identity
// projections this reduces to scaled_dot_attention_node exactly.
ValueId multi_head_attention_node(Tape& tape, ValueId q, ValueId k, ValueId v,
                                  const std::vector<bool>& key_mask, const MhaParamIds& p,
                                  int heads);

}  // namespace veritab
