#pragma once

#include <string>

#include "veritab/params.hpp"
#include "veritab/tape.hpp"

namespace veritab {

// Pre-norm transformer encoder stack shared by the text and table encoders:
// per layer x += MHA(LN(x)) then x += FFN(LN(x)), with a final layer norm.
// Self-attention sees no padding (sequences are packed exactly), so every
// key is unmasked.
struct StackConfig {
    int dim = 64;
    int layers = 2;
    int heads = 4;
    int ffn_hidden = 128;
    std::string prefix;  // parameter name prefix, e.g. "text/"
};

void init_stack_params(const StackConfig& cfg, ParameterStore& store, RngState& rng);

// token_states: L x dim node; returns the final-layer states (L x dim).
ValueId run_stack(const StackConfig& cfg, Tape& tape, ParameterStore& store, ValueId token_states);

}  // namespace veritab
