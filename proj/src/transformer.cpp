#include "veritab/transformer.hpp"

#include "veritab/errors.hpp"
#include "veritab/primitives.hpp"

namespace veritab {

namespace {

std::string layer_prefix(const StackConfig& cfg, int layer) {
    return cfg.prefix + "layer" + std::to_string(layer) + "/";
}

}  // namespace

void init_stack_params(const StackConfig& cfg, ParameterStore& store, RngState& rng) {
    if (cfg.heads <= 0 || cfg.dim % cfg.heads != 0)
        throw ConfigError("transformer stack: dim " + std::to_string(cfg.dim) +
                          " not divisible by heads " + std::to_string(cfg.heads));
    for (int l = 0; l < cfg.layers; ++l) {
        const std::string p = layer_prefix(cfg, l);
        for (const char* w : {"attn/wq", "attn/wk", "attn/wv", "attn/wo"})
            store.create_xavier(p + w, cfg.dim, cfg.dim, rng);
        for (const char* b : {"attn/bq", "attn/bk", "attn/bv", "attn/bo"})
            store.create(p + b, 1, cfg.dim);
        store.create_ones(p + "ln1/gain", 1, cfg.dim);
        store.create(p + "ln1/bias", 1, cfg.dim);
        store.create_ones(p + "ln2/gain", 1, cfg.dim);
        store.create(p + "ln2/bias", 1, cfg.dim);
        store.create_xavier(p + "ffn/w1", cfg.dim, cfg.ffn_hidden, rng);
        store.create(p + "ffn/b1", 1, cfg.ffn_hidden);
        store.create_xavier(p + "ffn/w2", cfg.ffn_hidden, cfg.dim, rng);
        store.create(p + "ffn/b2", 1, cfg.dim);
    }
    store.create_ones(cfg.prefix + "final_ln/gain", 1, cfg.dim);
    store.create(cfg.prefix + "final_ln/bias", 1, cfg.dim);
}

ValueId run_stack(const StackConfig& cfg, Tape& tape, ParameterStore& store, ValueId token_states) {
    ValueId h = token_states;
    const std::vector<bool> all_keys(static_cast<size_t>(tape.value(token_states).rows), true);
    for (int l = 0; l < cfg.layers; ++l) {
        const std::string p = layer_prefix(cfg, l);
        ValueId ln1 = tape.layer_norm(h, tape.param(store, p + "ln1/gain"),
                                      tape.param(store, p + "ln1/bias"));
        MhaParamIds attn{tape.param(store, p + "attn/wq"), tape.param(store, p + "attn/bq"),
                         tape.param(store, p + "attn/wk"), tape.param(store, p + "attn/bk"),
                         tape.param(store, p + "attn/wv"), tape.param(store, p + "attn/bv"),
                         tape.param(store, p + "attn/wo"), tape.param(store, p + "attn/bo")};
        h = tape.add(h, multi_head_attention_node(tape, ln1, ln1, ln1, all_keys, attn, cfg.heads));

        ValueId ln2 = tape.layer_norm(h, tape.param(store, p + "ln2/gain"),
                                      tape.param(store, p + "ln2/bias"));
        ValueId ff = tape.linear(tape.relu(tape.linear(ln2, tape.param(store, p + "ffn/w1"),
                                                       tape.param(store, p + "ffn/b1"))),
                                 tape.param(store, p + "ffn/w2"), tape.param(store, p + "ffn/b2"));
        h = tape.add(h, ff);
    }
    return tape.layer_norm(h, tape.param(store, cfg.prefix + "final_ln/gain"),
                           tape.param(store, cfg.prefix + "final_ln/bias"));
}

}  // namespace veritab
