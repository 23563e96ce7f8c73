#include <set>

#include "doctest.h"
#include "veritab/gradcheck.hpp"

using namespace veritab;

namespace {

GradCheckConfig small_config() {
    GradCheckConfig cfg;
    cfg.model.embed_dim = 16;
    cfg.model.layers = 1;
    cfg.model.heads = 2;
    cfg.model.ffn_hidden = 32;
    cfg.model.vocab_size = 64;
    cfg.model.max_seq_len = 32;
    cfg.model.attention_hidden = 16;
    cfg.model.attention_heads = 2;
    cfg.model.mlp_hidden = 16;
    cfg.model.max_table_rows = 8;
    cfg.model.max_table_cols = 8;
    return cfg;
}

}  // namespace

TEST_CASE("gradcheck passes on a small stack, sampled and full") {
    GradCheckConfig cfg = small_config();
    cfg.samples_per_group = 6;
    auto report = run_gradcheck(cfg);
    CHECK(report.pass);
    CHECK(report.max_rel_err <= cfg.tolerance);

    cfg.full = true;  // every scalar entry
    report = run_gradcheck(cfg);
    CHECK(report.pass);
}

TEST_CASE("gradcheck lists every parameter group exactly once") {
    GradCheckConfig cfg = small_config();
    cfg.samples_per_group = 2;
    const auto report = run_gradcheck(cfg);

    std::set<std::string> names;
    for (const auto& g : report.groups) {
        CHECK(names.insert(g.name).second);  // no duplicates
        CHECK(g.checked >= 1);
    }
    // Both encoders and the fusion head are covered.
    CHECK(names.count("text/tok_emb"));
    CHECK(names.count("tab/row_emb"));
    CHECK(names.count("tab/col_emb"));
    CHECK(names.count("fusion/mlp/w3"));
    CHECK(names.count("text/layer0/attn/wq"));
}

TEST_CASE("gradcheck fails loudly when a gradient is corrupted") {
    GradCheckConfig cfg = small_config();
    cfg.samples_per_group = 4;
    cfg.corrupt_group = "fusion/mlp/w2";
    const auto report = run_gradcheck(cfg);
    CHECK(!report.pass);
    for (const auto& g : report.groups)
        if (g.name == "fusion/mlp/w2") CHECK(!g.pass);
}
