#include <cmath>

#include "doctest.h"
#include "reference_forward.hpp"
#include "veritab/errors.hpp"
#include "veritab/table_encoder.hpp"
#include "veritab/text_encoder.hpp"

using namespace veritab;

namespace {

Vocabulary tiny_vocab() {
    return Vocabulary::build({"tokyo tower height is 333 the a b c item span bridge 120 90 x y"}, 64);
}

EncoderConfig tiny_cfg(const std::string& variant, int layers = 1, int heads = 1, int dim = 4) {
    EncoderConfig cfg;
    cfg.variant = variant;
    cfg.embed_dim = dim;
    cfg.layers = layers;
    cfg.heads = heads;
    cfg.ffn_hidden = dim * 2;
    cfg.max_seq_len = 16;
    return cfg;
}

}  // namespace

TEST_CASE("pack_pair: structure, segments and truncation order") {
    const Vocabulary vocab = tiny_vocab();
    auto seq = pack_pair(vocab, "tokyo tower", "height is 333", 16);
    REQUIRE(seq.ids.size() == 7);
    CHECK(seq.ids[0] == Vocabulary::kCls);
    CHECK(seq.ids[1] == vocab.id("tokyo"));
    CHECK(seq.ids[2] == vocab.id("tower"));
    CHECK(seq.ids[3] == Vocabulary::kSep);
    CHECK(seq.ids[4] == vocab.id("height"));
    CHECK(seq.segment_ids == std::vector<int>{0, 0, 0, 0, 1, 1, 1});

    // Evidence tail goes first.
    seq = pack_pair(vocab, "tokyo tower", "height is 333", 6);
    CHECK(seq.ids.size() == 6);
    CHECK(seq.segment_ids == std::vector<int>{0, 0, 0, 0, 1, 1});

    // Then the claim tail; the sequence stays legal for any input.
    seq = pack_pair(vocab, "tokyo tower height is 333 the a b c", "x", 5);
    CHECK(seq.ids.size() == 5);
    CHECK(seq.ids[0] == Vocabulary::kCls);
    CHECK(seq.ids[4] == Vocabulary::kSep);
    CHECK(seq.segment_ids == std::vector<int>{0, 0, 0, 0, 0});

    // Empty claim and evidence still yield [CLS][SEP].
    seq = pack_pair(vocab, "", "", 16);
    CHECK(seq.ids == std::vector<int>{Vocabulary::kCls, Vocabulary::kSep});
}

TEST_CASE("text encoder: determinism, shape, claim == empty-evidence pair") {
    const Vocabulary vocab = tiny_vocab();
    for (const char* variant : {"learned", "sinusoidal"}) {
        const auto cfg = tiny_cfg(variant, 2, 2, 8);
        auto enc = make_text_encoder(cfg, vocab, "text/");
        ParameterStore store;
        RngState rng(5);
        enc->init_params(store, rng);

        const Claim claim{1, "tokyo tower height is 333", std::nullopt};
        const TextEvidence ev{"e", "the tower height is 333", "p"};

        const auto a = enc->encode_pair_values(store, claim, ev);
        const auto b = enc->encode_pair_values(store, claim, ev);
        CHECK(a == b);  // bitwise identical in eval mode
        CHECK(static_cast<int>(a.size()) == cfg.embed_dim);

        const auto claim_only = enc->encode_claim_values(store, claim);
        const auto empty_pair = enc->encode_pair_values(store, claim, TextEvidence{});
        CHECK(claim_only == empty_pair);
        CHECK(static_cast<int>(claim_only.size()) == cfg.embed_dim);
    }
}

TEST_CASE("text encoder matches the straight-line reference forward") {
    const Vocabulary vocab = tiny_vocab();
    const Claim claim{1, "tokyo", std::nullopt};  // 3-token input: [CLS] tokyo [SEP]

    for (const char* variant : {"learned", "sinusoidal"}) {
        const auto cfg = tiny_cfg(variant, 1, 1, 4);
        auto enc = make_text_encoder(cfg, vocab, "text/");
        ParameterStore store;
        RngState rng(17);
        enc->init_params(store, rng);

        const auto got = enc->encode_claim_values(store, claim);
        const auto seq = pack_pair(vocab, claim.text, "", cfg.max_seq_len);
        const auto want = refcalc::text_encoder_cls(store, "text/", cfg.layers, cfg.heads, seq.ids,
                                                    seq.segment_ids,
                                                    std::string(variant) == "learned");
        CHECK(refcalc::max_abs_diff(got, want) <= 1e-12);
    }

    CHECK_THROWS_AS(make_text_encoder(tiny_cfg("bogus"), vocab, "text/"), ConfigError);
}

TEST_CASE("linearize_table: single cell, row-major order, claim first") {
    const Vocabulary vocab = tiny_vocab();

    TableEvidence one;
    one.id = "t";
    one.cells = {{"x"}};
    auto seq = linearize_table(vocab, "", one, 16, 8, 8);
    CHECK(seq.ids == std::vector<int>{Vocabulary::kCls, Vocabulary::kSep, vocab.id("x")});
    CHECK(seq.row_ids == std::vector<int>{0, 0, 1});
    CHECK(seq.col_ids == std::vector<int>{0, 0, 1});
    CHECK(seq.segment_ids == std::vector<int>{0, 0, 1});

    TableEvidence grid;
    grid.id = "t2";
    grid.cells = {{"a", "b"}, {"c", "x"}};
    seq = linearize_table(vocab, "tokyo", grid, 32, 8, 8);
    // [CLS] tokyo [SEP] then cells in row-major order.
    CHECK(seq.ids.size() == 7);
    CHECK(seq.row_ids == std::vector<int>{0, 0, 0, 1, 1, 2, 2});
    CHECK(seq.col_ids == std::vector<int>{0, 0, 0, 1, 2, 1, 2});
    CHECK(seq.segment_ids == std::vector<int>{0, 0, 0, 1, 1, 1, 1});
}

TEST_CASE("linearize_table: hand-enumerated truncation at budget 8") {
    const Vocabulary vocab = tiny_vocab();
    TableEvidence t;
    t.id = "t3";
    // Cell (0,1) holds two tokens; 3x3 grid.
    t.cells = {{"a", "b c", "x"}, {"y", "item", "span"}, {"bridge", "120", "90"}};

    // Budget 8, claim "tokyo": prefix [CLS] tokyo [SEP] leaves 5 slots.
    // Cells fit whole or stop: "a"(1) -> 4 left, "b c"(2) -> 2 left,
    // "x"(1) -> 1 left, "y"(1) -> 0 left, "item" does not fit -> stop.
    const auto seq = linearize_table(vocab, "tokyo", t, 8, 8, 8);
    CHECK(seq.ids == std::vector<int>{Vocabulary::kCls, vocab.id("tokyo"), Vocabulary::kSep,
                                      vocab.id("a"), vocab.id("b"), vocab.id("c"), vocab.id("x"),
                                      vocab.id("y")});
    CHECK(seq.row_ids == std::vector<int>{0, 0, 0, 1, 1, 1, 1, 2});
    CHECK(seq.col_ids == std::vector<int>{0, 0, 0, 1, 2, 2, 3, 1});

    // A first cell that alone exceeds the remaining budget is split.
    TableEvidence huge;
    huge.id = "t4";
    huge.cells = {{"a b c x y item span bridge"}};
    const auto split = linearize_table(vocab, "tokyo", huge, 6, 8, 8);
    CHECK(split.ids.size() == 6);
    CHECK(split.ids[3] == vocab.id("a"));
    CHECK(split.ids[5] == vocab.id("c"));
}

TEST_CASE("linearize_table: structural sensitivity and grid-equality contract") {
    const Vocabulary vocab = tiny_vocab();
    TableEvidence t;
    t.id = "t";
    t.cells = {{"a", "b"}, {"c", "x"}};
    TableEvidence transposed;
    transposed.id = "t";
    transposed.cells = {{"a", "c"}, {"b", "x"}};

    const auto s1 = linearize_table(vocab, "tokyo", t, 32, 8, 8);
    const auto s2 = linearize_table(vocab, "tokyo", transposed, 32, 8, 8);
    CHECK(s1.ids != s2.ids);  // token order differs under transposition

    TableEvidence copy = t;
    copy.id = "different-id";
    copy.caption = std::nullopt;
    const auto s3 = linearize_table(vocab, "tokyo", copy, 32, 8, 8);
    CHECK(s1.ids == s3.ids);
    CHECK(s1.row_ids == s3.row_ids);
    CHECK(s1.col_ids == s3.col_ids);
    CHECK(s1.segment_ids == s3.segment_ids);
}

TEST_CASE("linearize_table clamps oversized grids to the row/col window") {
    const Vocabulary vocab = tiny_vocab();
    TableEvidence big;
    big.id = "big";
    big.cells.assign(5, std::vector<std::string>(5, "x"));
    const auto seq = linearize_table(vocab, "", big, 64, 3, 2);
    for (size_t i = 0; i < seq.ids.size(); ++i) {
        CHECK(seq.row_ids[i] <= 3);
        CHECK(seq.col_ids[i] <= 2);
    }
    CHECK(seq.ids.size() == 2 + 3 * 2);  // [CLS][SEP] + clamped grid
}

TEST_CASE("table encoder: determinism, shape, reference forward") {
    const Vocabulary vocab = tiny_vocab();
    const Claim claim{1, "bridge span is 120", std::nullopt};
    TableEvidence t;
    t.id = "t";
    t.caption = "span";
    t.cells = {{"bridge", "120"}};

    for (const char* variant : {"grid", "gridpos"}) {
        const auto cfg = tiny_cfg(variant, 1, 1, 4);
        auto enc = make_table_encoder(cfg, vocab, "tab/", 8, 8);
        ParameterStore store;
        RngState rng(23);
        enc->init_params(store, rng);

        const auto a = enc->encode_table_pair_values(store, claim, t);
        CHECK(a == enc->encode_table_pair_values(store, claim, t));
        CHECK(static_cast<int>(a.size()) == cfg.embed_dim);

        const auto seq = linearize_table(vocab, claim.text, t, cfg.max_seq_len, 8, 8);
        const auto want = refcalc::table_encoder_cls(store, "tab/", cfg.layers, cfg.heads, seq.ids,
                                                     seq.row_ids, seq.col_ids, seq.segment_ids,
                                                     std::string(variant) == "gridpos");
        CHECK(refcalc::max_abs_diff(a, want) <= 1e-12);
    }

    CHECK_THROWS_AS(make_table_encoder(tiny_cfg("bogus"), vocab, "tab/", 8, 8), ConfigError);
}

TEST_CASE("output dimension holds for any input length") {
    const Vocabulary vocab = tiny_vocab();
    const auto cfg = tiny_cfg("learned", 1, 2, 8);
    auto enc = make_text_encoder(cfg, vocab, "text/");
    ParameterStore store;
    RngState rng(2);
    enc->init_params(store, rng);

    for (const char* text : {"x", "tokyo tower height", "a b c item span bridge 120 90 x y tokyo tower height is 333 the"}) {
        const auto v = enc->encode_claim_values(store, Claim{1, text, std::nullopt});
        CHECK(static_cast<int>(v.size()) == cfg.embed_dim);
    }
}
