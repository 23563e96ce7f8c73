#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "veritab/config_io.hpp"
#include "veritab/errors.hpp"
#include "veritab/synth.hpp"
#include "veritab/train.hpp"

using namespace veritab;

namespace {

ModelConfig toy_model() {
    ModelConfig m;
    m.embed_dim = 16;
    m.layers = 1;
    m.heads = 2;
    m.ffn_hidden = 32;
    m.vocab_size = 512;
    m.max_seq_len = 32;
    m.attention_hidden = 16;
    m.attention_heads = 2;
    m.mlp_hidden = 16;
    m.max_table_rows = 8;
    m.max_table_cols = 8;
    return m;
}

SynthOutput tiny_data(const std::string& task = "joint", int n_train = 60, uint64_t seed = 2) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.n_train = n_train;
    cfg.n_dev = 30;
    cfg.n_test = 30;
    cfg.task = task;
    return generate(cfg);
}

std::string params_digest(const ParameterStore& store) {
    // order-stable textual digest for bitwise comparisons
    std::string out;
    for (const auto& [name, e] : store.entries()) {
        out += name;
        for (double v : e.value.data) {
            char buf[32];
            snprintf(buf, sizeof buf, "%a,", v);
            out += buf;
        }
    }
    return out;
}

}  // namespace

TEST_CASE("label_accuracy: direct counts and error paths") {
    CHECK(label_accuracy({Label::kSupported, Label::kRefuted}, {Label::kSupported, Label::kRefuted}) == 100.0);
    const double acc = label_accuracy({Label::kSupported, Label::kRefuted, Label::kNotEnoughInfo},
                                      {Label::kSupported, Label::kSupported, Label::kNotEnoughInfo});
    CHECK(std::abs(acc - 66.67) <= 0.01);
    CHECK_THROWS_AS(label_accuracy({}, {}), EmptyInput);
    CHECK_THROWS_AS(label_accuracy({Label::kSupported}, {}), ShapeMismatch);
}

TEST_CASE("feverous_score: definition, collapse, ordering property") {
    // labels correct [T,T,F]; gold_complete [T,F,T] -> only claim 1 counts.
    const std::vector<Label> preds{Label::kSupported, Label::kRefuted, Label::kSupported};
    const std::vector<Label> golds{Label::kSupported, Label::kRefuted, Label::kNotEnoughInfo};
    const double score = feverous_score(preds, golds, {true, false, true});
    CHECK(std::abs(score - 33.33) <= 0.01);

    // All flags true: equals label accuracy exactly.
    CHECK(feverous_score(preds, golds, {true, true, true}) == label_accuracy(preds, golds));

    // Property over random prediction sets: score <= accuracy always.
    RngState rng(14);
    for (int it = 0; it < 1000; ++it) {
        const int n = 1 + rng.next_int(12);
        std::vector<Label> p, g;
        std::vector<bool> f;
        for (int i = 0; i < n; ++i) {
            p.push_back(static_cast<Label>(rng.next_int(3)));
            g.push_back(static_cast<Label>(rng.next_int(3)));
            f.push_back(rng.next_int(2) == 1);
        }
        CHECK(feverous_score(p, g, f) <= label_accuracy(p, g) + 1e-12);
    }

    CHECK_THROWS_AS(feverous_score({}, {}, {}), EmptyInput);
}

TEST_CASE("model: zero-evidence claims predict NEI without running encoders") {
    const auto data = tiny_data();
    Vocabulary vocab = build_vocabulary(data.train, 512);
    VerdictModel model(toy_model(), std::move(vocab), 3);

    ClaimRecord empty;
    empty.claim = {99, "dora mass is 3", Label::kSupported};
    const auto pred = model.predict(empty);
    CHECK(pred.label == Label::kNotEnoughInfo);
    CHECK(!pred.used_model);
    CHECK(pred.dist.p[2] == 1.0);

    Tape tape;
    CHECK_THROWS_AS(model.forward_probs(tape, empty, Modality::kBoth, Mode::kEval, nullptr),
                    NoEvidence);
}

TEST_CASE("model: modality masking degenerates cleanly to one modality") {
    const auto data = tiny_data();
    Vocabulary vocab = build_vocabulary(data.train, 512);
    VerdictModel model(toy_model(), std::move(vocab), 3);

    const ClaimRecord& r = data.train.records[0];
    REQUIRE(!r.text_evidence.empty());
    REQUIRE(!r.table_evidence.empty());

    // text-only and table-only must run without error (Table-3 plumbing).
    const auto p_text = model.predict(r, Modality::kTextOnly);
    const auto p_table = model.predict(r, Modality::kTableOnly);
    const auto p_both = model.predict(r, Modality::kBoth);
    CHECK(p_text.used_model);
    CHECK(p_table.used_model);
    CHECK(p_both.used_model);

    // A record with only text evidence, evaluated table-only, falls back to NEI.
    ClaimRecord text_only_rec = r;
    text_only_rec.table_evidence.clear();
    const auto fallback = model.predict(text_only_rec, Modality::kTableOnly);
    CHECK(fallback.label == Label::kNotEnoughInfo);
    CHECK(!fallback.used_model);
}

TEST_CASE("model: eval forward is bitwise deterministic") {
    const auto data = tiny_data();
    Vocabulary vocab = build_vocabulary(data.train, 512);
    VerdictModel model(toy_model(), std::move(vocab), 7);

    const ClaimRecord& r = data.train.records[1];
    const auto a = model.predict(r);
    const auto b = model.predict(r);
    CHECK(a.dist.p == b.dist.p);
    CHECK(a.label == b.label);
}

TEST_CASE("evaluate: confusion counts, zero-evidence policy, precondition") {
    auto data = tiny_data();
    Vocabulary vocab = build_vocabulary(data.train, 512);
    VerdictModel model(toy_model(), std::move(vocab), 5);

    // Inject a zero-evidence record: it must be scored as NEI.
    ClaimRecord zero;
    zero.claim = {424242, "vevo mass is 1", Label::kNotEnoughInfo};
    zero.gold_complete = true;
    data.dev.records.push_back(zero);

    const EvalReport rep = evaluate(model, data.dev);
    CHECK(rep.n_claims == static_cast<int>(data.dev.records.size()));
    int64_t total = 0;
    for (int g = 0; g < 3; ++g)
        for (int p = 0; p < 3; ++p) total += rep.confusion[g][p];
    CHECK(total == rep.n_claims);
    CHECK(rep.feverous_score <= rep.label_accuracy + 1e-12);

    // Cross-check the aggregate against per-claim predictions.
    std::vector<Label> preds, golds;
    std::vector<bool> flags;
    for (const ClaimRecord& r : data.dev.records) {
        preds.push_back(model.predict(r).label);
        golds.push_back(*r.claim.gold);
        flags.push_back(r.gold_complete);
    }
    CHECK(rep.label_accuracy == label_accuracy(preds, golds));
    CHECK(rep.feverous_score == feverous_score(preds, golds, flags));

    // all gold_complete=false -> score 0 regardless of accuracy.
    for (ClaimRecord& r : data.dev.records) r.gold_complete = false;
    const EvalReport rep0 = evaluate(model, data.dev);
    CHECK(rep0.feverous_score == 0.0);

    Dataset empty;
    CHECK_THROWS_AS(evaluate(model, empty), EmptyDataset);

    Dataset unlabeled;
    ClaimRecord u;
    u.claim = {1, "x", std::nullopt};
    unlabeled.records.push_back(u);
    CHECK_THROWS_AS(evaluate(model, unlabeled), UnknownLabel);
}

TEST_CASE("train: lr=0 leaves parameters identical to initialization") {
    const auto data = tiny_data("joint", 30);
    Vocabulary vocab = build_vocabulary(data.train, 512);

    TrainConfig cfg;
    cfg.seed = 9;
    cfg.learning_rate = 0.0;
    cfg.batch_size = 8;
    cfg.max_epochs = 2;
    cfg.patience = 2;
    cfg.model = toy_model();

    VerdictModel model(cfg.model, std::move(vocab), cfg.seed);
    const std::string before = params_digest(model.params());
    const TrainResult result = train(cfg, model, data.train, data.dev);
    CHECK(params_digest(model.params()) == before);
    CHECK(!result.history.empty());
}

TEST_CASE("train: fixed seed and data give identical history and parameters") {
    const auto data = tiny_data("joint", 40);

    TrainConfig cfg;
    cfg.seed = 17;
    cfg.learning_rate = 2e-3;
    cfg.batch_size = 8;
    cfg.max_epochs = 2;
    cfg.patience = 2;
    cfg.model = toy_model();

    const auto run = [&]() {
        Vocabulary vocab = build_vocabulary(data.train, 512);
        VerdictModel model(cfg.model, std::move(vocab), cfg.seed);
        TrainResult r = train(cfg, model, data.train, data.dev);
        return std::pair{r, params_digest(model.params())};
    };

    const auto [r1, d1] = run();
    const auto [r2, d2] = run();
    CHECK(d1 == d2);
    REQUIRE(r1.history.size() == r2.history.size());
    for (size_t i = 0; i < r1.history.size(); ++i) {
        CHECK(r1.history[i].train_loss == r2.history[i].train_loss);
        CHECK(r1.history[i].dev_loss == r2.history[i].dev_loss);
        CHECK(r1.history[i].dev_label_accuracy == r2.history[i].dev_label_accuracy);
    }
}

TEST_CASE("train: early stopping never overruns patience past the best epoch") {
    const auto data = tiny_data("joint", 40);
    Vocabulary vocab = build_vocabulary(data.train, 512);

    TrainConfig cfg;
    cfg.seed = 4;
    cfg.learning_rate = 0.0;  // dev loss can never improve after epoch 1
    cfg.batch_size = 16;
    cfg.max_epochs = 6;
    cfg.patience = 2;
    cfg.model = toy_model();

    VerdictModel model(cfg.model, std::move(vocab), cfg.seed);
    const TrainResult result = train(cfg, model, data.train, data.dev);
    const int last_epoch = result.history.back().epoch;
    CHECK(last_epoch - result.best_epoch <= cfg.patience);
    CHECK(last_epoch < cfg.max_epochs);  // stopped early
}

TEST_CASE("checkpoint: save then load reproduces eval outputs bitwise") {
    const auto data = tiny_data("joint", 30);
    Vocabulary vocab = build_vocabulary(data.train, 512);

    TrainConfig cfg;
    cfg.seed = 23;
    cfg.learning_rate = 1e-3;
    cfg.batch_size = 8;
    cfg.max_epochs = 1;
    cfg.patience = 1;
    cfg.model = toy_model();

    VerdictModel model(cfg.model, std::move(vocab), cfg.seed);
    train(cfg, model, data.train, data.dev);

    const std::filesystem::path dir = "veritab_ckpt_test";
    std::filesystem::create_directories(dir);
    CheckpointMeta meta;
    meta.epoch = 1;
    meta.config = cfg;
    save_checkpoint((dir / "ckpt.json").string(), model, meta);

    auto loaded = load_checkpoint((dir / "ckpt.json").string());
    CHECK(params_digest(loaded.model.params()) == params_digest(model.params()));
    for (const ClaimRecord& r : data.dev.records) {
        const auto a = model.predict(r);
        const auto b = loaded.model.predict(r);
        CHECK(a.dist.p == b.dist.p);
    }
    CHECK(loaded.meta.config.model.embed_dim == cfg.model.embed_dim);

    // Byte-stable checkpoint writing (same model saved twice).
    std::filesystem::create_directories(dir / "again");
    save_checkpoint((dir / "again" / "ckpt.json").string(), model, meta);
    std::ifstream f1(dir / "ckpt.json"), f2(dir / "again" / "ckpt.json");
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());

    std::filesystem::remove_all(dir);
}

TEST_CASE("config json round trip and unknown-key rejection") {
    TrainConfig cfg;
    cfg.seed = 42;
    cfg.model.embed_dim = 24;
    const auto j = train_config_to_json(cfg);
    const TrainConfig back = train_config_from_json(j);
    CHECK(back.seed == cfg.seed);
    CHECK(back.model.embed_dim == 24);

    auto bad = j;
    bad["learning_rado"] = 0.1;
    try {
        train_config_from_json(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("learning_rado") != std::string::npos);
    }

    auto bad_model = j;
    bad_model["model"]["embedd_im"] = 8;
    CHECK_THROWS_AS(train_config_from_json(bad_model), ConfigError);

    auto bad_patience = j;
    bad_patience["patience"] = 99;
    CHECK_THROWS_AS(train_config_from_json(bad_patience), ConfigError);
}
