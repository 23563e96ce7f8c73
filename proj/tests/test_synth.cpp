#include <sstream>

#include "doctest.h"
#include "synth_oracle.hpp"
#include "veritab/errors.hpp"
#include "veritab/synth.hpp"

using namespace veritab;

namespace {

std::string serialize(const Dataset& ds) {
    std::ostringstream out;
    for (const ClaimRecord& r : ds.records) out << record_to_json_line(r) << '\n';
    return out.str();
}

SynthConfig small_cfg(const std::string& task, uint64_t seed = 11) {
    SynthConfig cfg;
    cfg.seed = seed;
    cfg.n_train = 300;
    cfg.n_dev = 60;
    cfg.n_test = 60;
    cfg.task = task;
    return cfg;
}

}  // namespace

TEST_CASE("generate: identical seeds give byte-identical output") {
    const auto a = generate(small_cfg("joint"));
    const auto b = generate(small_cfg("joint"));
    CHECK(serialize(a.train) == serialize(b.train));
    CHECK(serialize(a.dev) == serialize(b.dev));
    CHECK(serialize(a.test) == serialize(b.test));

    const auto c = generate(small_cfg("joint", 12));
    CHECK(serialize(a.train) != serialize(c.train));
}

TEST_CASE("generate: counts, label balance, record shape") {
    const auto out = generate(small_cfg("joint"));
    CHECK(out.train.records.size() == 300);
    CHECK(out.dev.records.size() == 60);
    CHECK(out.test.records.size() == 60);

    int counts[3] = {0, 0, 0};
    for (const ClaimRecord& r : out.train.records) {
        ++counts[static_cast<int>(*r.claim.gold)];
        CHECK(r.text_evidence.size() == 5);
        CHECK(r.table_evidence.size() == 2);
        CHECK(r.gold_complete);
    }
    for (int c : counts) {
        CHECK(c >= 95);  // within 5% of 100
        CHECK(c <= 105);
    }

    // Splits are disjoint by claim id.
    CHECK(out.train.records.back().claim.id < out.dev.records.front().claim.id);
    CHECK(out.dev.records.back().claim.id < out.test.records.front().claim.id);
}

TEST_CASE("oracle relabeling reproduces every generated label") {
    for (const char* task : {"joint", "text_only", "table_only"}) {
        SynthConfig cfg = small_cfg(task, 21);
        cfg.n_train = 1000;
        const auto out = generate(cfg);
        for (const ClaimRecord& r : out.train.records)
            CHECK(synth_oracle::relabel(r, task) == *r.claim.gold);
    }
}

TEST_CASE("joint task: hiding either modality starves the oracle (>= 25%)") {
    SynthConfig cfg = small_cfg("joint", 33);
    cfg.n_train = 1000;
    const auto out = generate(cfg);

    int disagree_no_tables = 0, disagree_no_text = 0;
    for (const ClaimRecord& r : out.train.records) {
        if (synth_oracle::relabel(r, "joint", true, false) != *r.claim.gold) ++disagree_no_tables;
        if (synth_oracle::relabel(r, "joint", false, true) != *r.claim.gold) ++disagree_no_text;
    }
    CHECK(disagree_no_tables >= 250);
    CHECK(disagree_no_text >= 250);
}

TEST_CASE("single-modality tasks stay decidable from their own modality") {
    {
        const auto out = generate(small_cfg("text_only", 5));
        for (const ClaimRecord& r : out.train.records)
            CHECK(synth_oracle::relabel(r, "text_only", true, false) == *r.claim.gold);
    }
    {
        const auto out = generate(small_cfg("table_only", 5));
        for (const ClaimRecord& r : out.train.records)
            CHECK(synth_oracle::relabel(r, "table_only", false, true) == *r.claim.gold);
    }
}

TEST_CASE("generate rejects bad configs") {
    SynthConfig cfg = small_cfg("joint");
    cfg.n_train = 0;
    CHECK_THROWS_AS(generate(cfg), ConfigError);

    cfg = small_cfg("nonsense_task");
    CHECK_THROWS_AS(generate(cfg), ConfigError);

    cfg = small_cfg("joint");
    cfg.n_entities = 1;
    CHECK_THROWS_AS(generate(cfg), ConfigError);

    cfg = small_cfg("joint");
    cfg.n_values = 1;
    CHECK_THROWS_AS(generate(cfg), ConfigError);
}

TEST_CASE("generated records survive a serialize/load round trip") {
    const auto out = generate(small_cfg("joint", 3));
    const std::string path = "veritab_synth_roundtrip.jsonl";
    save_dataset(out.train, path);
    const auto [loaded, report] = load_dataset(path, Split::kTrain);
    CHECK(report.skipped.empty());
    REQUIRE(loaded.records.size() == out.train.records.size());
    for (size_t i = 0; i < loaded.records.size(); ++i)
        CHECK(semantically_equal(loaded.records[i], out.train.records[i]));
    std::remove(path.c_str());
}
