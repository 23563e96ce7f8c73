#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "veritab/data.hpp"

using namespace veritab;

#ifndef VERITAB_FIXTURE_DIR
#define VERITAB_FIXTURE_DIR "tests/fixtures"
#endif

namespace {
const std::string kFixtures = VERITAB_FIXTURE_DIR;
}

TEST_CASE("labels round-trip and reject junk") {
    CHECK(label_from_string("S") == Label::kSupported);
    CHECK(label_from_string("R") == Label::kRefuted);
    CHECK(label_from_string("NEI") == Label::kNotEnoughInfo);
    CHECK(label_to_string(Label::kRefuted) == "R");
    CHECK_THROWS_AS(label_from_string("supported"), UnknownLabel);
}

TEST_CASE("resolve_table: single cell, sparse fillers, conflicts") {
    auto t = resolve_table("t", {{0, 0, "x", false}}, std::nullopt);
    CHECK(t.rows() == 1);
    CHECK(t.columns() == 1);
    CHECK(t.cells[0][0] == "x");
    CHECK(t.header_rows == 0);

    t = resolve_table("t", {{0, 0, "a", false}, {1, 1, "b", false}}, std::nullopt);
    CHECK(t.rows() == 2);
    CHECK(t.columns() == 2);
    CHECK(t.cells[0][1] == "");
    CHECK(t.cells[1][0] == "");

    CHECK_THROWS_AS(resolve_table("t", {{0, 0, "a", false}, {0, 0, "b", false}}, std::nullopt),
                    ConflictingCell);
    // Identical duplicates are tolerated.
    CHECK_NOTHROW(resolve_table("t", {{0, 0, "a", false}, {0, 0, "a", true}}, std::nullopt));
    CHECK_THROWS_AS(resolve_table("t", {{-1, 0, "a", false}}, std::nullopt), ConflictingCell);
}

TEST_CASE("resolve_table: 12-cell fixture with a ragged last row") {
    // 3 full columns over rows 0..2 plus a lone cell in row 3: grid is 4x3
    // with the last row padded. Expected grid written out by hand.
    std::vector<RawCell> cells;
    const char* contents[4][3] = {{"name", "mass", "age"},
                                  {"ada", "70", "36"},
                                  {"ben", "82", "41"},
                                  {"cyd", "", ""}};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) cells.push_back({r, c, contents[r][c], r == 0});
    cells.push_back({3, 0, "cyd", false});
    REQUIRE(cells.size() == 10);  // 10 provided cells -> 12-slot grid

    const auto t = resolve_table("ragged", cells, std::string("people"));
    CHECK(t.rows() == 4);
    CHECK(t.columns() == 3);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 3; ++c) CHECK(t.cells[r][c] == contents[r][c]);
    CHECK(t.header_rows == 1);
    CHECK(t.header_cols == 0);
    CHECK(t.caption == "people");
}

TEST_CASE("resolve_table header aggregation counts leading rows and columns") {
    // Full header row 0 and full header column 0.
    const auto t = resolve_table("hdr",
                                 {{0, 0, "k", true},
                                  {0, 1, "a", true},
                                  {1, 0, "b", true},
                                  {1, 1, "7", false}},
                                 std::nullopt);
    CHECK(t.header_rows == 1);
    CHECK(t.header_cols == 1);
}

TEST_CASE("load_dataset: malformed-line fixture with exact skip accounting") {
    const auto [ds, report] = load_dataset(kFixtures + "/mixed_ten_lines.jsonl", Split::kTrain);
    CHECK(report.loaded == 8);
    CHECK(ds.records.size() == 8);
    REQUIRE(report.skipped.size() == 2);
    CHECK(report.skipped[0].line_number == 3);
    CHECK(report.skipped[1].line_number == 7);

    // Order preserved; fields round-trip.
    CHECK(ds.records[0].claim.id == 1);
    CHECK(ds.records[0].claim.gold == Label::kSupported);
    CHECK(ds.records[1].table_evidence.size() == 1);
    CHECK(ds.records[1].table_evidence[0].header_rows == 1);
    CHECK(ds.records[1].table_evidence[0].caption == "spans");
    CHECK(ds.records[2].claim.id == 4);
}

TEST_CASE("load_dataset: determinism, missing file, empty dataset") {
    const std::string path = kFixtures + "/mixed_ten_lines.jsonl";
    const auto [a, ra] = load_dataset(path, Split::kTrain);
    const auto [b, rb] = load_dataset(path, Split::kTrain);
    REQUIRE(a.records.size() == b.records.size());
    for (size_t i = 0; i < a.records.size(); ++i)
        CHECK(semantically_equal(a.records[i], b.records[i]));

    CHECK_THROWS_AS(load_dataset("no_such_file.jsonl", Split::kTrain), FileNotFound);

    const std::string empty_path = "veritab_empty_test.jsonl";
    std::ofstream(empty_path).close();
    CHECK_THROWS_AS(load_dataset(empty_path, Split::kTrain), EmptyDataset);
    std::filesystem::remove(empty_path);
}

TEST_CASE("load_dataset: labels required for train/dev, optional for test") {
    const std::string path = "veritab_label_test.jsonl";
    {
        std::ofstream out(path);
        out << R"({"claim_id": 1, "claim": "x y", "gold_complete": true, "text_evidence": [], "table_evidence": []})"
            << '\n';
        out << R"({"claim_id": 2, "claim": "x z", "label": "S", "gold_complete": true, "text_evidence": [], "table_evidence": []})"
            << '\n';
    }
    const auto [train_ds, train_report] = load_dataset(path, Split::kTrain);
    CHECK(train_report.loaded == 1);  // unlabeled line skipped
    CHECK(train_report.skipped.size() == 1);

    const auto [test_ds, test_report] = load_dataset(path, Split::kTest);
    CHECK(test_report.loaded == 2);
    CHECK(!test_ds.records[0].claim.gold.has_value());
    std::filesystem::remove(path);
}

TEST_CASE("load_dataset rejects duplicate claim ids within a split") {
    const std::string path = "veritab_dup_test.jsonl";
    {
        std::ofstream out(path);
        for (int i = 0; i < 2; ++i)
            out << R"({"claim_id": 9, "claim": "same id", "label": "S", "gold_complete": true, "text_evidence": [], "table_evidence": []})"
                << '\n';
    }
    const auto [ds, report] = load_dataset(path, Split::kTrain);
    CHECK(report.loaded == 1);
    CHECK(report.skipped.size() == 1);
    std::filesystem::remove(path);
}

TEST_CASE("serialize then load is semantically identical") {
    const auto [ds, report] = load_dataset(kFixtures + "/mixed_ten_lines.jsonl", Split::kTrain);
    const std::string path = "veritab_roundtrip_test.jsonl";
    save_dataset(ds, path);
    const auto [ds2, report2] = load_dataset(path, Split::kTrain);
    CHECK(report2.skipped.empty());
    REQUIRE(ds2.records.size() == ds.records.size());
    for (size_t i = 0; i < ds.records.size(); ++i)
        CHECK(semantically_equal(ds.records[i], ds2.records[i]));
    std::filesystem::remove(path);
}

TEST_CASE("select_evidence honors retrieval order and budgets") {
    ClaimRecord r;
    for (int i = 0; i < 8; ++i)
        r.text_evidence.push_back({"s" + std::to_string(i), "sentence " + std::to_string(i), "p"});
    for (int i = 0; i < 3; ++i) {
        TableEvidence t;
        t.id = "t" + std::to_string(i);
        t.cells = {{"x"}};
        r.table_evidence.push_back(std::move(t));
    }

    const auto [text, tables] = select_evidence(r);
    REQUIRE(text.size() == 5);
    REQUIRE(tables.size() == 2);
    for (int i = 0; i < 5; ++i) CHECK(text[i].id == "s" + std::to_string(i));
    CHECK(tables[0].id == "t0");
    CHECK(tables[1].id == "t1");

    ClaimRecord empty;
    const auto [t0, t1] = select_evidence(empty);
    CHECK(t0.empty());
    CHECK(t1.empty());

    ClaimRecord small;
    small.text_evidence = {r.text_evidence[0], r.text_evidence[1]};
    small.table_evidence = {r.table_evidence[0]};
    const auto [st, stab] = select_evidence(small);
    CHECK(st.size() == 2);
    CHECK(stab.size() == 1);
}
