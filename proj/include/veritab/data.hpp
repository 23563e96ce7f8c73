#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "veritab/errors.hpp"

namespace veritab {

enum class Label { kSupported = 0, kRefuted = 1, kNotEnoughInfo = 2 };

// "S" | "R" | "NEI"; from_string throws UnknownLabel.
std::string label_to_string(Label l);
Label label_from_string(const std::string& s);

struct Claim {
    int64_t id = 0;
    std::string text;
    std::optional<Label> gold;
};

struct TextEvidence {
    std::string id;
    std::string sentence;  // non-empty
    std::string source;
};

struct TableEvidence {
    std::string id;
    std::vector<std::vector<std::string>> cells;  // rectangular grid
    int header_rows = 0;
    int header_cols = 0;
    std::optional<std::string> caption;
    std::vector<std::pair<int, int>> highlighted;  // metadata only, not serialized

    int rows() const { return static_cast<int>(cells.size()); }
    int columns() const { return cells.empty() ? 0 : static_cast<int>(cells[0].size()); }
};

struct RawCell {
    int row = 0;
    int col = 0;
    std::string content;
    bool is_header = false;
};

// Builds a rectangular grid sized by the maximum coordinates; absent cells
// become empty strings. Two cells on the same coordinates with different
// content raise ConflictingCell. Header flags aggregate into leading
// header_rows / header_cols counts.
TableEvidence resolve_table(const std::string& id, const std::vector<RawCell>& cells,
                            const std::optional<std::string>& caption);

struct ClaimRecord {
    Claim claim;
    bool gold_complete = false;
    std::vector<TextEvidence> text_evidence;
    std::vector<TableEvidence> table_evidence;
};

enum class Split { kTrain, kDev, kTest };
std::string split_to_string(Split s);

struct Dataset {
    std::vector<ClaimRecord> records;
    Split split = Split::kTrain;
};

struct SkippedLine {
    int line_number = 0;  // 1-based
    std::string reason;
};

struct LoadReport {
    int loaded = 0;
    std::vector<SkippedLine> skipped;
};

// One JSON object per line (schema in the README). Malformed lines are
// skipped and reported with their line numbers; gold labels are required for
// train/dev splits. Throws FileNotFound / EmptyDataset.
std::pair<Dataset, LoadReport> load_dataset(const std::string& path, Split split);

// Serializes with sorted keys, one record per line; byte-deterministic.
void save_dataset(const Dataset& ds, const std::string& path);
std::string record_to_json_line(const ClaimRecord& r);
ClaimRecord record_from_json_line(const std::string& line, bool require_label);

// First budget_text text items and first budget_table table items in stored
// (retrieval rank) order; shorter lists pass through unchanged.
std::pair<std::vector<TextEvidence>, std::vector<TableEvidence>> select_evidence(
    const ClaimRecord& r, int budget_text = 5, int budget_table = 2);

bool semantically_equal(const ClaimRecord& a, const ClaimRecord& b);

}  // namespace veritab
