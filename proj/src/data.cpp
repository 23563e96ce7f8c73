#include "veritab/data.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace veritab {

using nlohmann::json;

std::string label_to_string(Label l) {
    switch (l) {
        case Label::kSupported: return "S";
        case Label::kRefuted: return "R";
        case Label::kNotEnoughInfo: return "NEI";
    }
    throw UnknownLabel("label_to_string: bad enum value");
}

Label label_from_string(const std::string& s) {
    if (s == "S") return Label::kSupported;
    if (s == "R") return Label::kRefuted;
    if (s == "NEI") return Label::kNotEnoughInfo;
    throw UnknownLabel("unknown label '" + s + "' (expected S, R or NEI)");
}

std::string split_to_string(Split s) {
    switch (s) {
        case Split::kTrain: return "train";
        case Split::kDev: return "dev";
        case Split::kTest: return "test";
    }
    return "?";
}

TableEvidence resolve_table(const std::string& id, const std::vector<RawCell>& cells,
                            const std::optional<std::string>& caption) {
    int max_row = -1, max_col = -1;
    for (const RawCell& c : cells) {
        if (c.row < 0 || c.col < 0)
            throw ConflictingCell("resolve_table: negative coordinates in table '" + id + "'");
        max_row = std::max(max_row, c.row);
        max_col = std::max(max_col, c.col);
    }

    TableEvidence t;
    t.id = id;
    t.caption = caption;
    if (max_row < 0) return t;  // no cells: empty grid

    const int rows = max_row + 1, cols = max_col + 1;
    t.cells.assign(static_cast<size_t>(rows), std::vector<std::string>(static_cast<size_t>(cols)));
    std::vector<std::vector<int>> state(static_cast<size_t>(rows),
                                        std::vector<int>(static_cast<size_t>(cols), 0));  // 0=absent 1=plain 2=header
    for (const RawCell& c : cells) {
        auto& slot = t.cells[static_cast<size_t>(c.row)][static_cast<size_t>(c.col)];
        int& st = state[static_cast<size_t>(c.row)][static_cast<size_t>(c.col)];
        if (st != 0 && slot != c.content)
            throw ConflictingCell("resolve_table: cell (" + std::to_string(c.row) + "," +
                                  std::to_string(c.col) + ") of table '" + id +
                                  "' given two different contents");
        slot = c.content;
        st = c.is_header ? 2 : 1;
    }

    // Leading rows (then columns) whose provided cells are all header-flagged.
    for (int r = 0; r < rows; ++r) {
        bool any = false, all = true;
        for (int c = 0; c < cols; ++c) {
            if (state[static_cast<size_t>(r)][static_cast<size_t>(c)] == 0) continue;
            any = true;
            all = all && state[static_cast<size_t>(r)][static_cast<size_t>(c)] == 2;
        }
        if (!(any && all)) break;
        ++t.header_rows;
    }
    for (int c = 0; c < cols; ++c) {
        bool any = false, all = true;
        for (int r = 0; r < rows; ++r) {
            if (state[static_cast<size_t>(r)][static_cast<size_t>(c)] == 0) continue;
            any = true;
            all = all && state[static_cast<size_t>(r)][static_cast<size_t>(c)] == 2;
        }
        if (!(any && all)) break;
        ++t.header_cols;
    }
    return t;
}

namespace {

json table_to_json(const TableEvidence& t) {
    json cells = json::array();
    for (int r = 0; r < t.rows(); ++r)
        for (int c = 0; c < t.columns(); ++c) {
            const std::string& content = t.cells[static_cast<size_t>(r)][static_cast<size_t>(c)];
            if (content.empty()) continue;
            cells.push_back({{"row", r},
                             {"col", c},
                             {"content", content},
                             {"is_header", r < t.header_rows || c < t.header_cols}});
        }
    json out{{"id", t.id}, {"cells", std::move(cells)}};
    out["caption"] = t.caption ? json(*t.caption) : json(nullptr);
    return out;
}

TableEvidence table_from_json(const json& j) {
    if (!j.is_object()) throw Error("table_evidence entry must be an object");
    std::vector<RawCell> cells;
    for (const json& cj : j.at("cells")) {
        RawCell c;
        c.row = cj.at("row").get<int>();
        c.col = cj.at("col").get<int>();
        c.content = cj.at("content").get<std::string>();
        c.is_header = cj.at("is_header").get<bool>();
        cells.push_back(std::move(c));
    }
    std::optional<std::string> caption;
    if (j.contains("caption") && !j.at("caption").is_null())
        caption = j.at("caption").get<std::string>();
    return resolve_table(j.at("id").get<std::string>(), cells, caption);
}

}  // namespace

std::string record_to_json_line(const ClaimRecord& r) {
    json j;
    j["claim_id"] = r.claim.id;
    j["claim"] = r.claim.text;
    if (r.claim.gold) j["label"] = label_to_string(*r.claim.gold);
    j["gold_complete"] = r.gold_complete;
    json text = json::array();
    for (const TextEvidence& e : r.text_evidence)
        text.push_back({{"id", e.id}, {"sentence", e.sentence}, {"source", e.source}});
    j["text_evidence"] = std::move(text);
    json tables = json::array();
    for (const TableEvidence& t : r.table_evidence) tables.push_back(table_to_json(t));
    j["table_evidence"] = std::move(tables);
    return j.dump();
}

ClaimRecord record_from_json_line(const std::string& line, bool require_label) {
    json j = json::parse(line);  // throws json::parse_error on bad syntax
    if (!j.is_object()) throw Error("record must be a JSON object");

    ClaimRecord r;
    r.claim.id = j.at("claim_id").get<int64_t>();
    r.claim.text = j.at("claim").get<std::string>();
    if (j.contains("label") && !j.at("label").is_null())
        r.claim.gold = label_from_string(j.at("label").get<std::string>());
    else if (require_label)
        throw UnknownLabel("missing gold label");
    r.gold_complete = j.at("gold_complete").get<bool>();

    for (const json& ej : j.at("text_evidence")) {
        TextEvidence e;
        e.id = ej.at("id").get<std::string>();
        e.sentence = ej.at("sentence").get<std::string>();
        e.source = ej.at("source").get<std::string>();
        if (e.sentence.empty()) throw Error("text evidence with empty sentence");
        r.text_evidence.push_back(std::move(e));
    }
    for (const json& tj : j.at("table_evidence")) r.table_evidence.push_back(table_from_json(tj));
    return r;
}

std::pair<Dataset, LoadReport> load_dataset(const std::string& path, Split split) {
    if (!std::filesystem::exists(path))
        throw FileNotFound("load_dataset: no such file: " + path);
    std::ifstream in(path);
    if (!in) throw FileNotFound("load_dataset: cannot open: " + path);

    const bool require_label = split != Split::kTest;
    Dataset ds;
    ds.split = split;
    LoadReport report;
    std::set<int64_t> seen_ids;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            ClaimRecord r = record_from_json_line(line, require_label);
            if (!seen_ids.insert(r.claim.id).second)
                throw Error("duplicate claim_id " + std::to_string(r.claim.id));
            ds.records.push_back(std::move(r));
            ++report.loaded;
        } catch (const std::exception& e) {
            report.skipped.push_back({line_no, e.what()});
        }
    }
    if (ds.records.empty())
        throw EmptyDataset("load_dataset: no valid records in " + path);
    return {std::move(ds), std::move(report)};
}

void save_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FileNotFound("save_dataset: cannot open for writing: " + path);
    for (const ClaimRecord& r : ds.records) out << record_to_json_line(r) << '\n';
}

std::pair<std::vector<TextEvidence>, std::vector<TableEvidence>> select_evidence(
    const ClaimRecord& r, int budget_text, int budget_table) {
    std::vector<TextEvidence> text(
        r.text_evidence.begin(),
        r.text_evidence.begin() + std::min<size_t>(r.text_evidence.size(), static_cast<size_t>(budget_text)));
    std::vector<TableEvidence> tables(
        r.table_evidence.begin(),
        r.table_evidence.begin() + std::min<size_t>(r.table_evidence.size(), static_cast<size_t>(budget_table)));
    return {std::move(text), std::move(tables)};
}

bool semantically_equal(const ClaimRecord& a, const ClaimRecord& b) {
    if (a.claim.id != b.claim.id || a.claim.text != b.claim.text || a.claim.gold != b.claim.gold ||
        a.gold_complete != b.gold_complete)
        return false;
    if (a.text_evidence.size() != b.text_evidence.size() ||
        a.table_evidence.size() != b.table_evidence.size())
        return false;
    for (size_t i = 0; i < a.text_evidence.size(); ++i) {
        const auto& x = a.text_evidence[i];
        const auto& y = b.text_evidence[i];
        if (x.id != y.id || x.sentence != y.sentence || x.source != y.source) return false;
    }
    for (size_t i = 0; i < a.table_evidence.size(); ++i) {
        const auto& x = a.table_evidence[i];
        const auto& y = b.table_evidence[i];
        if (x.id != y.id || x.cells != y.cells || x.header_rows != y.header_rows ||
            x.header_cols != y.header_cols || x.caption != y.caption)
            return false;
    }
    return true;
}

}  // namespace veritab
