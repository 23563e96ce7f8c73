#include "veritab/table_encoder.hpp"

#include "veritab/errors.hpp"
#include "veritab/transformer.hpp"

namespace veritab {

StructuredTokenSequence linearize_table(const Vocabulary& vocab, std::string_view claim,
                                        const TableEvidence& table, int max_seq_len,
                                        int max_rows, int max_cols) {
    if (max_seq_len < 2) throw ConfigError("linearize_table: max_seq_len must be >= 2");

    StructuredTokenSequence seq;
    const auto push = [&seq](int id, int row, int col, int segment) {
        seq.ids.push_back(id);
        seq.row_ids.push_back(row);
        seq.col_ids.push_back(col);
        seq.segment_ids.push_back(segment);
    };

    // Prefix: [CLS] claim [SEP], claim tail truncated if it alone overflows.
    std::vector<int> claim_ids = vocab.encode(claim);
    const size_t claim_budget = static_cast<size_t>(max_seq_len) - 2;
    if (claim_ids.size() > claim_budget) claim_ids.resize(claim_budget);
    push(Vocabulary::kCls, 0, 0, 0);
    for (int id : claim_ids) push(id, 0, 0, 0);
    push(Vocabulary::kSep, 0, 0, 0);

    size_t remaining = static_cast<size_t>(max_seq_len) - seq.ids.size();

    if (table.caption) {
        std::vector<int> cap_ids = vocab.encode(*table.caption);
        if (cap_ids.size() > remaining) cap_ids.resize(remaining);
        for (int id : cap_ids) push(id, 0, 0, 1);
        remaining -= cap_ids.size();
    }

    const int rows = std::min(table.rows(), max_rows);
    const int cols = std::min(table.columns(), max_cols);
    bool emitted_cell = false;
    for (int r = 0; r < rows && remaining > 0; ++r) {
        for (int c = 0; c < cols; ++c) {
            const std::vector<int> cell_ids =
                vocab.encode(table.cells[static_cast<size_t>(r)][static_cast<size_t>(c)]);
            if (cell_ids.empty()) continue;
            if (cell_ids.size() > remaining) {
                // Split only a first cell that could never fit whole.
                if (!emitted_cell)
                    for (size_t i = 0; i < remaining; ++i) push(cell_ids[i], r + 1, c + 1, 1);
                return seq;
            }
            for (int id : cell_ids) push(id, r + 1, c + 1, 1);
            remaining -= cell_ids.size();
            emitted_cell = true;
        }
    }
    return seq;
}

std::vector<double> TableEncoder::encode_table_pair_values(ParameterStore& store, const Claim& claim,
                                                           const TableEvidence& table) const {
    Tape tape;
    return tape.value(encode_table_pair(tape, store, claim, table)).data;
}

namespace {

class GridTableEncoder final : public TableEncoder {
public:
    GridTableEncoder(EncoderConfig cfg, const Vocabulary& vocab, std::string prefix,
                     int max_rows, int max_cols, bool sequence_positions)
        : cfg_(std::move(cfg)), vocab_(&vocab), prefix_(std::move(prefix)),
          max_rows_(max_rows), max_cols_(max_cols), sequence_positions_(sequence_positions) {}

    std::string name() const override { return sequence_positions_ ? "gridpos" : "grid"; }
    int output_dim() const override { return cfg_.embed_dim; }

    void init_params(ParameterStore& store, RngState& rng) const override {
        store.create_xavier(prefix_ + "tok_emb", vocab_->size(), cfg_.embed_dim, rng);
        store.create_xavier(prefix_ + "row_emb", max_rows_ + 1, cfg_.embed_dim, rng);
        store.create_xavier(prefix_ + "col_emb", max_cols_ + 1, cfg_.embed_dim, rng);
        store.create_xavier(prefix_ + "seg_emb", 2, cfg_.embed_dim, rng);
        if (sequence_positions_)
            store.create_xavier(prefix_ + "pos_emb", cfg_.max_seq_len, cfg_.embed_dim, rng);
        init_stack_params(stack_config(), store, rng);
    }

    ValueId encode_table_pair(Tape& tape, ParameterStore& store, const Claim& claim,
                              const TableEvidence& table) const override {
        const StructuredTokenSequence seq =
            linearize_table(*vocab_, claim.text, table, cfg_.max_seq_len, max_rows_, max_cols_);
        ValueId emb = tape.gather_rows(tape.param(store, prefix_ + "tok_emb"), seq.ids);
        emb = tape.add(emb, tape.gather_rows(tape.param(store, prefix_ + "row_emb"), seq.row_ids));
        emb = tape.add(emb, tape.gather_rows(tape.param(store, prefix_ + "col_emb"), seq.col_ids));
        emb = tape.add(emb, tape.gather_rows(tape.param(store, prefix_ + "seg_emb"), seq.segment_ids));
        if (sequence_positions_) {
            std::vector<int> pos(seq.ids.size());
            for (size_t i = 0; i < pos.size(); ++i) pos[i] = static_cast<int>(i);
            emb = tape.add(emb, tape.gather_rows(tape.param(store, prefix_ + "pos_emb"), pos));
        }
        ValueId states = run_stack(stack_config(), tape, store, emb);
        return tape.row(states, 0);
    }

private:
    StackConfig stack_config() const {
        return {cfg_.embed_dim, cfg_.layers, cfg_.heads, cfg_.ffn_hidden, prefix_};
    }

    EncoderConfig cfg_;
    const Vocabulary* vocab_;
    std::string prefix_;
    int max_rows_;
    int max_cols_;
    bool sequence_positions_;
};

}  // namespace

std::unique_ptr<TableEncoder> make_table_encoder(const EncoderConfig& cfg, const Vocabulary& vocab,
                                                 const std::string& param_prefix, int max_rows,
                                                 int max_cols) {
    if (cfg.variant == "grid")
        return std::make_unique<GridTableEncoder>(cfg, vocab, param_prefix, max_rows, max_cols, false);
    if (cfg.variant == "gridpos")
        return std::make_unique<GridTableEncoder>(cfg, vocab, param_prefix, max_rows, max_cols, true);
    throw ConfigError("unknown table encoder variant '" + cfg.variant + "' (expected grid|gridpos)");
}

}  // namespace veritab
