#include "veritab/fusion.hpp"

#include "veritab/errors.hpp"
#include "veritab/primitives.hpp"

namespace veritab {

EvidenceEmbeddingSet assemble_evidence_set(const std::vector<std::vector<double>>& text_vecs,
                                           const std::vector<std::vector<double>>& table_vecs,
                                           int budget_text, int budget_table) {
    if (static_cast<int>(text_vecs.size()) > budget_text)
        throw BudgetExceeded("assemble_evidence_set: " + std::to_string(text_vecs.size()) +
                             " text vectors exceed budget " + std::to_string(budget_text));
    if (static_cast<int>(table_vecs.size()) > budget_table)
        throw BudgetExceeded("assemble_evidence_set: " + std::to_string(table_vecs.size()) +
                             " table vectors exceed budget " + std::to_string(budget_table));

    size_t dim = 0;
    for (const auto& v : text_vecs) dim = dim ? dim : v.size();
    for (const auto& v : table_vecs) dim = dim ? dim : v.size();

    EvidenceEmbeddingSet set;
    set.text_budget = budget_text;
    set.table_budget = budget_table;
    set.matrix = Array2D(budget_text + budget_table, static_cast<int>(dim));
    set.mask.assign(static_cast<size_t>(budget_text + budget_table), false);

    const auto fill = [&](const std::vector<std::vector<double>>& vecs, int offset) {
        for (size_t i = 0; i < vecs.size(); ++i) {
            if (vecs[i].size() != dim)
                throw ShapeMismatch("assemble_evidence_set: inconsistent embedding widths");
            const int r = offset + static_cast<int>(i);
            std::copy(vecs[i].begin(), vecs[i].end(), set.matrix.row_span(r).begin());
            set.mask[static_cast<size_t>(r)] = true;
        }
    };
    fill(text_vecs, 0);
    fill(table_vecs, budget_text);
    return set;
}

Label predict_label(const VerdictDistribution& dist) {
    int best = 0;
    for (int i = 1; i < 3; ++i)
        if (dist.p[static_cast<size_t>(i)] > dist.p[static_cast<size_t>(best)]) best = i;
    return static_cast<Label>(best);
}

double verdict_loss(const VerdictDistribution& dist, Label gold) {
    Tape tape;
    ValueId p = tape.input(Array2D::row_vector(dist.p));
    return tape.value(tape.cross_entropy(p, static_cast<int>(gold))).data[0];
}

FusionHead::FusionHead(FusionConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.hidden <= 0 || cfg_.heads <= 0 || cfg_.hidden % cfg_.heads != 0)
        throw ConfigError("fusion: attention hidden size must divide into heads");
    if (cfg_.mlp_hidden < 2) throw ConfigError("fusion: mlp_hidden must be >= 2");
}

void FusionHead::init_params(ParameterStore& store, RngState& rng) const {
    const std::string& p = cfg_.prefix;
    if (cfg_.claim_dim != cfg_.hidden)
        store.create_xavier(p + "proj_c", cfg_.claim_dim, cfg_.hidden, rng);
    if (cfg_.evidence_dim != cfg_.hidden)
        store.create_xavier(p + "proj_e", cfg_.evidence_dim, cfg_.hidden, rng);
    for (const char* w : {"attn/wq", "attn/wk", "attn/wv", "attn/wo"})
        store.create_xavier(p + w, cfg_.hidden, cfg_.hidden, rng);
    for (const char* b : {"attn/bq", "attn/bk", "attn/bv", "attn/bo"})
        store.create(p + b, 1, cfg_.hidden);
    const int h1 = cfg_.mlp_hidden;
    const int h2 = cfg_.mlp_hidden / 2;
    store.create_xavier(p + "mlp/w1", cfg_.hidden, h1, rng);
    store.create(p + "mlp/b1", 1, h1);
    store.create_xavier(p + "mlp/w2", h1, h2, rng);
    store.create(p + "mlp/b2", 1, h2);
    store.create_xavier(p + "mlp/w3", h2, 3, rng);
    store.create(p + "mlp/b3", 1, 3);
}

FusionHead::TapeEvidence FusionHead::assemble(Tape& tape, const std::vector<ValueId>& text_rows,
                                              const std::vector<ValueId>& table_rows,
                                              int budget_text, int budget_table) const {
    if (static_cast<int>(text_rows.size()) > budget_text)
        throw BudgetExceeded("fusion assemble: text evidence over budget");
    if (static_cast<int>(table_rows.size()) > budget_table)
        throw BudgetExceeded("fusion assemble: table evidence over budget");

    TapeEvidence out;
    out.mask.assign(static_cast<size_t>(budget_text + budget_table), false);
    std::vector<ValueId> rows;
    rows.reserve(out.mask.size());
    ValueId pad = -1;  // shared zero row for every padding slot
    const auto pad_row = [&]() {
        if (pad < 0) pad = tape.zeros(1, cfg_.evidence_dim);
        return pad;
    };
    for (int i = 0; i < budget_text; ++i) {
        if (i < static_cast<int>(text_rows.size())) {
            rows.push_back(text_rows[static_cast<size_t>(i)]);
            out.mask[static_cast<size_t>(i)] = true;
        } else {
            rows.push_back(pad_row());
        }
    }
    for (int i = 0; i < budget_table; ++i) {
        if (i < static_cast<int>(table_rows.size())) {
            rows.push_back(table_rows[static_cast<size_t>(i)]);
            out.mask[static_cast<size_t>(budget_text + i)] = true;
        } else {
            rows.push_back(pad_row());
        }
    }
    out.matrix = tape.concat_rows(rows);
    return out;
}

ValueId FusionHead::fuse(Tape& tape, ParameterStore& store, ValueId claim_vec,
                         const TapeEvidence& evidence) const {
    bool any = false;
    for (bool b : evidence.mask) any = any || b;
    if (!any) throw NoEvidence("fuse: every evidence row is masked");

    const std::string& p = cfg_.prefix;
    ValueId q = claim_vec;
    if (cfg_.claim_dim != cfg_.hidden) q = tape.matmul(q, tape.param(store, p + "proj_c"));
    ValueId e = evidence.matrix;
    if (cfg_.evidence_dim != cfg_.hidden) e = tape.matmul(e, tape.param(store, p + "proj_e"));

    MhaParamIds attn{tape.param(store, p + "attn/wq"), tape.param(store, p + "attn/bq"),
                     tape.param(store, p + "attn/wk"), tape.param(store, p + "attn/bk"),
                     tape.param(store, p + "attn/wv"), tape.param(store, p + "attn/bv"),
                     tape.param(store, p + "attn/wo"), tape.param(store, p + "attn/bo")};
    return multi_head_attention_node(tape, q, e, e, evidence.mask, attn, cfg_.heads);
}

ValueId FusionHead::classify(Tape& tape, ParameterStore& store, ValueId z, Mode mode,
                             RngState* dropout_rng) const {
    const std::string& p = cfg_.prefix;
    const bool want_dropout = mode == Mode::kTrain && cfg_.dropout > 0.0;
    if (want_dropout && dropout_rng == nullptr)
        throw ConfigError("classify: train-mode dropout needs an RngState");

    ValueId h = tape.relu(tape.linear(z, tape.param(store, p + "mlp/w1"), tape.param(store, p + "mlp/b1")));
    if (cfg_.placement == DropoutPlacement::kPerLayer && want_dropout)
        h = tape.dropout(h, cfg_.dropout, *dropout_rng, mode);
    h = tape.relu(tape.linear(h, tape.param(store, p + "mlp/w2"), tape.param(store, p + "mlp/b2")));
    if (want_dropout)  // both placements drop right before the final projection
        h = tape.dropout(h, cfg_.dropout, *dropout_rng, mode);
    ValueId logits = tape.linear(h, tape.param(store, p + "mlp/w3"), tape.param(store, p + "mlp/b3"));
    return tape.softmax_rows(logits);
}

}  // namespace veritab
