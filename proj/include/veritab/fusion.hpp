#pragma once

#include <array>
#include <string>
#include <vector>

#include "veritab/array2d.hpp"
#include "veritab/data.hpp"
#include "veritab/params.hpp"
#include "veritab/tape.hpp"

namespace veritab {

// (M+N) x D evidence matrix, text rows first at [0, M), table rows at
// [M, M+N); rows beyond the actual counts are zero-filled with mask=false.
struct EvidenceEmbeddingSet {
    Array2D matrix;
    std::vector<bool> mask;
    int text_budget = 0;
    int table_budget = 0;
};

// BudgetExceeded if a list is longer than its budget; ShapeMismatch if the
// vectors disagree on width.
EvidenceEmbeddingSet assemble_evidence_set(const std::vector<std::vector<double>>& text_vecs,
                                           const std::vector<std::vector<double>>& table_vecs,
                                           int budget_text, int budget_table);

// Probability 3-vector ordered [S, R, NEI].
struct VerdictDistribution {
    std::array<double, 3> p{0.0, 0.0, 0.0};
};

// argmax; exact ties break toward the lower index (S over R over NEI).
Label predict_label(const VerdictDistribution& dist);

// Cross entropy against the gold class under the fixed S/R/NEI index map.
double verdict_loss(const VerdictDistribution& dist, Label gold);

enum class DropoutPlacement { kBeforeFinal, kPerLayer };

struct FusionConfig {
    int claim_dim = 64;     // claim encoder output width
    int evidence_dim = 64;  // evidence encoder output width
    int hidden = 64;        // cross-attention hidden size
    int heads = 4;
    int mlp_hidden = 64;    // widths run [mlp_hidden, mlp_hidden/2, 3]
    double dropout = 0.2;
    DropoutPlacement placement = DropoutPlacement::kBeforeFinal;
    std::string prefix = "fusion/";
};

// Claim-query cross-attention over the evidence set plus the MLP classifier.
// Input projections onto the attention width are created only when an
// encoder width differs from it.
class FusionHead {
public:
    explicit FusionHead(FusionConfig cfg);

    void init_params(ParameterStore& store, RngState& rng) const;

    struct TapeEvidence {
        ValueId matrix = -1;
        std::vector<bool> mask;
    };

    // Tape-side assemble with the same layout contract as
    // assemble_evidence_set; rows are 1 x evidence_dim nodes.
    TapeEvidence assemble(Tape& tape, const std::vector<ValueId>& text_rows,
                          const std::vector<ValueId>& table_rows, int budget_text,
                          int budget_table) const;

    // z = MHA(query = projected claim, keys = values = projected evidence).
    // Throws NoEvidence when the mask is all-false.
    ValueId fuse(Tape& tape, ParameterStore& store, ValueId claim_vec,
                 const TapeEvidence& evidence) const;

    // Three linear layers (ReLU after the first two), dropout per config,
    // softmax over the 3 logits. rng may be null in eval mode.
    ValueId classify(Tape& tape, ParameterStore& store, ValueId z, Mode mode,
                     RngState* dropout_rng) const;

    const FusionConfig& config() const { return cfg_; }

private:
    FusionConfig cfg_;
};

}  // namespace veritab
