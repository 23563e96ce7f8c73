#pragma once

#include <memory>
#include <string>

#include "veritab/data.hpp"
#include "veritab/fusion.hpp"
#include "veritab/table_encoder.hpp"
#include "veritab/text_encoder.hpp"

namespace veritab {

struct ModelConfig {
    // shared encoder shape
    int embed_dim = 64;
    int layers = 2;
    int heads = 4;
    int ffn_hidden = 128;
    int vocab_size = 8192;
    int max_seq_len = 128;
    // fusion
    int attention_hidden = 64;
    int attention_heads = 4;
    int mlp_hidden = 64;
    double dropout = 0.2;
    std::string dropout_placement = "before_final";  // | "per_layer"
    // encoder variants (swappable without touching fusion or training code)
    std::string text_encoder = "learned";  // | "sinusoidal"
    std::string table_encoder = "grid";    // | "gridpos"
    // evidence budgets and table window
    int budget_text = 5;
    int budget_table = 2;
    int max_table_rows = 64;
    int max_table_cols = 64;
};

enum class Modality { kBoth, kTextOnly, kTableOnly };
std::string modality_to_string(Modality m);
Modality modality_from_string(const std::string& s);

// Dual-encoder verdict model: claim-conditioned CLS embeddings per evidence
// item, claim-query cross-attention fusion, 3-way classifier.
class VerdictModel {
public:
    // Fresh parameters derived from the seed.
    VerdictModel(ModelConfig cfg, Vocabulary vocab, uint64_t seed);
    // Adopt existing parameters (checkpoint load).
    VerdictModel(ModelConfig cfg, Vocabulary vocab, ParameterStore params);

    VerdictModel(VerdictModel&&) = default;

    // Full forward for one record on the given tape; returns the 1x3
    // probability node. Ablation masks the excluded modality at assemble
    // time. Throws NoEvidence when no evidence row survives.
    ValueId forward_probs(Tape& tape, const ClaimRecord& record, Modality modality, Mode mode,
                          RngState* dropout_rng);

    struct Prediction {
        Label label = Label::kNotEnoughInfo;
        VerdictDistribution dist;
        bool used_model = false;  // false: zero-evidence NEI default
    };

    // Eval-mode prediction; zero-evidence records get NEI with a one-hot
    // distribution and never reach the encoders.
    Prediction predict(const ClaimRecord& record, Modality modality = Modality::kBoth);

    ParameterStore& params() { return params_; }
    const ParameterStore& params() const { return params_; }
    const ModelConfig& config() const { return cfg_; }
    const Vocabulary& vocab() const { return *vocab_; }
    const FusionHead& fusion() const { return fusion_; }
    const TextEncoder& text_encoder() const { return *text_enc_; }
    const TableEncoder& table_encoder() const { return *table_enc_; }

private:
    VerdictModel(ModelConfig cfg, Vocabulary vocab);  // wiring without params

    ModelConfig cfg_;
    std::unique_ptr<Vocabulary> vocab_;  // stable address for the encoders
    std::unique_ptr<TextEncoder> text_enc_;
    std::unique_ptr<TableEncoder> table_enc_;
    FusionHead fusion_;
    ParameterStore params_;
};

}  // namespace veritab
