#include "veritab/model.hpp"

#include "veritab/errors.hpp"

namespace veritab {

std::string modality_to_string(Modality m) {
    switch (m) {
        case Modality::kBoth: return "both";
        case Modality::kTextOnly: return "text_only";
        case Modality::kTableOnly: return "table_only";
    }
    return "?";
}

Modality modality_from_string(const std::string& s) {
    if (s == "both") return Modality::kBoth;
    if (s == "text_only") return Modality::kTextOnly;
    if (s == "table_only") return Modality::kTableOnly;
    throw ConfigError("unknown modality '" + s + "' (expected both|text_only|table_only)");
}

namespace {

FusionConfig fusion_config_of(const ModelConfig& cfg) {
    FusionConfig f;
    f.claim_dim = cfg.embed_dim;
    f.evidence_dim = cfg.embed_dim;
    f.hidden = cfg.attention_hidden;
    f.heads = cfg.attention_heads;
    f.mlp_hidden = cfg.mlp_hidden;
    f.dropout = cfg.dropout;
    if (cfg.dropout_placement == "before_final")
        f.placement = DropoutPlacement::kBeforeFinal;
    else if (cfg.dropout_placement == "per_layer")
        f.placement = DropoutPlacement::kPerLayer;
    else
        throw ConfigError("unknown dropout_placement '" + cfg.dropout_placement + "'");
    f.prefix = "fusion/";
    return f;
}

EncoderConfig encoder_config_of(const ModelConfig& cfg, const std::string& variant) {
    EncoderConfig e;
    e.variant = variant;
    e.embed_dim = cfg.embed_dim;
    e.layers = cfg.layers;
    e.heads = cfg.heads;
    e.ffn_hidden = cfg.ffn_hidden;
    e.max_seq_len = cfg.max_seq_len;
    return e;
}

}  // namespace

VerdictModel::VerdictModel(ModelConfig cfg, Vocabulary vocab)
    : cfg_(std::move(cfg)),
      vocab_(std::make_unique<Vocabulary>(std::move(vocab))),
      fusion_(fusion_config_of(cfg_)) {
    text_enc_ = make_text_encoder(encoder_config_of(cfg_, cfg_.text_encoder), *vocab_, "text/");
    table_enc_ = make_table_encoder(encoder_config_of(cfg_, cfg_.table_encoder), *vocab_, "tab/",
                                    cfg_.max_table_rows, cfg_.max_table_cols);
}

VerdictModel::VerdictModel(ModelConfig cfg, Vocabulary vocab, uint64_t seed)
    : VerdictModel(std::move(cfg), std::move(vocab)) {
    RngState init_rng = RngState(seed).fork("init");
    text_enc_->init_params(params_, init_rng);
    table_enc_->init_params(params_, init_rng);
    fusion_.init_params(params_, init_rng);
}

VerdictModel::VerdictModel(ModelConfig cfg, Vocabulary vocab, ParameterStore params)
    : VerdictModel(std::move(cfg), std::move(vocab)) {
    params_ = std::move(params);
}

ValueId VerdictModel::forward_probs(Tape& tape, const ClaimRecord& record, Modality modality,
                                    Mode mode, RngState* dropout_rng) {
    auto [text_ev, table_ev] = select_evidence(record, cfg_.budget_text, cfg_.budget_table);
    if (modality == Modality::kTextOnly) table_ev.clear();
    if (modality == Modality::kTableOnly) text_ev.clear();
    if (text_ev.empty() && table_ev.empty())
        throw NoEvidence("forward_probs: no evidence for claim " + std::to_string(record.claim.id));

    ValueId claim_vec = text_enc_->encode_claim(tape, params_, record.claim);
    std::vector<ValueId> text_rows, table_rows;
    text_rows.reserve(text_ev.size());
    for (const TextEvidence& e : text_ev)
        text_rows.push_back(text_enc_->encode_pair(tape, params_, record.claim, e));
    table_rows.reserve(table_ev.size());
    for (const TableEvidence& t : table_ev)
        table_rows.push_back(table_enc_->encode_table_pair(tape, params_, record.claim, t));

    const FusionHead::TapeEvidence evidence =
        fusion_.assemble(tape, text_rows, table_rows, cfg_.budget_text, cfg_.budget_table);
    ValueId z = fusion_.fuse(tape, params_, claim_vec, evidence);
    return fusion_.classify(tape, params_, z, mode, dropout_rng);
}

VerdictModel::Prediction VerdictModel::predict(const ClaimRecord& record, Modality modality) {
    Prediction out;
    try {
        Tape tape;
        ValueId p = forward_probs(tape, record, modality, Mode::kEval, nullptr);
        const Array2D& pv = tape.value(p);
        out.dist.p = {pv.data[0], pv.data[1], pv.data[2]};
        out.label = predict_label(out.dist);
        out.used_model = true;
    } catch (const NoEvidence&) {
        out.dist.p = {0.0, 0.0, 1.0};
        out.label = Label::kNotEnoughInfo;
        out.used_model = false;
    }
    return out;
}

}  // namespace veritab
