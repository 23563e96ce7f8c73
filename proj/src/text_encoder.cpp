#include "veritab/text_encoder.hpp"

#include <cmath>

#include "veritab/errors.hpp"
#include "veritab/transformer.hpp"

namespace veritab {

TokenSequence pack_pair(const Vocabulary& vocab, std::string_view claim,
                        std::string_view evidence, int max_seq_len) {
    if (max_seq_len < 2) throw ConfigError("pack_pair: max_seq_len must be >= 2");
    std::vector<int> claim_ids = vocab.encode(claim);
    std::vector<int> ev_ids = vocab.encode(evidence);

    const size_t budget = static_cast<size_t>(max_seq_len) - 2;  // [CLS] and [SEP]
    if (claim_ids.size() > budget) {
        claim_ids.resize(budget);
        ev_ids.clear();
    } else if (claim_ids.size() + ev_ids.size() > budget) {
        ev_ids.resize(budget - claim_ids.size());
    }

    TokenSequence seq;
    seq.ids.reserve(claim_ids.size() + ev_ids.size() + 2);
    seq.ids.push_back(Vocabulary::kCls);
    seq.ids.insert(seq.ids.end(), claim_ids.begin(), claim_ids.end());
    seq.ids.push_back(Vocabulary::kSep);
    seq.segment_ids.assign(seq.ids.size(), 0);
    seq.ids.insert(seq.ids.end(), ev_ids.begin(), ev_ids.end());
    seq.segment_ids.resize(seq.ids.size(), 1);
    return seq;
}

std::vector<double> TextEncoder::encode_pair_values(ParameterStore& store, const Claim& claim,
                                                    const TextEvidence& ev) const {
    Tape tape;
    return tape.value(encode_pair(tape, store, claim, ev)).data;
}

std::vector<double> TextEncoder::encode_claim_values(ParameterStore& store, const Claim& claim) const {
    Tape tape;
    return tape.value(encode_claim(tape, store, claim)).data;
}

namespace {

// Scaled by 1/sqrt(dim) so fixed positions sit at the same magnitude as the
// Xavier token embeddings instead of drowning them.
Array2D sinusoid_positions(int length, int dim) {
    Array2D pos(length, dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    for (int t = 0; t < length; ++t)
        for (int j = 0; j < dim; ++j) {
            const double angle = t / std::pow(10000.0, 2.0 * (j / 2) / dim);
            pos.at(t, j) = scale * ((j % 2 == 0) ? std::sin(angle) : std::cos(angle));
        }
    return pos;
}

std::vector<int> iota_ids(size_t n) {
    std::vector<int> v(n);
    for (size_t i = 0; i < n; ++i) v[i] = static_cast<int>(i);
    return v;
}

class TransformerTextEncoder final : public TextEncoder {
public:
    TransformerTextEncoder(EncoderConfig cfg, const Vocabulary& vocab, std::string prefix,
                           bool learned_positions)
        : cfg_(std::move(cfg)), vocab_(&vocab), prefix_(std::move(prefix)),
          learned_positions_(learned_positions) {}

    std::string name() const override { return learned_positions_ ? "learned" : "sinusoidal"; }
    int output_dim() const override { return cfg_.embed_dim; }

    void init_params(ParameterStore& store, RngState& rng) const override {
        store.create_xavier(prefix_ + "tok_emb", vocab_->size(), cfg_.embed_dim, rng);
        if (learned_positions_)
            store.create_xavier(prefix_ + "pos_emb", cfg_.max_seq_len, cfg_.embed_dim, rng);
        store.create_xavier(prefix_ + "seg_emb", 2, cfg_.embed_dim, rng);
        init_stack_params(stack_config(), store, rng);
    }

    ValueId encode_pair(Tape& tape, ParameterStore& store, const Claim& claim,
                        const TextEvidence& ev) const override {
        const TokenSequence seq = pack_pair(*vocab_, claim.text, ev.sentence, cfg_.max_seq_len);
        ValueId emb = tape.gather_rows(tape.param(store, prefix_ + "tok_emb"), seq.ids);
        if (learned_positions_) {
            emb = tape.add(emb, tape.gather_rows(tape.param(store, prefix_ + "pos_emb"),
                                                 iota_ids(seq.ids.size())));
        } else {
            emb = tape.add(emb, tape.input(sinusoid_positions(static_cast<int>(seq.ids.size()),
                                                              cfg_.embed_dim)));
        }
        emb = tape.add(emb, tape.gather_rows(tape.param(store, prefix_ + "seg_emb"), seq.segment_ids));
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
    bool learned_positions_;
};

}  // namespace

std::unique_ptr<TextEncoder> make_text_encoder(const EncoderConfig& cfg, const Vocabulary& vocab,
                                               const std::string& param_prefix) {
    if (cfg.variant == "learned")
        return std::make_unique<TransformerTextEncoder>(cfg, vocab, param_prefix, true);
    if (cfg.variant == "sinusoidal")
        return std::make_unique<TransformerTextEncoder>(cfg, vocab, param_prefix, false);
    throw ConfigError("unknown text encoder variant '" + cfg.variant +
                      "' (expected learned|sinusoidal)");
}

}  // namespace veritab
