#pragma once

#include <memory>
#include <string>
#include <vector>

#include "veritab/data.hpp"
#include "veritab/params.hpp"
#include "veritab/tape.hpp"
#include "veritab/tokenizer.hpp"

namespace veritab {

struct TokenSequence {
    std::vector<int> ids;
    std::vector<int> segment_ids;  // 0 = claim side, 1 = evidence side
};

// [CLS] claim [SEP] evidence, segment 0 covering [CLS]+claim+[SEP]. When the
// pair exceeds max_seq_len the evidence tail is truncated first, then the
// claim tail; any input yields a legal sequence.
TokenSequence pack_pair(const Vocabulary& vocab, std::string_view claim,
                        std::string_view evidence, int max_seq_len);

struct EncoderConfig {
    std::string variant;  // text: "learned" | "sinusoidal"; table: "grid" | "gridpos"
    int embed_dim = 64;
    int layers = 2;
    int heads = 4;
    int ffn_hidden = 128;
    int max_seq_len = 128;
};

// Claim-conditioned CLS embeddings from a small trainable transformer. Any
// implementation of this interface plugs into the fusion head unchanged.
class TextEncoder {
public:
    virtual ~TextEncoder() = default;
    virtual std::string name() const = 0;
    virtual int output_dim() const = 0;
    virtual void init_params(ParameterStore& store, RngState& rng) const = 0;

    // Final-layer hidden state at the CLS position, as a 1 x D tape node.
    virtual ValueId encode_pair(Tape& tape, ParameterStore& store, const Claim& claim,
                                const TextEvidence& ev) const = 0;

    // Same encoder run on [CLS] claim [SEP] with an empty evidence segment.
    ValueId encode_claim(Tape& tape, ParameterStore& store, const Claim& claim) const {
        return encode_pair(tape, store, claim, TextEvidence{});
    }

    // Eval-mode conveniences (run a throwaway tape).
    std::vector<double> encode_pair_values(ParameterStore& store, const Claim& claim,
                                           const TextEvidence& ev) const;
    std::vector<double> encode_claim_values(ParameterStore& store, const Claim& claim) const;
};

// variant "learned": learned absolute position embeddings.
// variant "sinusoidal": fixed sinusoidal positions (no position parameters).
// ConfigError on anything else. The vocabulary must outlive the encoder.
std::unique_ptr<TextEncoder> make_text_encoder(const EncoderConfig& cfg, const Vocabulary& vocab,
                                               const std::string& param_prefix);

}  // namespace veritab
