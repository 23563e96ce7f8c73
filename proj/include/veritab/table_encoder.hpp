#pragma once

#include <memory>
#include <string>
#include <vector>

#include "veritab/data.hpp"
#include "veritab/params.hpp"
#include "veritab/tape.hpp"
#include "veritab/text_encoder.hpp"
#include "veritab/tokenizer.hpp"

namespace veritab {

// Parallel per-token streams: row/col ids of cell tokens are 1-based grid
// coordinates; claim and caption tokens carry row 0 / col 0.
struct StructuredTokenSequence {
    std::vector<int> ids;
    std::vector<int> row_ids;
    std::vector<int> col_ids;
    std::vector<int> segment_ids;  // 0 = claim, 1 = table side
};

// [CLS] claim [SEP] caption? cells... in row-major order. Grids larger than
// max_rows x max_cols are cut to that window first. Within the sequence
// budget, truncation drops whole trailing cells; a cell is split across the
// boundary only when it is the first cell and alone exceeds what is left.
StructuredTokenSequence linearize_table(const Vocabulary& vocab, std::string_view claim,
                                        const TableEvidence& table, int max_seq_len,
                                        int max_rows, int max_cols);

class TableEncoder {
public:
    virtual ~TableEncoder() = default;
    virtual std::string name() const = 0;
    virtual int output_dim() const = 0;
    virtual void init_params(ParameterStore& store, RngState& rng) const = 0;

    // Final-layer CLS state for the (claim, table) pair as a 1 x D node.
    virtual ValueId encode_table_pair(Tape& tape, ParameterStore& store, const Claim& claim,
                                      const TableEvidence& table) const = 0;

    std::vector<double> encode_table_pair_values(ParameterStore& store, const Claim& claim,
                                                 const TableEvidence& table) const;
};

// variant "grid": token + row + column + segment embeddings (no sequence
// positions). variant "gridpos": adds learned sequence-position embeddings.
std::unique_ptr<TableEncoder> make_table_encoder(const EncoderConfig& cfg, const Vocabulary& vocab,
                                                 const std::string& param_prefix, int max_rows,
                                                 int max_cols);

}  // namespace veritab
