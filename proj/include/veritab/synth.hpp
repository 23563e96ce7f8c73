#pragma once

#include <cstdint>
#include <string>

#include "veritab/data.hpp"

namespace veritab {

// Seeded generator for claim/evidence records whose labels are decidable by
// rule from their own evidence. Tasks:
//   text_only:  the deciding fact appears in one sentence; tables distract.
//   table_only: the deciding fact sits in one table cell; sentences distract.
//   joint:      S iff the deciding sentence AND the deciding cell both state
//               the claimed value; R iff both are present and either
//               disagrees; NEI iff either deciding item is withheld.
// Every record carries 5 sentences and 2 tables; labels are balanced within
// one record per class; output is fully determined by the seed.
struct SynthConfig {
    uint64_t seed = 1;
    int n_train = 2000;
    int n_dev = 500;
    int n_test = 500;
    std::string task = "joint";  // text_only | table_only | joint
    int n_entities = 24;
    int n_attributes = 6;
    int n_values = 10;  // cell/claim values are integers in [0, n_values)
};

struct SynthOutput {
    Dataset train;
    Dataset dev;
    Dataset test;
};

// ConfigError on empty vocab pools, non-positive counts or unknown task.
SynthOutput generate(const SynthConfig& cfg);

}  // namespace veritab
