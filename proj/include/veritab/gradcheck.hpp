#pragma once

#include <string>
#include <vector>

#include "veritab/model.hpp"

namespace veritab {

// Backward-vs-central-finite-differences comparison over every parameter
// group of a model on a fixed 1-claim batch (2 text + 2 table evidence,
// built-in). Dropout is forced off so the loss is deterministic.
//
// By default each group is checked on a seeded sample of its entries
// (full=false); full=true enumerates every scalar and is meant for small
// dims. Relative error is |a-b| / max(|a|, |b|, 1e-5); the floor keeps
// near-zero pairs that agree to ~1e-10 absolute from dividing by zero.
struct GradCheckConfig {
    ModelConfig model;
    uint64_t seed = 7;
    double h = 1e-5;
    double tolerance = 1e-4;
    int samples_per_group = 12;
    bool full = false;
    std::string corrupt_group;  // test hook: perturb this group's analytic grad
};

struct GradCheckGroup {
    std::string name;
    double max_rel_err = 0.0;
    int checked = 0;
    bool pass = false;
};

struct GradCheckReport {
    std::vector<GradCheckGroup> groups;  // every parameter group exactly once
    double max_rel_err = 0.0;
    bool pass = false;
};

GradCheckReport run_gradcheck(const GradCheckConfig& cfg);

// The fixed record the check runs on (exposed for tests).
ClaimRecord gradcheck_record();

}  // namespace veritab
