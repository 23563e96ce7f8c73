#pragma once

#include <string>
#include <vector>

#include "veritab/data.hpp"
#include "veritab/model.hpp"

namespace veritab {

struct TrainConfig {
    uint64_t seed = 1;
    double learning_rate = 1e-5;
    int batch_size = 16;
    int max_epochs = 6;
    int patience = 2;  // epochs without dev-loss improvement before stopping
    int warmup_steps = 0;  // linear lr ramp over the first N optimizer steps
    std::string modality = "both";
    ModelConfig model;
};

struct EvalReport {
    double label_accuracy = 0.0;   // percent
    double feverous_score = 0.0;   // percent; never exceeds label_accuracy
    int64_t confusion[3][3] = {};  // [gold][pred], S/R/NEI order
    int n_claims = 0;
};

struct EpochStats {
    int epoch = 0;  // 1-based
    double train_loss = 0.0;
    double dev_loss = 0.0;
    double dev_label_accuracy = 0.0;
    double dev_feverous_score = 0.0;
    bool improved = false;
};

struct TrainResult {
    std::vector<EpochStats> history;
    int best_epoch = 0;
    double best_dev_loss = 0.0;
};

// 100 * matches / n. EmptyInput on empty, ShapeMismatch on length mismatch.
double label_accuracy(const std::vector<Label>& preds, const std::vector<Label>& golds);

// 100 * (label correct AND complete gold evidence present) / n.
double feverous_score(const std::vector<Label>& preds, const std::vector<Label>& golds,
                      const std::vector<bool>& gold_complete);

// Frequency vocabulary over claims, sentences, captions and cell contents.
Vocabulary build_vocabulary(const Dataset& train_set, int max_size);

// Eval-mode pass per claim; zero-evidence claims predict NEI without running
// the model. Labels must be present (UnknownLabel otherwise).
EvalReport evaluate(VerdictModel& model, const Dataset& dataset,
                    Modality modality = Modality::kBoth);

// Mini-batch loop: encode, assemble, fuse, classify, loss, backward, Adam.
// Stops early when dev loss has not improved for `patience` epochs. On
// return the model holds the best-dev-loss parameters. Deterministic per
// (seed, data, config).
TrainResult train(const TrainConfig& cfg, VerdictModel& model, const Dataset& train_set,
                  const Dataset& dev_set);

struct CheckpointMeta {
    int version = 1;
    int epoch = 0;
    double dev_loss = 0.0;
    double dev_label_accuracy = 0.0;
    double dev_feverous_score = 0.0;
    TrainConfig config;
};

// JSON checkpoint (parameter values only) plus a sibling vocabulary file
// "<stem>.vocab.txt"; reloading reproduces eval-mode outputs bitwise.
void save_checkpoint(const std::string& path, const VerdictModel& model,
                     const CheckpointMeta& meta);

struct LoadedCheckpoint {
    VerdictModel model;
    CheckpointMeta meta;
};
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace veritab
