#include "veritab/train.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "veritab/config_io.hpp"
#include "veritab/errors.hpp"

namespace veritab {

using nlohmann::json;

double label_accuracy(const std::vector<Label>& preds, const std::vector<Label>& golds) {
    if (preds.empty()) throw EmptyInput("label_accuracy: no predictions");
    if (preds.size() != golds.size())
        throw ShapeMismatch("label_accuracy: prediction/gold length mismatch");
    int64_t hits = 0;
    for (size_t i = 0; i < preds.size(); ++i) hits += preds[i] == golds[i] ? 1 : 0;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(preds.size());
}

double feverous_score(const std::vector<Label>& preds, const std::vector<Label>& golds,
                      const std::vector<bool>& gold_complete) {
    if (preds.empty()) throw EmptyInput("feverous_score: no predictions");
    if (preds.size() != golds.size() || preds.size() != gold_complete.size())
        throw ShapeMismatch("feverous_score: input length mismatch");
    int64_t hits = 0;
    for (size_t i = 0; i < preds.size(); ++i)
        hits += (preds[i] == golds[i] && gold_complete[i]) ? 1 : 0;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(preds.size());
}

Vocabulary build_vocabulary(const Dataset& train_set, int max_size) {
    std::vector<std::string> corpus;
    for (const ClaimRecord& r : train_set.records) {
        corpus.push_back(r.claim.text);
        for (const TextEvidence& e : r.text_evidence) corpus.push_back(e.sentence);
        for (const TableEvidence& t : r.table_evidence) {
            if (t.caption) corpus.push_back(*t.caption);
            for (const auto& row : t.cells)
                for (const std::string& cell : row)
                    if (!cell.empty()) corpus.push_back(cell);
        }
    }
    return Vocabulary::build(corpus, max_size);
}

EvalReport evaluate(VerdictModel& model, const Dataset& dataset, Modality modality) {
    if (dataset.records.empty()) throw EmptyDataset("evaluate: empty dataset");

    EvalReport report;
    std::vector<Label> preds, golds;
    std::vector<bool> complete;
    preds.reserve(dataset.records.size());
    for (const ClaimRecord& r : dataset.records) {
        if (!r.claim.gold)
            throw UnknownLabel("evaluate: claim " + std::to_string(r.claim.id) + " has no gold label");
        const auto pred = model.predict(r, modality);
        preds.push_back(pred.label);
        golds.push_back(*r.claim.gold);
        complete.push_back(r.gold_complete);
        ++report.confusion[static_cast<int>(*r.claim.gold)][static_cast<int>(pred.label)];
    }
    report.n_claims = static_cast<int>(dataset.records.size());
    report.label_accuracy = label_accuracy(preds, golds);
    report.feverous_score = feverous_score(preds, golds, complete);
    return report;
}

namespace {

// Mean eval-mode cross entropy over records that still have evidence after
// masking; zero-evidence records carry no loss (they bypass the model).
double dataset_loss(VerdictModel& model, const Dataset& ds, Modality modality) {
    double total = 0.0;
    int counted = 0;
    for (const ClaimRecord& r : ds.records) {
        try {
            Tape tape;
            ValueId p = model.forward_probs(tape, r, modality, Mode::kEval, nullptr);
            ValueId loss = tape.cross_entropy(p, static_cast<int>(*r.claim.gold));
            total += tape.value(loss).data[0];
            ++counted;
        } catch (const NoEvidence&) {
        }
    }
    return counted > 0 ? total / counted : 0.0;
}

ParameterStore snapshot_values(const ParameterStore& store) {
    ParameterStore copy;
    for (const auto& [name, e] : store.entries())
        copy.create(name, e.value.rows, e.value.cols) = e.value;
    return copy;
}

void restore_values(ParameterStore& store, const ParameterStore& snapshot) {
    for (const auto& [name, e] : snapshot.entries()) store.value(name) = e.value;
}

}  // namespace

TrainResult train(const TrainConfig& cfg, VerdictModel& model, const Dataset& train_set,
                  const Dataset& dev_set) {
    if (train_set.records.empty() || dev_set.records.empty())
        throw EmptyDataset("train: empty train or dev set");
    for (const ClaimRecord& r : train_set.records)
        if (!r.claim.gold) throw UnknownLabel("train: unlabeled training record");

    const Modality modality = modality_from_string(cfg.modality);
    RngState run_rng = RngState(cfg.seed).fork("train");
    int64_t step = 0;

    TrainResult result;
    double best = HUGE_VAL;
    ParameterStore best_params = snapshot_values(model.params());
    int best_epoch = 0;

    std::vector<size_t> order(train_set.records.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        RngState shuffle_rng = run_rng.fork("shuffle/" + std::to_string(epoch));
        RngState dropout_rng = run_rng.fork("dropout/" + std::to_string(epoch));
        shuffle_rng.shuffle(order);

        double epoch_loss = 0.0;
        int epoch_count = 0;
        for (size_t start = 0; start < order.size(); start += static_cast<size_t>(cfg.batch_size)) {
            const size_t end = std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
            Tape tape;
            std::vector<ValueId> losses;
            for (size_t i = start; i < end; ++i) {
                const ClaimRecord& r = train_set.records[order[i]];
                try {
                    ValueId p = model.forward_probs(tape, r, modality, Mode::kTrain, &dropout_rng);
                    losses.push_back(tape.cross_entropy(p, static_cast<int>(*r.claim.gold)));
                } catch (const NoEvidence&) {
                    // zero-evidence record: contributes no gradient
                }
            }
            if (losses.empty()) continue;
            for (ValueId l : losses) epoch_loss += tape.value(l).data[0];
            epoch_count += static_cast<int>(losses.size());

            ValueId batch_loss = tape.mean_of(losses);
            AdamConfig adam{.lr = cfg.learning_rate};
            ++step;
            if (cfg.warmup_steps > 0 && step < cfg.warmup_steps)
                adam.lr = cfg.learning_rate * static_cast<double>(step) / cfg.warmup_steps;
            try {
                tape.backward(batch_loss, model.params());
                model.params().adam_step(adam);
            } catch (const NonFiniteGradient& e) {
                throw NonFiniteGradient(std::string(e.what()) + " (epoch " + std::to_string(epoch) +
                                        ", batch at record " + std::to_string(start) + ")");
            }
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = epoch_count > 0 ? epoch_loss / epoch_count : 0.0;
        stats.dev_loss = dataset_loss(model, dev_set, modality);
        const EvalReport dev_report = evaluate(model, dev_set, modality);
        stats.dev_label_accuracy = dev_report.label_accuracy;
        stats.dev_feverous_score = dev_report.feverous_score;
        stats.improved = stats.dev_loss < best;
        if (stats.improved) {
            best = stats.dev_loss;
            best_epoch = epoch;
            best_params = snapshot_values(model.params());
        }
        result.history.push_back(stats);

        if (epoch - best_epoch >= cfg.patience) break;  // patience exhausted
    }

    restore_values(model.params(), best_params);
    result.best_epoch = best_epoch;
    result.best_dev_loss = best;
    return result;
}

namespace {

std::string vocab_sibling_name(const std::string& checkpoint_path) {
    std::filesystem::path p(checkpoint_path);
    std::string stem = p.stem().string();
    return stem + ".vocab.txt";
}

}  // namespace

void save_checkpoint(const std::string& path, const VerdictModel& model,
                     const CheckpointMeta& meta) {
    const std::filesystem::path ckpt(path);
    const std::string vocab_name = vocab_sibling_name(path);
    model.vocab().save((ckpt.parent_path() / vocab_name).string());

    json params;
    for (const auto& [name, e] : model.params().entries())
        params[name] = json{{"rows", e.value.rows}, {"cols", e.value.cols}, {"data", e.value.data}};

    json j{{"version", meta.version},
           {"epoch", meta.epoch},
           {"dev_metrics",
            json{{"dev_loss", meta.dev_loss},
                 {"label_accuracy", meta.dev_label_accuracy},
                 {"feverous_score", meta.dev_feverous_score}}},
           {"train_config", train_config_to_json(meta.config)},
           {"vocab_file", vocab_name},
           {"params", std::move(params)}};

    std::ofstream out(path);
    if (!out) throw FileNotFound("save_checkpoint: cannot open " + path);
    out << j.dump() << '\n';
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    if (!std::filesystem::exists(path)) throw FileNotFound("load_checkpoint: " + path);
    std::ifstream in(path);
    if (!in) throw FileNotFound("load_checkpoint: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("load_checkpoint: bad JSON: " + std::string(e.what()));
    }

    CheckpointMeta meta;
    meta.version = j.at("version").get<int>();
    if (meta.version != 1)
        throw ConfigError("load_checkpoint: unsupported version " + std::to_string(meta.version));
    meta.epoch = j.at("epoch").get<int>();
    const json& dm = j.at("dev_metrics");
    meta.dev_loss = dm.at("dev_loss").get<double>();
    meta.dev_label_accuracy = dm.at("label_accuracy").get<double>();
    meta.dev_feverous_score = dm.at("feverous_score").get<double>();
    meta.config = train_config_from_json(j.at("train_config"));

    const std::filesystem::path dir = std::filesystem::path(path).parent_path();
    Vocabulary vocab = Vocabulary::load((dir / j.at("vocab_file").get<std::string>()).string());

    ParameterStore params;
    for (const auto& [name, pj] : j.at("params").items()) {
        Array2D& v = params.create(name, pj.at("rows").get<int>(), pj.at("cols").get<int>());
        const auto data = pj.at("data").get<std::vector<double>>();
        if (data.size() != v.size())
            throw ConfigError("load_checkpoint: parameter '" + name + "' has wrong payload size");
        v.data = data;
    }

    return LoadedCheckpoint{VerdictModel(meta.config.model, std::move(vocab), std::move(params)),
                            meta};
}

}  // namespace veritab
