// veritab command line: synth | train | eval | predict | gradcheck.
// Reports go to stdout as line-delimited JSON; diagnostics to stderr.
// Exit codes: 0 ok, 1 runtime failure, 2 config error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "veritab/config_io.hpp"
#include "veritab/errors.hpp"
#include "veritab/gradcheck.hpp"
#include "veritab/kernels.hpp"
#include "veritab/synth.hpp"
#include "veritab/train.hpp"

namespace {

using nlohmann::json;
using namespace veritab;

int log_level() {
    const char* env = std::getenv("VERITAB_LOG");
    if (!env) return 1;
    const std::string s(env);
    if (s == "quiet") return 0;
    if (s == "debug") return 2;
    return 1;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "veritab: " << msg << "\n";
}

json read_json_file(const std::string& path) {
    if (!std::filesystem::exists(path)) throw FileNotFound("config file not found: " + path);
    std::ifstream in(path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    return j;
}

// Pulls a path-valued key out of a config object so the strict struct
// parsers never see it.
std::string take_path_key(json& j, const char* key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    std::string v;
    try {
        v = j.at(key).get<std::string>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' must be a string");
    }
    j.erase(key);
    return v;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw FileNotFound("cannot write " + path);
    out << content;
}

void echo_config(const std::string& out_dir, const json& effective) {
    write_text_file(out_dir + "/config.echo.json", effective.dump(2) + "\n");
}

json label_histogram(const Dataset& ds) {
    int counts[3] = {0, 0, 0};
    for (const ClaimRecord& r : ds.records)
        if (r.claim.gold) ++counts[static_cast<int>(*r.claim.gold)];
    return json{{"split", split_to_string(ds.split)},
                {"n", ds.records.size()},
                {"S", counts[0]},
                {"R", counts[1]},
                {"NEI", counts[2]}};
}

int cmd_synth(const std::string& config_path, std::string out_dir) {
    json j = read_json_file(config_path);
    out_dir = take_path_key(j, "out_dir", out_dir);
    if (out_dir.empty()) throw ConfigError("synth: no output directory (config key out_dir or --out-dir)");
    const SynthConfig cfg = synth_config_from_json(j);

    std::filesystem::create_directories(out_dir);
    const SynthOutput out = generate(cfg);
    save_dataset(out.train, out_dir + "/train.jsonl");
    save_dataset(out.dev, out_dir + "/dev.jsonl");
    save_dataset(out.test, out_dir + "/test.jsonl");

    json echoed = synth_config_to_json(cfg);
    echoed["out_dir"] = out_dir;
    echo_config(out_dir, echoed);

    for (const Dataset* ds : {&out.train, &out.dev, &out.test})
        std::cout << label_histogram(*ds).dump() << "\n";
    log_info("wrote train/dev/test under " + out_dir);
    return 0;
}

struct TrainCliOverrides {
    std::optional<uint64_t> seed;
    std::optional<double> lr;
    std::optional<int> epochs;
    std::optional<int> batch;
    std::optional<std::string> modality;
};

int cmd_train(const std::string& config_path, std::string train_file, std::string dev_file,
              std::string out_dir, const TrainCliOverrides& over) {
    json j = read_json_file(config_path);
    train_file = take_path_key(j, "train_file", train_file);
    dev_file = take_path_key(j, "dev_file", dev_file);
    out_dir = take_path_key(j, "out_dir", out_dir);
    if (train_file.empty() || dev_file.empty())
        throw ConfigError("train: train_file and dev_file are required (config or flags)");
    if (out_dir.empty()) throw ConfigError("train: no output directory");

    TrainConfig cfg = train_config_from_json(j);
    if (over.seed) cfg.seed = *over.seed;
    if (over.lr) cfg.learning_rate = *over.lr;
    if (over.epochs) cfg.max_epochs = *over.epochs;
    if (over.batch) cfg.batch_size = *over.batch;
    if (over.modality) cfg.modality = *over.modality;
    modality_from_string(cfg.modality);
    if (cfg.max_epochs <= 0 || cfg.batch_size <= 0)
        throw ConfigError("train: overridden epochs/batch must be positive");
    if (cfg.patience > cfg.max_epochs) cfg.patience = cfg.max_epochs;

    const auto [train_set, train_report] = load_dataset(train_file, Split::kTrain);
    const auto [dev_set, dev_report] = load_dataset(dev_file, Split::kDev);
    for (const auto& s : train_report.skipped)
        log_info("train line " + std::to_string(s.line_number) + " skipped: " + s.reason);
    for (const auto& s : dev_report.skipped)
        log_info("dev line " + std::to_string(s.line_number) + " skipped: " + s.reason);

    std::filesystem::create_directories(out_dir);
    json echoed = train_config_to_json(cfg);
    echoed["train_file"] = train_file;
    echoed["dev_file"] = dev_file;
    echoed["out_dir"] = out_dir;
    echo_config(out_dir, echoed);

    log_info("kernel backend: " + kernels::backend_name(kernels::active_backend()));
    Vocabulary vocab = build_vocabulary(train_set, cfg.model.vocab_size);
    VerdictModel model(cfg.model, std::move(vocab), cfg.seed);
    const TrainResult result = train(cfg, model, train_set, dev_set);

    std::ofstream hist(out_dir + "/history.jsonl");
    for (const EpochStats& s : result.history) hist << epoch_stats_to_json(s).dump() << "\n";
    hist.close();

    CheckpointMeta meta;
    meta.epoch = result.best_epoch;
    meta.dev_loss = result.best_dev_loss;
    meta.config = cfg;
    const EvalReport dev_eval = evaluate(model, dev_set, modality_from_string(cfg.modality));
    meta.dev_label_accuracy = dev_eval.label_accuracy;
    meta.dev_feverous_score = dev_eval.feverous_score;
    save_checkpoint(out_dir + "/checkpoint.json", model, meta);

    std::cout << json{{"best_epoch", result.best_epoch},
                      {"dev_loss", result.best_dev_loss},
                      {"dev_label_accuracy", dev_eval.label_accuracy},
                      {"dev_feverous_score", dev_eval.feverous_score},
                      {"epochs_run", result.history.size()}}
                     .dump()
              << "\n";
    return 0;
}

Modality modality_from_flags(bool text_only, bool table_only) {
    if (text_only && table_only) throw ConfigError("--text-only and --table-only are exclusive");
    if (text_only) return Modality::kTextOnly;
    if (table_only) return Modality::kTableOnly;
    return Modality::kBoth;
}

int cmd_eval(const std::string& ckpt_path, const std::string& data_path, bool text_only,
             bool table_only) {
    const Modality modality = modality_from_flags(text_only, table_only);
    auto loaded = load_checkpoint(ckpt_path);
    const auto [data, report] = load_dataset(data_path, Split::kDev);
    for (const auto& s : report.skipped)
        log_info("line " + std::to_string(s.line_number) + " skipped: " + s.reason);
    const EvalReport r = evaluate(loaded.model, data, modality);
    json out = eval_report_to_json(r);
    out["modality"] = modality_to_string(modality);
    std::cout << out.dump() << "\n";
    return 0;
}

int cmd_predict(const std::string& ckpt_path, const std::string& data_path,
                const std::string& out_file) {
    auto loaded = load_checkpoint(ckpt_path);
    const auto [data, report] = load_dataset(data_path, Split::kTest);
    for (const auto& s : report.skipped)
        log_info("line " + std::to_string(s.line_number) + " skipped: " + s.reason);

    std::ofstream file_out;
    if (!out_file.empty()) {
        file_out.open(out_file);
        if (!file_out) throw FileNotFound("cannot write " + out_file);
    }
    std::ostream& out = out_file.empty() ? std::cout : file_out;
    for (const ClaimRecord& r : data.records) {
        const auto pred = loaded.model.predict(r);
        out << json{{"claim_id", r.claim.id},
                    {"label", label_to_string(pred.label)},
                    {"p", pred.dist.p}}
                   .dump()
            << "\n";
    }
    return 0;
}

int cmd_gradcheck(const std::string& config_path, bool full, int samples, double h,
                  uint64_t seed, const std::string& corrupt) {
    GradCheckConfig cfg;
    // Defaults: a 2-layer / 4-head / D=64 stack on the built-in 1-claim batch.
    cfg.model.embed_dim = 64;
    cfg.model.layers = 2;
    cfg.model.heads = 4;
    cfg.model.ffn_hidden = 128;
    cfg.model.vocab_size = 64;
    cfg.model.max_seq_len = 48;
    cfg.model.attention_hidden = 64;
    cfg.model.attention_heads = 4;
    cfg.model.mlp_hidden = 64;
    cfg.model.max_table_rows = 8;
    cfg.model.max_table_cols = 8;
    if (!config_path.empty()) cfg.model = model_config_from_json(read_json_file(config_path));
    cfg.full = full;
    cfg.samples_per_group = samples;
    cfg.h = h;
    cfg.seed = seed;
    cfg.corrupt_group = corrupt;

    const GradCheckReport report = run_gradcheck(cfg);
    for (const GradCheckGroup& g : report.groups)
        std::cout << json{{"group", g.name},
                          {"max_rel_err", g.max_rel_err},
                          {"checked", g.checked},
                          {"pass", g.pass}}
                         .dump()
                  << "\n";
    std::cout << json{{"pass", report.pass},
                      {"max_rel_err", report.max_rel_err},
                      {"groups", report.groups.size()},
                      {"tolerance", cfg.tolerance}}
                     .dump()
              << "\n";
    return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dual-encoder fact verification over text and table evidence"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a seeded synthetic dataset");
    std::string synth_config, synth_out;
    synth->add_option("--config", synth_config, "synth config JSON")->required();
    synth->add_option("--out-dir", synth_out, "output directory");

    // train
    auto* train_cmd = app.add_subcommand("train", "train a model and write a checkpoint");
    std::string train_config, train_file, dev_file, train_out;
    TrainCliOverrides over;
    uint64_t seed_flag = 0;
    double lr_flag = 0.0;
    int epochs_flag = 0, batch_flag = 0;
    std::string modality_flag;
    train_cmd->add_option("--config", train_config, "train config JSON")->required();
    train_cmd->add_option("--train", train_file, "training data (jsonl)");
    train_cmd->add_option("--dev", dev_file, "dev data (jsonl)");
    train_cmd->add_option("--out-dir", train_out, "output directory");
    auto* seed_opt = train_cmd->add_option("--seed", seed_flag, "override config seed");
    auto* lr_opt = train_cmd->add_option("--lr", lr_flag, "override learning rate");
    auto* epochs_opt = train_cmd->add_option("--epochs", epochs_flag, "override max epochs");
    auto* batch_opt = train_cmd->add_option("--batch", batch_flag, "override batch size");
    auto* modality_opt =
        train_cmd->add_option("--modality", modality_flag, "both|text_only|table_only");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a labeled dataset");
    std::string eval_ckpt, eval_data;
    bool flag_text_only = false, flag_table_only = false, flag_both = false;
    eval_cmd->add_option("--checkpoint", eval_ckpt, "checkpoint JSON")->required();
    eval_cmd->add_option("--data", eval_data, "dataset (jsonl)")->required();
    eval_cmd->add_flag("--text-only", flag_text_only, "mask table evidence at assembly");
    eval_cmd->add_flag("--table-only", flag_table_only, "mask text evidence at assembly");
    eval_cmd->add_flag("--both", flag_both, "use both modalities (default)");

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "emit per-claim predictions");
    std::string pred_ckpt, pred_data, pred_out;
    predict_cmd->add_option("--checkpoint", pred_ckpt, "checkpoint JSON")->required();
    predict_cmd->add_option("--data", pred_data, "dataset (jsonl, labels optional)")->required();
    predict_cmd->add_option("--out", pred_out, "write predictions here instead of stdout");

    // gradcheck
    auto* grad_cmd = app.add_subcommand("gradcheck", "backward vs finite differences");
    std::string grad_config, grad_corrupt;
    bool grad_full = false;
    int grad_samples = 12;
    double grad_h = 1e-5;
    uint64_t grad_seed = 7;
    grad_cmd->add_option("--config", grad_config, "model config JSON (default: 2-layer/4-head/D=64)");
    grad_cmd->add_flag("--full", grad_full, "check every scalar entry (slow on big configs)");
    grad_cmd->add_option("--samples", grad_samples, "sampled entries per parameter group");
    grad_cmd->add_option("--step", grad_h, "central difference step h");
    grad_cmd->add_option("--seed", grad_seed, "init / sampling seed");
    grad_cmd->add_option("--corrupt", grad_corrupt,
                         "test hook: corrupt this group's gradient (must fail)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (synth->parsed()) return cmd_synth(synth_config, synth_out);
        if (train_cmd->parsed()) {
            if (seed_opt->count()) over.seed = seed_flag;
            if (lr_opt->count()) over.lr = lr_flag;
            if (epochs_opt->count()) over.epochs = epochs_flag;
            if (batch_opt->count()) over.batch = batch_flag;
            if (modality_opt->count()) over.modality = modality_flag;
            return cmd_train(train_config, train_file, dev_file, train_out, over);
        }
        if (eval_cmd->parsed()) {
            if (flag_both && (flag_text_only || flag_table_only))
                throw ConfigError("--both conflicts with --text-only/--table-only");
            return cmd_eval(eval_ckpt, eval_data, flag_text_only, flag_table_only);
        }
        if (predict_cmd->parsed()) return cmd_predict(pred_ckpt, pred_data, pred_out);
        if (grad_cmd->parsed())
            return cmd_gradcheck(grad_config, grad_full, grad_samples, grad_h, grad_seed,
                                 grad_corrupt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
