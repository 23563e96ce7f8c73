#include "veritab/config_io.hpp"

#include <set>

#include "veritab/errors.hpp"

namespace veritab {

using nlohmann::json;

namespace {

// Reads j[key] into out when present; tracks consumed keys for rejection of
// unknown ones.
class StrictReader {
public:
    explicit StrictReader(const json& j, std::string scope) : j_(j), scope_(std::move(scope)) {
        if (!j_.is_object()) throw ConfigError(scope_ + ": expected a JSON object");
    }

    template <typename T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(scope_ + ": bad value type for key '" + std::string(key) + "'");
        }
    }

    const json* subobject(const char* key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key))
                throw ConfigError(scope_ + ": unknown key '" + key + "'");
    }

private:
    const json& j_;
    std::string scope_;
    std::set<std::string> seen_;
};

}  // namespace

json model_config_to_json(const ModelConfig& c) {
    return json{{"embed_dim", c.embed_dim},
                {"layers", c.layers},
                {"heads", c.heads},
                {"ffn_hidden", c.ffn_hidden},
                {"vocab_size", c.vocab_size},
                {"max_seq_len", c.max_seq_len},
                {"attention_hidden", c.attention_hidden},
                {"attention_heads", c.attention_heads},
                {"mlp_hidden", c.mlp_hidden},
                {"dropout", c.dropout},
                {"dropout_placement", c.dropout_placement},
                {"text_encoder", c.text_encoder},
                {"table_encoder", c.table_encoder},
                {"budget_text", c.budget_text},
                {"budget_table", c.budget_table},
                {"max_table_rows", c.max_table_rows},
                {"max_table_cols", c.max_table_cols}};
}

ModelConfig model_config_from_json(const json& j) {
    ModelConfig c;
    StrictReader r(j, "model config");
    r.read("embed_dim", c.embed_dim);
    r.read("layers", c.layers);
    r.read("heads", c.heads);
    r.read("ffn_hidden", c.ffn_hidden);
    r.read("vocab_size", c.vocab_size);
    r.read("max_seq_len", c.max_seq_len);
    r.read("attention_hidden", c.attention_hidden);
    r.read("attention_heads", c.attention_heads);
    r.read("mlp_hidden", c.mlp_hidden);
    r.read("dropout", c.dropout);
    r.read("dropout_placement", c.dropout_placement);
    r.read("text_encoder", c.text_encoder);
    r.read("table_encoder", c.table_encoder);
    r.read("budget_text", c.budget_text);
    r.read("budget_table", c.budget_table);
    r.read("max_table_rows", c.max_table_rows);
    r.read("max_table_cols", c.max_table_cols);
    r.finish();

    if (c.embed_dim <= 0 || c.layers <= 0 || c.heads <= 0 || c.ffn_hidden <= 0 ||
        c.vocab_size <= 4 || c.max_seq_len < 2 || c.attention_hidden <= 0 ||
        c.attention_heads <= 0 || c.mlp_hidden < 2 || c.budget_text < 0 || c.budget_table < 0 ||
        c.max_table_rows <= 0 || c.max_table_cols <= 0)
        throw ConfigError("model config: dimensions and budgets must be positive");
    if (c.budget_text + c.budget_table <= 0)
        throw ConfigError("model config: at least one evidence budget must be positive");
    if (c.dropout < 0.0 || c.dropout >= 1.0)
        throw ConfigError("model config: dropout must lie in [0, 1)");
    if (c.embed_dim % c.heads != 0)
        throw ConfigError("model config: embed_dim must divide into heads");
    if (c.attention_hidden % c.attention_heads != 0)
        throw ConfigError("model config: attention_hidden must divide into attention_heads");
    return c;
}

json train_config_to_json(const TrainConfig& c) {
    return json{{"seed", c.seed},
                {"learning_rate", c.learning_rate},
                {"batch_size", c.batch_size},
                {"max_epochs", c.max_epochs},
                {"patience", c.patience},
                {"warmup_steps", c.warmup_steps},
                {"modality", c.modality},
                {"model", model_config_to_json(c.model)}};
}

TrainConfig train_config_from_json(const json& j) {
    TrainConfig c;
    StrictReader r(j, "train config");
    r.read("seed", c.seed);
    r.read("learning_rate", c.learning_rate);
    r.read("batch_size", c.batch_size);
    r.read("max_epochs", c.max_epochs);
    r.read("patience", c.patience);
    r.read("warmup_steps", c.warmup_steps);
    r.read("modality", c.modality);
    if (const json* m = r.subobject("model")) c.model = model_config_from_json(*m);
    r.finish();

    if (c.batch_size <= 0 || c.max_epochs <= 0 || c.patience <= 0)
        throw ConfigError("train config: counts must be positive");
    if (c.warmup_steps < 0) throw ConfigError("train config: negative warmup_steps");
    if (c.patience > c.max_epochs)
        throw ConfigError("train config: patience must not exceed max_epochs");
    if (c.learning_rate < 0.0) throw ConfigError("train config: negative learning rate");
    modality_from_string(c.modality);  // validates
    return c;
}

json synth_config_to_json(const SynthConfig& c) {
    return json{{"seed", c.seed},     {"n_train", c.n_train},
                {"n_dev", c.n_dev},   {"n_test", c.n_test},
                {"task", c.task},     {"n_entities", c.n_entities},
                {"n_attributes", c.n_attributes}, {"n_values", c.n_values}};
}

SynthConfig synth_config_from_json(const json& j) {
    SynthConfig c;
    StrictReader r(j, "synth config");
    r.read("seed", c.seed);
    r.read("n_train", c.n_train);
    r.read("n_dev", c.n_dev);
    r.read("n_test", c.n_test);
    r.read("task", c.task);
    r.read("n_entities", c.n_entities);
    r.read("n_attributes", c.n_attributes);
    r.read("n_values", c.n_values);
    r.finish();
    return c;
}

json eval_report_to_json(const EvalReport& r) {
    const char* names[3] = {"S", "R", "NEI"};
    json confusion;
    for (int g = 0; g < 3; ++g) {
        json row;
        for (int p = 0; p < 3; ++p) row[names[p]] = r.confusion[g][p];
        confusion[names[g]] = std::move(row);
    }
    return json{{"n_claims", r.n_claims},
                {"label_accuracy", r.label_accuracy},
                {"feverous_score", r.feverous_score},
                {"confusion", std::move(confusion)}};
}

json epoch_stats_to_json(const EpochStats& s) {
    return json{{"epoch", s.epoch},
                {"train_loss", s.train_loss},
                {"dev_loss", s.dev_loss},
                {"dev_label_accuracy", s.dev_label_accuracy},
                {"dev_feverous_score", s.dev_feverous_score},
                {"improved", s.improved}};
}

}  // namespace veritab
