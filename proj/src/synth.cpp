#include "veritab/synth.hpp"

#include <algorithm>

#include "veritab/errors.hpp"
#include "veritab/rng.hpp"

namespace veritab {

namespace {

const char* const kAttributePool[] = {"mass", "width", "age",   "rank",  "speed", "height",
                                      "power", "grade", "size",  "span",  "depth", "cost",
                                      "score", "level", "range", "tier"};
constexpr int kAttributePoolSize = static_cast<int>(std::size(kAttributePool));

std::vector<std::string> make_entity_pool(int n, RngState rng) {
    const std::string consonants = "bdfgklmnprstvz";
    const std::string vowels = "aeiou";
    std::vector<std::string> all;
    for (char c1 : consonants)
        for (char v1 : vowels)
            for (char c2 : consonants)
                for (char v2 : vowels)
                    all.push_back(std::string{c1, v1, c2, v2});
    rng.shuffle(all);
    all.resize(static_cast<size_t>(n));
    return all;
}

struct Pools {
    std::vector<std::string> entities;
    std::vector<std::string> attributes;
    int n_values;
};

std::string fact_sentence(const std::string& entity, const std::string& attr, int value) {
    return entity + " " + attr + " is " + std::to_string(value);
}

// A deciding sentence either confirms the claimed value ("is v") or negates
// it ("not v"); disagreement is always rendered as an explicit negation of
// the claim's value.
std::string stance_sentence(const std::string& entity, const std::string& attr, bool agree,
                            int claim_value) {
    return entity + " " + attr + (agree ? " is " : " not ") + std::to_string(claim_value);
}

// Distractors carry no value statement at all, so no sentence other than the
// deciding one can ever influence the label rule.
std::string filler_sentence(const std::string& entity, const std::string& attr) {
    return entity + " holds " + attr;
}

// A value different from avoid, uniform over the rest.
int other_value(RngState& rng, int n_values, int avoid) {
    const int v = rng.next_int(n_values - 1);
    return v >= avoid ? v + 1 : v;
}

struct RecordPlan {
    Label label;
    bool text_present = false;   // a sentence takes a stance on (E, A)
    bool text_agrees = true;
    bool table_present = false;  // a table cell takes a stance on (E, A)
    bool table_agrees = true;
};

RecordPlan plan_record(RngState& rng, const std::string& task, Label label) {
    RecordPlan p;
    p.label = label;
    if (task == "text_only") {
        p.table_present = false;
        p.text_present = label != Label::kNotEnoughInfo;
        p.text_agrees = label == Label::kSupported;
        return p;
    }
    if (task == "table_only") {
        p.text_present = false;
        p.table_present = label != Label::kNotEnoughInfo;
        p.table_agrees = label == Label::kSupported;
        return p;
    }
    // joint
    switch (label) {
        case Label::kSupported:
            p.text_present = p.table_present = true;
            p.text_agrees = p.table_agrees = true;
            break;
        case Label::kRefuted: {
            p.text_present = p.table_present = true;
            const int sub = rng.next_int(3);  // text wrong | table wrong | both wrong
            p.text_agrees = sub == 1;
            p.table_agrees = sub == 0;
            break;
        }
        case Label::kNotEnoughInfo: {
            // The deciding sentence is withheld, half the time the cell too.
            p.text_present = false;
            p.table_present = rng.next_int(2) == 0;
            p.table_agrees = true;  // the surviving cell, if any, agrees
            break;
        }
    }
    return p;
}

// A (entity, attribute) pair different from the claim's, so distractors can
// never decide the claim.
std::pair<int, int> distractor_pair(RngState& rng, const Pools& pools, int entity, int attr) {
    for (;;) {
        const int e = rng.next_int(static_cast<int>(pools.entities.size()));
        const int a = rng.next_int(static_cast<int>(pools.attributes.size()));
        if (e != entity || a != attr) return {e, a};
    }
}

// 3x3 table: header ["item", attrX, attrY]; two entity rows. A deciding
// table carries the claim entity's row with the claim attribute's column;
// that cell either confirms the claimed value or negates it ("not <v>").
TableEvidence make_table(RngState& rng, const Pools& pools, const std::string& rec_tag, int idx,
                         int claim_entity, int claim_attr, bool deciding, bool agrees,
                         int claim_value) {
    const int n_attr = static_cast<int>(pools.attributes.size());
    int attr_a, attr_b;
    if (deciding) {
        attr_a = claim_attr;
        attr_b = rng.next_int(n_attr - 1);
        if (attr_b >= claim_attr) ++attr_b;
        if (rng.next_int(2) == 1) std::swap(attr_a, attr_b);
    } else {
        // Neither column may be the claim attribute unless no entity row is
        // the claim entity (rows below never use it), so any columns work.
        attr_a = rng.next_int(n_attr);
        attr_b = rng.next_int(n_attr - 1);
        if (attr_b >= attr_a) ++attr_b;
    }

    const auto non_claim_entity = [&]() {
        for (;;) {
            const int e = rng.next_int(static_cast<int>(pools.entities.size()));
            if (e != claim_entity) return e;
        }
    };

    TableEvidence t;
    t.id = rec_tag + "-t" + std::to_string(idx);
    t.header_rows = 1;
    t.cells = {{"item", pools.attributes[static_cast<size_t>(attr_a)],
                pools.attributes[static_cast<size_t>(attr_b)]}};
    const int row_entities[2] = {deciding ? claim_entity : non_claim_entity(), non_claim_entity()};
    for (int r = 0; r < 2; ++r) {
        std::vector<std::string> row;
        row.push_back(pools.entities[static_cast<size_t>(row_entities[r])]);
        for (int col_attr : {attr_a, attr_b}) {
            if (deciding && r == 0 && col_attr == claim_attr)
                row.push_back(agrees ? std::to_string(claim_value)
                                     : "not " + std::to_string(claim_value));
            else  // never the claimed value: only the deciding cell may echo it
                row.push_back(std::to_string(other_value(rng, pools.n_values, claim_value)));
        }
        t.cells.push_back(std::move(row));
    }
    return t;
}

ClaimRecord make_record(RngState& rng, const Pools& pools, const std::string& task, int64_t id,
                        Label label) {
    const int entity = rng.next_int(static_cast<int>(pools.entities.size()));
    const int attr = rng.next_int(static_cast<int>(pools.attributes.size()));
    const int claim_value = rng.next_int(pools.n_values);
    const RecordPlan plan = plan_record(rng, task, label);
    const std::string rec_tag = "r" + std::to_string(id);

    ClaimRecord rec;
    rec.claim.id = id;
    rec.claim.text = fact_sentence(pools.entities[static_cast<size_t>(entity)],
                                   pools.attributes[static_cast<size_t>(attr)], claim_value);
    rec.claim.gold = label;
    rec.gold_complete = true;

    const int deciding_sentence_slot = plan.text_present ? rng.next_int(5) : -1;
    for (int i = 0; i < 5; ++i) {
        TextEvidence e;
        e.id = rec_tag + "-s" + std::to_string(i);
        e.source = "synth";
        if (i == deciding_sentence_slot) {
            e.sentence = stance_sentence(pools.entities[static_cast<size_t>(entity)],
                                         pools.attributes[static_cast<size_t>(attr)],
                                         plan.text_agrees, claim_value);
        } else {
            const auto [de, da] = distractor_pair(rng, pools, entity, attr);
            e.sentence = filler_sentence(pools.entities[static_cast<size_t>(de)],
                                         pools.attributes[static_cast<size_t>(da)]);
        }
        rec.text_evidence.push_back(std::move(e));
    }

    const int deciding_table_slot = plan.table_present ? rng.next_int(2) : -1;
    for (int i = 0; i < 2; ++i)
        rec.table_evidence.push_back(make_table(rng, pools, rec_tag, i, entity, attr,
                                                i == deciding_table_slot, plan.table_agrees,
                                                claim_value));
    return rec;
}

Dataset make_split(const SynthConfig& cfg, const Pools& pools, Split split, int count,
                   int64_t id_base) {
    RngState rng = RngState(cfg.seed).fork("split/" + split_to_string(split));

    std::vector<Label> labels;
    labels.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) labels.push_back(static_cast<Label>(i % 3));
    rng.shuffle(labels);

    Dataset ds;
    ds.split = split;
    ds.records.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i)
        ds.records.push_back(make_record(rng, pools, cfg.task, id_base + i + 1,
                                         labels[static_cast<size_t>(i)]));
    return ds;
}

}  // namespace

SynthOutput generate(const SynthConfig& cfg) {
    if (cfg.n_train <= 0 || cfg.n_dev <= 0 || cfg.n_test <= 0)
        throw ConfigError("synth: split sizes must be positive");
    if (cfg.n_entities < 2 || cfg.n_entities > 1000)
        throw ConfigError("synth: n_entities out of range (2..1000)");
    if (cfg.n_attributes < 2 || cfg.n_attributes > kAttributePoolSize)
        throw ConfigError("synth: n_attributes out of range (2.." +
                          std::to_string(kAttributePoolSize) + ")");
    if (cfg.n_values < 2) throw ConfigError("synth: n_values must be >= 2");
    if (cfg.task != "text_only" && cfg.task != "table_only" && cfg.task != "joint")
        throw ConfigError("synth: unknown task '" + cfg.task + "'");

    Pools pools;
    pools.entities = make_entity_pool(cfg.n_entities, RngState(cfg.seed).fork("entities"));
    pools.attributes.assign(kAttributePool, kAttributePool + cfg.n_attributes);
    pools.n_values = cfg.n_values;

    SynthOutput out;
    out.train = make_split(cfg, pools, Split::kTrain, cfg.n_train, 0);
    out.dev = make_split(cfg, pools, Split::kDev, cfg.n_dev, 1000000);
    out.test = make_split(cfg, pools, Split::kTest, cfg.n_test, 2000000);
    return out;
}

}  // namespace veritab
