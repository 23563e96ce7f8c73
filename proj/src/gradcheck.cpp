#include "veritab/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "veritab/errors.hpp"
#include "veritab/train.hpp"

namespace veritab {

ClaimRecord gradcheck_record() {
    ClaimRecord r;
    r.claim.id = 1;
    r.claim.text = "tower height is 333";
    r.claim.gold = Label::kSupported;
    r.gold_complete = true;
    r.text_evidence.push_back({"g-s0", "the tower height is 333", "fixture"});
    r.text_evidence.push_back({"g-s1", "the bridge span is 120", "fixture"});

    TableEvidence t1;
    t1.id = "g-t0";
    t1.header_rows = 1;
    t1.cells = {{"item", "height", "year"}, {"tower", "333", "1958"}, {"bridge", "120", "1932"}};
    r.table_evidence.push_back(std::move(t1));

    TableEvidence t2;
    t2.id = "g-t1";
    t2.header_rows = 1;
    t2.caption = "city records";
    t2.cells = {{"item", "span"}, {"bridge", "120"}};
    r.table_evidence.push_back(std::move(t2));
    return r;
}

GradCheckReport run_gradcheck(const GradCheckConfig& cfg) {
    const ClaimRecord record = gradcheck_record();

    // Vocabulary from the fixed batch itself; the check has no corpus.
    Dataset tiny;
    tiny.records.push_back(record);
    Vocabulary vocab = build_vocabulary(tiny, cfg.model.vocab_size);

    ModelConfig mc = cfg.model;
    mc.dropout = 0.0;  // the loss must be deterministic
    VerdictModel model(mc, std::move(vocab), cfg.seed);

    const auto loss_fn = [&]() {
        Tape tape;
        ValueId p = model.forward_probs(tape, record, Modality::kBoth, Mode::kTrain, nullptr);
        return tape.value(tape.cross_entropy(p, static_cast<int>(*record.claim.gold))).data[0];
    };

    model.params().zero_grads();
    {
        Tape tape;
        ValueId p = model.forward_probs(tape, record, Modality::kBoth, Mode::kTrain, nullptr);
        tape.backward(tape.cross_entropy(p, static_cast<int>(*record.claim.gold)), model.params());
    }
    if (!cfg.corrupt_group.empty()) {
        Array2D& g = model.params().grad(cfg.corrupt_group);
        for (double& v : g.data) v = v * 1.5 + 0.05;
    }

    RngState sample_rng = RngState(cfg.seed).fork("gradcheck-sample");
    GradCheckReport report;
    for (auto& [name, entry] : model.params().entries()) {
        const int n = static_cast<int>(entry.value.size());
        std::vector<int> indices;
        if (cfg.full || n <= cfg.samples_per_group) {
            indices.resize(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) indices[static_cast<size_t>(i)] = i;
        } else {
            RngState rng = sample_rng.fork(name);
            std::vector<int> all(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) all[static_cast<size_t>(i)] = i;
            rng.shuffle(all);
            indices.assign(all.begin(), all.begin() + cfg.samples_per_group);
            std::sort(indices.begin(), indices.end());
        }

        GradCheckGroup group;
        group.name = name;
        group.checked = static_cast<int>(indices.size());
        for (int idx : indices) {
            double& slot = entry.value.data[static_cast<size_t>(idx)];
            const double saved = slot;
            slot = saved + cfg.h;
            const double fp = loss_fn();
            slot = saved - cfg.h;
            const double fm = loss_fn();
            slot = saved;
            const double fd = (fp - fm) / (2.0 * cfg.h);
            const double an = entry.grad.data[static_cast<size_t>(idx)];
            const double rel = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-5});
            group.max_rel_err = std::max(group.max_rel_err, rel);
        }
        group.pass = group.max_rel_err <= cfg.tolerance;
        report.max_rel_err = std::max(report.max_rel_err, group.max_rel_err);
        report.groups.push_back(std::move(group));
    }
    report.pass = report.max_rel_err <= cfg.tolerance;
    return report;
}

}  // namespace veritab
