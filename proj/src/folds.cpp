#include "phq/folds.hpp"

#include <algorithm>
#include <map>

#include "phq/errors.hpp"
#include "phq/rng.hpp"

namespace phq {

int severity_bin(int phq8) {
    if (phq8 < 0 || phq8 > 24) throw DataError("PHQ-8 outside [0, 24]: " + std::to_string(phq8));
    if (phq8 <= 4) return 0;
    if (phq8 <= 9) return 1;
    if (phq8 <= 14) return 2;
    return 3;
}

FoldPlan make_folds(const std::vector<SampleMeta>& meta, size_t n_folds, uint64_t seed) {
    if (n_folds < 2) throw FoldError("need at least 2 folds");
    if (meta.empty()) throw FoldError("no samples to split");

    std::vector<std::string> subjects; // first-appearance order
    std::map<std::string, int> severity;
    for (const auto& s : meta) {
        auto it = severity.find(s.subject_id);
        if (it == severity.end()) {
            subjects.push_back(s.subject_id);
            severity[s.subject_id] = s.phq8;
        } else {
            it->second = std::max(it->second, s.phq8);
        }
        severity_bin(s.phq8); // validates the score range
    }
    if (subjects.size() < n_folds)
        throw FoldError("fewer subjects (" + std::to_string(subjects.size()) + ") than folds (" +
                        std::to_string(n_folds) + ")");

    std::vector<std::vector<std::string>> bins(4);
    for (const auto& id : subjects) bins[size_t(severity_bin(severity[id]))].push_back(id);

    FoldPlan plan;
    plan.n_folds = n_folds;
    plan.fold_subjects.resize(n_folds);

    std::map<std::string, int> subject_fold;
    size_t pointer = 0; // continues across bins so totals stay even
    for (size_t b = 0; b < bins.size(); ++b) {
        Rng rng(Rng::derive(seed, b));
        rng.shuffle(bins[b]);
        for (const auto& id : bins[b]) {
            const int f = int(pointer % n_folds);
            subject_fold[id] = f;
            plan.fold_subjects[size_t(f)].push_back(id);
            ++pointer;
        }
    }

    plan.sample_fold.resize(meta.size());
    plan.test_rows.resize(n_folds);
    for (size_t r = 0; r < meta.size(); ++r) {
        const int f = subject_fold.at(meta[r].subject_id);
        plan.sample_fold[r] = f;
        plan.test_rows[size_t(f)].push_back(r);
    }
    for (const auto& rows : plan.test_rows)
        if (rows.empty()) throw FoldError("a fold received no samples");
    return plan;
}

} // namespace phq
