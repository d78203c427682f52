#include "oscpipe/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace osc {

namespace {

double mean_index(const std::vector<int>& indices) {
    double sum = 0.0;
    for (const int i : indices) sum += i;
    return sum / static_cast<double>(indices.size());
}

// insert keeping the vector sorted ascending
void insert_sorted(std::vector<int>& indices, int value) {
    indices.insert(std::lower_bound(indices.begin(), indices.end(), value), value);
}

} // namespace

std::pair<LabelSequence, RefinementReport> causal_ordering(LabelSequence seq) {
    RefinementReport report;
    std::vector<int> act = index_set(seq, StateLabel::Actionable);
    std::vector<int> trf = index_set(seq, StateLabel::Transformed);

    while (!act.empty() && !trf.empty() && act.back() > trf.front()) {
        const double mid_act = mean_index(act);
        const double mid_trf = mean_index(trf);
        const double dist_act = std::abs(act.back() - mid_act);
        const double dist_trf = std::abs(trf.front() - mid_trf);
        if (dist_act > dist_trf) {
            // the trailing Actionable label is the likelier outlier
            const int flipped = act.back();
            act.pop_back();
            insert_sorted(trf, flipped);
            seq.labels[flipped] = StateLabel::Transformed;
        } else {
            const int flipped = trf.front();
            trf.erase(trf.begin());
            insert_sorted(act, flipped);
            seq.labels[flipped] = StateLabel::Actionable;
        }
        ++report.flips_causal;
        ++report.iterations;
    }
    return {std::move(seq), report};
}

std::pair<LabelSequence, RefinementReport> ambiguity_resolution(LabelSequence seq) {
    RefinementReport report;
    const std::vector<int> act = index_set(seq, StateLabel::Actionable);
    const std::vector<int> trf = index_set(seq, StateLabel::Transformed);
    if (act.empty() && trf.empty()) return {std::move(seq), report}; // nothing to anchor on

    // boundaries are fixed before any resolution
    const int last_act = act.empty() ? 0 : act.back();
    const int first_trf = trf.empty() ? 0 : trf.front();
    for (auto& [frame, label] : seq.labels) {
        if (label != StateLabel::Ambiguous) continue;
        if (act.empty()) {
            label = StateLabel::Transformed;
        } else if (trf.empty()) {
            label = StateLabel::Actionable;
        } else {
            label = std::abs(frame - last_act) < std::abs(frame - first_trf)
                        ? StateLabel::Actionable
                        : StateLabel::Transformed;
        }
        ++report.resolved_ambiguous;
    }
    return {std::move(seq), report};
}

std::pair<LabelSequence, RefinementReport> refine_sequence(LabelSequence seq) {
    auto [ordered, report] = causal_ordering(std::move(seq));
    auto [resolved, ar_report] = ambiguity_resolution(std::move(ordered));
    report += ar_report;
    return {std::move(resolved), report};
}

std::pair<LabelMap, RefinementReport> refine_clip(LabelMap labels) {
    RefinementReport total;
    for (auto& [track_id, seq] : labels) {
        auto [refined, report] = refine_sequence(std::move(seq));
        seq = std::move(refined);
        total += report;
    }
    return {std::move(labels), total};
}

} // namespace osc
