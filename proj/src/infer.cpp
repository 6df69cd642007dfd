#include "tenet/infer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <thread>

namespace tenet {

std::vector<NodePair> all_pairs(const std::vector<EventStream>& streams, std::size_t min_events) {
    std::vector<std::string> active;
    for (const auto& s : streams)
        if (s.size() >= min_events) active.push_back(s.node_id);
    std::sort(active.begin(), active.end());
    active.erase(std::unique(active.begin(), active.end()), active.end());

    std::vector<NodePair> pairs;
    for (const auto& a : active)
        for (const auto& b : active)
            if (a != b) pairs.push_back({a, b});
    return pairs;
}

EdgeScoreSet score_edges(const std::vector<EventStream>& streams, const std::vector<NodePair>& candidates,
                         const BinningScheme& scheme, const ScoreOptions& options) {
    scheme.validate();
    EdgeScoreSet out;
    out.scheme = scheme;
    out.method = options.method;
    out.policy = options.policy;

    std::map<std::string, const EventStream*> by_id;
    for (const auto& s : streams) by_id[s.node_id] = &s;

    std::vector<NodePair> pairs(candidates);
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    struct Slot {
        std::optional<TEResult> result;
        std::string error;
    };
    std::vector<Slot> slots(pairs.size());

    auto work = [&](std::size_t i) {
        const NodePair& p = pairs[i];
        if (p.source == p.target) {
            slots[i].error = "self pair";
            return;
        }
        auto src = by_id.find(p.source);
        auto tgt = by_id.find(p.target);
        if (src == by_id.end() || tgt == by_id.end()) {
            slots[i].error = "unknown node";
            return;
        }
        try {
            slots[i].result = transfer_entropy(*tgt->second, *src->second, scheme, options.window_end,
                                               options.method);
        } catch (const Error& e) {
            slots[i].error = e.what();
        }
    };

    unsigned jobs = options.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.jobs;
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(1, pairs.size())));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < pairs.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned j = 0; j < jobs; ++j)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < pairs.size(); i = next++) work(i);
            });
    }

    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (slots[i].result) out.scores.push_back(std::move(*slots[i].result));
        else out.skipped.push_back({pairs[i], slots[i].error});
    }
    return out;
}

std::vector<double> candidate_thresholds(const std::vector<double>& scores) {
    std::vector<double> distinct(scores);
    std::sort(distinct.begin(), distinct.end(), std::greater<>());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<double> cuts{std::numeric_limits<double>::infinity()};
    for (double v : distinct) cuts.push_back(std::nextafter(v, -std::numeric_limits<double>::infinity()));
    return cuts;
}

namespace {

WeightedDigraph cut(const EdgeScoreSet& scores, double threshold) {
    WeightedDigraph g;
    g.threshold = threshold;
    std::set<std::string> nodes;
    for (const auto& r : scores.scores) {
        nodes.insert(r.source);
        nodes.insert(r.target);
        if (r.te_corrected > threshold) g.edges.push_back({r.source, r.target, r.te_corrected, r.te_raw, r.n});
    }
    g.nodes.assign(nodes.begin(), nodes.end());
    return g;
}

}  // namespace

WeightedDigraph apply_threshold(const EdgeScoreSet& scores, const ThresholdPolicy& policy,
                                const std::optional<std::vector<NodePair>>& truth) {
    if (const auto* fixed = std::get_if<FixedThreshold>(&policy)) {
        if (std::isnan(fixed->value)) throw ConfigError("threshold must not be NaN");
        return cut(scores, fixed->value);
    }
    if (!truth) throw ConfigError("F-measure threshold selection requires ground truth");

    const std::set<NodePair> positives(truth->begin(), truth->end());
    std::vector<std::pair<double, bool>> labeled;
    std::vector<double> values;
    for (const auto& r : scores.scores) {
        labeled.emplace_back(r.te_corrected, positives.count({r.source, r.target}) > 0);
        values.push_back(r.te_corrected);
    }

    // F1 = 2tp / (2tp + fp + fn); compared as exact fractions so ties resolve
    // toward the larger (earlier) threshold.
    double best_threshold = std::numeric_limits<double>::infinity();
    std::uint64_t best_num = 0, best_den = 1;
    for (double t : candidate_thresholds(values)) {
        std::uint64_t tp = 0, fp = 0;
        for (const auto& [v, pos] : labeled)
            if (v > t) ++(pos ? tp : fp);
        const std::uint64_t fn = positives.size() - tp;
        const std::uint64_t num = 2 * tp, den = 2 * tp + fp + fn;
        if (den == 0) continue;
        if (num * best_den > best_num * den) {
            best_num = num;
            best_den = den;
            best_threshold = t;
        }
    }
    return cut(scores, best_threshold);
}

std::vector<NodeInfluence> outgoing_influence(const EdgeScoreSet& scores) {
    std::map<std::string, double> totals;
    for (const auto& r : scores.scores) {
        totals[r.source] += r.te_corrected;
        totals.try_emplace(r.target, 0.0);
    }
    std::vector<NodeInfluence> ranking;
    for (const auto& [node, total] : totals) ranking.push_back({node, total});
    std::stable_sort(ranking.begin(), ranking.end(),
                     [](const NodeInfluence& a, const NodeInfluence& b) { return a.outgoing > b.outgoing; });
    return ranking;
}

}  // namespace tenet
