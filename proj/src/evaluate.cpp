#include "tenet/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "tenet/random.hpp"

namespace tenet {

LabeledScores label_scores(const EdgeScoreSet& scores, const std::vector<NodePair>& truth) {
    const std::set<NodePair> positives(truth.begin(), truth.end());
    LabeledScores out;
    for (const auto& r : scores.scores)
        (positives.count({r.source, r.target}) ? out.positives : out.negatives).push_back(r.te_corrected);
    return out;
}

RocCurve roc(const LabeledScores& labeled) {
    const std::size_t p = labeled.positives.size(), n = labeled.negatives.size();
    if (p == 0 || n == 0) throw Error("degenerate truth: need both positive and negative pairs");

    std::vector<std::pair<double, bool>> all;
    for (double v : labeled.positives) all.emplace_back(v, true);
    for (double v : labeled.negatives) all.emplace_back(v, false);
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    RocCurve curve;
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < all.size();) {
        const double v = all[i].first;
        for (; i < all.size() && all[i].first == v; ++i) ++(all[i].second ? tp : fp);
        curve.points.push_back({v, static_cast<double>(fp) / static_cast<double>(n),
                                static_cast<double>(tp) / static_cast<double>(p)});
    }
    return curve;
}

RocCurve roc(const EdgeScoreSet& scores, const std::vector<NodePair>& truth) {
    return roc(label_scores(scores, truth));
}

double auc(const RocCurve& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
    }
    return area;
}

double mann_whitney_auc(const LabeledScores& labeled) {
    if (labeled.positives.empty() || labeled.negatives.empty())
        throw Error("degenerate truth: need both positive and negative pairs");
    double wins = 0.0;
    for (double a : labeled.positives)
        for (double b : labeled.negatives) wins += a > b ? 1.0 : a == b ? 0.5 : 0.0;
    return wins / (static_cast<double>(labeled.positives.size()) * static_cast<double>(labeled.negatives.size()));
}

Classification classify(const WeightedDigraph& graph, const std::vector<NodePair>& truth) {
    const std::set<NodePair> positives(truth.begin(), truth.end());
    Classification c;
    for (const auto& e : graph.edges) ++(positives.count({e.source, e.target}) ? c.true_positives : c.false_positives);
    c.false_negatives = positives.size() - c.true_positives;
    const double tp = static_cast<double>(c.true_positives);
    if (c.true_positives + c.false_positives > 0) c.precision = tp / static_cast<double>(c.true_positives + c.false_positives);
    if (!positives.empty()) c.recall = tp / static_cast<double>(positives.size());
    if (c.true_positives > 0) c.f1 = 2.0 * c.precision * c.recall / (c.precision + c.recall);
    return c;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw Error("correlation needs equal-length inputs");
    if (x.size() < 2) throw Error("undefined correlation: need at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw Error("undefined correlation: zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CascadeCounts count_cascades(const std::vector<EventStream>& streams, const std::vector<NodePair>& candidates,
                             OriginRule rule) {
    CascadeCounts out;
    const std::set<NodePair> wanted(candidates.begin(), candidates.end());
    for (const auto& p : wanted) out.counts[p] = 0;

    struct Emissions {
        std::map<std::string, std::pair<Seconds, Seconds>> first_last;   // node -> (first, last)
    };
    std::map<std::string, Emissions> items;
    for (const auto& s : streams) {
        if (!s.has_item_ids()) {
            ++out.streams_without_items;
            continue;
        }
        for (std::size_t i = 0; i < s.events.size(); ++i) {
            if (s.item_ids[i].empty()) continue;
            auto [it, fresh] = items[s.item_ids[i]].first_last.try_emplace(s.node_id, s.events[i], s.events[i]);
            if (!fresh) {
                it->second.first = std::min(it->second.first, s.events[i]);
                it->second.second = std::max(it->second.second, s.events[i]);
            }
        }
    }

    auto bump = [&](const std::string& x, const std::string& y) {
        auto it = out.counts.find({x, y});
        if (it != out.counts.end()) ++it->second;
    };
    for (const auto& [item, em] : items) {
        if (rule == OriginRule::global) {
            // Earliest emitter; equal times resolve to the smaller node id.
            const std::string* origin = nullptr;
            Seconds t0 = 0.0;
            for (const auto& [node, fl] : em.first_last)
                if (!origin || fl.first < t0) {
                    origin = &node;
                    t0 = fl.first;
                }
            for (const auto& [node, fl] : em.first_last)
                if (node != *origin && fl.second > t0) bump(*origin, node);
        } else {
            for (const auto& [x, fx] : em.first_last)
                for (const auto& [y, fy] : em.first_last)
                    if (x != y && fx.first < fy.first) bump(x, y);
        }
    }
    return out;
}

Validation validate(const EdgeScoreSet& scores, const CascadeCounts& counts) {
    Validation v;
    std::vector<double> xs, ys;
    for (const auto& r : scores.scores) {
        auto it = counts.counts.find({r.source, r.target});
        const std::uint64_t c = it == counts.counts.end() ? 0 : it->second;
        v.rows.push_back({{r.source, r.target}, c, r.te_corrected});
        xs.push_back(static_cast<double>(c));
        ys.push_back(r.te_corrected);
    }
    v.r = pearson(xs, ys);
    return v;
}

std::vector<double> shuffled_correlations(const std::vector<double>& x, std::vector<double> y, int shuffles,
                                          std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(shuffles, 0)));
    for (int s = 0; s < shuffles; ++s) {
        for (std::size_t i = y.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
            std::swap(y[i - 1], y[j]);
        }
        out.push_back(pearson(x, y));
    }
    return out;
}

}  // namespace tenet
