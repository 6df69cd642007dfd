#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "tenet/infer.hpp"

namespace tenet {

struct RocPoint {
    double threshold = 0.0;   // scores >= threshold are called positive
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;
};

// Scores paired with ground-truth labels.
struct LabeledScores {
    std::vector<double> positives;
    std::vector<double> negatives;
};

LabeledScores label_scores(const EdgeScoreSet& scores, const std::vector<NodePair>& truth);

RocCurve roc(const LabeledScores& labeled);
RocCurve roc(const EdgeScoreSet& scores, const std::vector<NodePair>& truth);
double auc(const RocCurve& curve);

// P(positive > negative) + P(tie) / 2, counted over all pairs.
double mann_whitney_auc(const LabeledScores& labeled);

struct Classification {
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

Classification classify(const WeightedDigraph& graph, const std::vector<NodePair>& truth);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

enum class OriginRule { global, pairwise };

struct CascadeCounts {
    std::map<NodePair, std::uint64_t> counts;
    std::size_t streams_without_items = 0;
};

CascadeCounts count_cascades(const std::vector<EventStream>& streams, const std::vector<NodePair>& candidates,
                             OriginRule rule = OriginRule::global);

struct ValidationRow {
    NodePair pair;
    std::uint64_t cascade_count = 0;
    double te_corrected = 0.0;
};

struct Validation {
    std::vector<ValidationRow> rows;
    double r = 0.0;
};

Validation validate(const EdgeScoreSet& scores, const CascadeCounts& counts);

// Correlations after randomly re-aligning y against x; the negative control
// for validate().
std::vector<double> shuffled_correlations(const std::vector<double>& x, std::vector<double> y,
                                          int shuffles, std::uint64_t seed);

}  // namespace tenet
