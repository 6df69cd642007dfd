#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tenet/entropy.hpp"
#include "tenet/events.hpp"

namespace tenet {

struct NodePair {
    std::string source;
    std::string target;
    auto operator<=>(const NodePair&) const = default;
};

enum class CandidatePolicy { all_pairs, edge_list };

struct SkippedPair {
    NodePair pair;
    std::string reason;
};

struct EdgeScoreSet {
    std::vector<TEResult> scores;        // sorted by (source, target)
    BinningScheme scheme;
    BiasMethod method = BiasMethod::none;
    CandidatePolicy policy = CandidatePolicy::all_pairs;
    std::vector<SkippedPair> skipped;
};

// Ordered pairs of streams with at least `min_events` events each.
std::vector<NodePair> all_pairs(const std::vector<EventStream>& streams, std::size_t min_events = 10);

struct ScoreOptions {
    Seconds window_end = 0.0;
    BiasMethod method = BiasMethod::panzeri_treves;
    CandidatePolicy policy = CandidatePolicy::all_pairs;
    unsigned jobs = 1;                   // 0 = hardware concurrency
};

EdgeScoreSet score_edges(const std::vector<EventStream>& streams, const std::vector<NodePair>& candidates,
                         const BinningScheme& scheme, const ScoreOptions& options);

struct FixedThreshold {
    double value;
};
struct FMeasureOptimal {};
using ThresholdPolicy = std::variant<FixedThreshold, FMeasureOptimal>;

struct WeightedEdge {
    std::string source;
    std::string target;
    double weight = 0.0;
    double te_raw = 0.0;
    std::uint64_t n = 0;
};

struct WeightedDigraph {
    std::vector<std::string> nodes;
    std::vector<WeightedEdge> edges;
    double threshold = 0.0;
};

// Cut points for "score > T0": one just below each distinct score, plus +inf.
std::vector<double> candidate_thresholds(const std::vector<double>& scores);

WeightedDigraph apply_threshold(const EdgeScoreSet& scores, const ThresholdPolicy& policy,
                                const std::optional<std::vector<NodePair>>& truth = std::nullopt);

struct NodeInfluence {
    std::string node;
    double outgoing = 0.0;
};

// Descending by summed outgoing te_corrected; ties by node id.
std::vector<NodeInfluence> outgoing_influence(const EdgeScoreSet& scores);

}  // namespace tenet
