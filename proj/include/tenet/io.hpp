#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tenet/evaluate.hpp"
#include "tenet/infer.hpp"
#include "tenet/simulate.hpp"

namespace tenet::io {

// Shortest round-trip representation; "inf"/"-inf" for infinities.
std::string format_double(double v);

void write_events_csv(std::ostream& out, const std::vector<EventStream>& streams);
void write_truth_csv(std::ostream& out, const NetworkSpec& network, const HazardModel& model);
void write_scores_csv(std::ostream& out, const EdgeScoreSet& scores);
void write_edges_csv(std::ostream& out, const WeightedDigraph& graph);
void write_roc_csv(std::ostream& out, const RocCurve& curve);
void write_validation_csv(std::ostream& out, const Validation& validation);

struct WeightedPair {
    NodePair pair;
    double weight = 0.0;
};

// Any CSV whose first two columns are source,target (header optional);
// a third numeric column, when present, is returned as the weight.
std::vector<WeightedPair> read_pair_csv(const std::filesystem::path& path);
std::vector<NodePair> read_pairs(const std::filesystem::path& path);

EdgeScoreSet read_scores_csv(const std::filesystem::path& path);

// Writes via a temporary file, then renames into place.
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace tenet::io
