#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tenet/events.hpp"

namespace tenet {

// Influence of a past source event, dt hours later: min(1, (1 h / dt)^3),
// zero for dt <= 0. Integrates to 1.5 hours.
double kernel_eval(double dt_hours);

struct Edge {
    int source = 0;
    int target = 0;
    bool operator==(const Edge&) const = default;
    auto operator<=>(const Edge&) const = default;
};

struct NetworkSpec {
    int n = 0;
    std::vector<Edge> edges;
    double mean_degree = 0.0;

    std::string node_name(int index) const;
    int node_index(const std::string& name) const;   // -1 when unknown
    void validate() const;
};

NetworkSpec random_network(int n, double mean_degree, std::uint64_t seed);

struct HazardModel {
    double mu_per_day = 1.0;
    std::map<Edge, double> gamma_per_day;             // influence weight per edge
    double prune_days = 7.0;                          // older source events are ignored

    // Every network edge gets gamma = gamma_over_mu * mu.
    static HazardModel uniform(const NetworkSpec& network, double mu_per_day, double gamma_over_mu);
    void validate() const;
};

struct SimulationConfig {
    double horizon_days = 1.0;
    std::uint64_t seed = 1;
    bool cascade_labels = false;
};

// Intensity of `node` at time t (events/day), summing exactly over all events
// strictly before t in the streams of its in-neighbours.
double hazard(int node, Seconds t, const std::vector<EventStream>& streams,
              const NetworkSpec& network, const HazardModel& model);

// Streams are indexed like the network's nodes and named by node_name().
std::vector<EventStream> simulate(const NetworkSpec& network, const HazardModel& model,
                                  const SimulationConfig& cfg);

}  // namespace tenet
