#include "tenet/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>

#include "tenet/random.hpp"

namespace tenet {

double kernel_eval(double dt_hours) {
    if (!(dt_hours > 0.0)) return 0.0;
    if (dt_hours <= 1.0) return 1.0;
    const double r = 1.0 / dt_hours;
    return r * r * r;
}

// ---------------------------------------------------------------------------
// Network

std::string NetworkSpec::node_name(int index) const {
    int width = 1;
    for (int m = n - 1; m >= 10; m /= 10) ++width;
    std::string digits = std::to_string(index);
    if (static_cast<int>(digits.size()) < width) digits.insert(0, width - digits.size(), '0');
    return "n" + digits;
}

int NetworkSpec::node_index(const std::string& name) const {
    for (int i = 0; i < n; ++i)
        if (node_name(i) == name) return i;
    return -1;
}

void NetworkSpec::validate() const {
    if (n < 0) throw ConfigError("node count must be non-negative");
    std::set<Edge> seen;
    for (const Edge& e : edges) {
        if (e.source < 0 || e.source >= n || e.target < 0 || e.target >= n)
            throw ConfigError("edge references unknown node");
        if (e.source == e.target) throw ConfigError("self-loops are not allowed");
        if (!seen.insert(e).second) throw ConfigError("duplicate edge");
    }
}

NetworkSpec random_network(int n, double mean_degree, std::uint64_t seed) {
    if (n < 0) throw ConfigError("node count must be non-negative");
    if (mean_degree < 0.0 || (n > 1 && mean_degree > n - 1) || (n <= 1 && mean_degree > 0.0))
        throw ConfigError("mean degree must lie in [0, N-1]");
    NetworkSpec net;
    net.n = n;
    net.mean_degree = mean_degree;
    if (n <= 1) return net;
    const double p = mean_degree / static_cast<double>(n - 1);
    Rng rng(seed);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && uniform01(rng) < p) net.edges.push_back({i, j});
    return net;
}

// ---------------------------------------------------------------------------
// Hazard

HazardModel HazardModel::uniform(const NetworkSpec& network, double mu_per_day, double gamma_over_mu) {
    HazardModel m;
    m.mu_per_day = mu_per_day;
    for (const Edge& e : network.edges) m.gamma_per_day[e] = gamma_over_mu * mu_per_day;
    return m;
}

void HazardModel::validate() const {
    if (!(mu_per_day >= 0.0) || !std::isfinite(mu_per_day)) throw ConfigError("mu must be non-negative");
    if (!(prune_days > 0.0)) throw ConfigError("prune window must be positive");
    for (const auto& [edge, g] : gamma_per_day)
        if (!(g >= 0.0) || !std::isfinite(g)) throw ConfigError("gamma must be non-negative");
}

double hazard(int node, Seconds t, const std::vector<EventStream>& streams,
              const NetworkSpec& network, const HazardModel& model) {
    double rate = model.mu_per_day;
    for (const Edge& e : network.edges) {
        if (e.target != node) continue;
        auto it = model.gamma_per_day.find(e);
        if (it == model.gamma_per_day.end() || it->second == 0.0) continue;
        double sum = 0.0;
        for (Seconds ti : streams.at(static_cast<std::size_t>(e.source)).events) {
            if (ti >= t) break;
            sum += kernel_eval((t - ti) / kHour);
        }
        rate += it->second * sum;
    }
    return rate;
}

namespace {

struct PastEvent {
    Seconds t;
    std::uint64_t item;
};

struct Influence {
    int source;
    double gamma_per_sec;
};

// Kernel value just after t: an event at exactly t already counts fully.
double kernel_right(double dt_hours) {
    return dt_hours <= 0.0 ? 1.0 : kernel_eval(dt_hours);
}

}  // namespace

std::vector<EventStream> simulate(const NetworkSpec& network, const HazardModel& model,
                                  const SimulationConfig& cfg) {
    network.validate();
    model.validate();
    if (!(cfg.horizon_days > 0.0) || !std::isfinite(cfg.horizon_days))
        throw ConfigError("horizon must be positive");

    const int n = network.n;
    const double mu = model.mu_per_day / kDay;
    const Seconds horizon = cfg.horizon_days * kDay;
    const Seconds prune = model.prune_days * kDay;

    std::vector<std::vector<Influence>> inbound(static_cast<std::size_t>(n));
    for (const auto& [edge, g] : model.gamma_per_day) {
        if (g == 0.0) continue;
        if (edge.source < 0 || edge.source >= n || edge.target < 0 || edge.target >= n)
            throw ConfigError("gamma given for an edge outside the network");
        inbound[static_cast<std::size_t>(edge.target)].push_back({edge.source, g / kDay});
    }

    std::vector<EventStream> streams(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) streams[static_cast<std::size_t>(i)].node_id = network.node_name(i);
    std::vector<std::deque<PastEvent>> recent(static_cast<std::size_t>(n));
    std::vector<double> rates(static_cast<std::size_t>(n));
    std::uint64_t next_item = 0;

    Rng rng(cfg.seed);
    // Rate of node y at time t; `right` includes events at exactly t.
    auto rate_of = [&](int y, Seconds t, bool right) {
        double r = mu;
        for (const Influence& inf : inbound[static_cast<std::size_t>(y)]) {
            double sum = 0.0;
            for (const PastEvent& ev : recent[static_cast<std::size_t>(inf.source)]) {
                const double dt = (t - ev.t) / kHour;
                sum += right ? kernel_right(dt) : kernel_eval(dt);
            }
            r += inf.gamma_per_sec * sum;
        }
        return r;
    };

    Seconds t = 0.0;
    while (true) {
        for (auto& q : recent)
            while (!q.empty() && q.front().t < t - prune) q.pop_front();

        // Hazards only decay until the next accepted event, so their current
        // (right-limit) values bound the process up to then.
        double bound = 0.0;
        for (int y = 0; y < n; ++y) bound += rate_of(y, t, true);
        if (!(bound > 0.0)) break;

        const Seconds candidate = t + exponential(rng, bound);
        if (candidate > horizon) break;

        double total = 0.0;
        for (int y = 0; y < n; ++y) {
            rates[static_cast<std::size_t>(y)] = rate_of(y, candidate, false);
            total += rates[static_cast<std::size_t>(y)];
        }
        if (total > bound * (1.0 + 1e-9))
            throw std::logic_error("thinning bound violated: hazard exceeds the bound in force");

        const double u = uniform01(rng) * bound;
        t = candidate;
        if (u >= total) continue;

        int node = 0;
        for (double acc = rates[0]; acc <= u && node + 1 < n;) acc += rates[static_cast<std::size_t>(++node)];

        std::uint64_t item = 0;
        if (cfg.cascade_labels) {
            // Attribute the event to background or to one past source event,
            // proportionally to each term's share of the hazard.
            double pick = uniform01(rng) * rates[static_cast<std::size_t>(node)];
            bool inherited = false;
            if (pick >= mu) {
                pick -= mu;
                for (const Influence& inf : inbound[static_cast<std::size_t>(node)]) {
                    for (const PastEvent& ev : recent[static_cast<std::size_t>(inf.source)]) {
                        const double term = inf.gamma_per_sec * kernel_eval((t - ev.t) / kHour);
                        if (pick < term) {
                            item = ev.item;
                            inherited = true;
                            break;
                        }
                        pick -= term;
                    }
                    if (inherited) break;
                }
            }
            if (!inherited) item = next_item++;
        }

        auto& stream = streams[static_cast<std::size_t>(node)];
        stream.events.push_back(t);
        if (cfg.cascade_labels) stream.item_ids.push_back("c" + std::to_string(item));
        recent[static_cast<std::size_t>(node)].push_back({t, item});
    }
    return streams;
}

}  // namespace tenet
