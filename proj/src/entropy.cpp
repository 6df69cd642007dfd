#include "tenet/entropy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

namespace tenet {

std::string_view to_string(BiasMethod method) {
    switch (method) {
        case BiasMethod::none: return "none";
        case BiasMethod::miller_madow: return "miller_madow";
        case BiasMethod::panzeri_treves: return "panzeri_treves";
    }
    return "none";
}

BiasMethod parse_bias_method(std::string_view name) {
    if (name == "none") return BiasMethod::none;
    if (name == "miller_madow" || name == "mm") return BiasMethod::miller_madow;
    if (name == "panzeri_treves" || name == "pt") return BiasMethod::panzeri_treves;
    throw ConfigError("unknown bias method '" + std::string(name) +
                      "' (expected none, miller_madow or panzeri_treves)");
}

std::uint64_t JointHistogram::key(const Sample& s) const {
    return static_cast<std::uint64_t>(s.y_now & 1u) | (static_cast<std::uint64_t>(s.y_hist) << 1) |
           (static_cast<std::uint64_t>(s.x_hist) << (1 + k));
}

std::uint64_t JointHistogram::mask(VarSet vars) const {
    std::uint64_t m = 0;
    if (vars & kYNow) m |= 1u;
    if (vars & kYHist) m |= ((std::uint64_t{1} << k) - 1) << 1;
    if (vars & kXHist) m |= ((std::uint64_t{1} << l) - 1) << (1 + k);
    return m;
}

std::map<std::uint64_t, std::uint64_t> JointHistogram::marginal(VarSet vars) const {
    const std::uint64_t m = mask(vars);
    std::map<std::uint64_t, std::uint64_t> out;
    for (const auto& [key, c] : counts) out[key & m] += c;
    return out;
}

JointHistogram histogram(const SampleSet& samples) {
    if (samples.n == 0) throw Error("no samples");
    JointHistogram h;
    h.k = samples.k;
    h.l = samples.l;
    for (const auto& run : samples.runs) {
        h.counts[h.key(run.sample)] += run.count;
        h.n += run.count;
    }
    return h;
}

double plugin_entropy(const std::map<std::uint64_t, std::uint64_t>& counts, std::uint64_t n) {
    if (n == 0) return 0.0;
    const double total = static_cast<double>(n);
    double h = 0.0;
    for (const auto& [key, c] : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        h -= p * std::log2(p);
    }
    return h;
}

double bayesian_occupancy(const std::vector<std::uint64_t>& occupied_counts, std::uint64_t dim) {
    std::uint64_t total = 0;
    for (auto c : occupied_counts) total += c;
    const double naive = static_cast<double>(occupied_counts.size());
    if (total == 0 || occupied_counts.size() >= dim) return naive;

    const double nt = static_cast<double>(total);
    const double d = static_cast<double>(dim);
    // P(an outcome of probability p is never seen in nt draws)
    auto unseen = [nt](double p) { return p >= 1.0 ? 0.0 : std::exp(nt * std::log1p(-p)); };

    double expected = naive;
    for (auto c : occupied_counts) expected -= unseen(static_cast<double>(c) / nt);
    double delta_prev = d;
    double delta = std::abs(naive - expected);
    double extra = 0.0;
    // Grow the assumed number of unobserved-but-possible outcomes while the
    // expected observed occupancy moves closer to the actual one.
    while (delta < delta_prev && naive + extra < d) {
        extra += 1.0;
        const double gamma = extra * (1.0 - std::pow(nt / (nt + naive), 1.0 / nt));
        expected = 0.0;
        for (auto c : occupied_counts) {
            const double p = (1.0 - gamma) / (nt + naive) * (static_cast<double>(c) + 1.0);
            expected += 1.0 - unseen(p);
        }
        expected += extra * (1.0 - unseen(gamma / extra));
        delta_prev = delta;
        delta = std::abs(naive - expected);
    }
    double occupancy = naive + extra - 1.0;
    if (delta < delta_prev) occupancy += 1.0;
    return occupancy;
}

namespace {

// Expected plug-in shortfall (nats, scaled by sample count) of a binary
// entropy estimated from n draws with outcome probability p; tends to 1/2
// (the Miller-Madow value for two outcomes) as both outcomes become common.
double binary_shortfall(double p, std::uint64_t n) {
    if (n == 0 || p <= 0.0 || p >= 1.0) return 0.0;
    const double nd = static_cast<double>(n);
    auto h = [](double x) { return x <= 0.0 || x >= 1.0 ? 0.0 : -x * std::log(x) - (1 - x) * std::log1p(-x); };
    if (n <= 2000) {
        double expected = 0.0;
        const double lp = std::log(p), lq = std::log1p(-p);
        for (std::uint64_t c = 0; c <= n; ++c) {
            const double cd = static_cast<double>(c);
            const double logpmf = std::lgamma(nd + 1) - std::lgamma(cd + 1) - std::lgamma(nd - cd + 1) + cd * lp +
                                  (nd - cd) * lq;
            expected += std::exp(logpmf) * h(cd / nd);
        }
        return nd * (h(p) - expected);
    }
    // Poisson limit for the rarer outcome; the common one adds ~q/2.
    const double q = std::min(p, 1.0 - p);
    const double lambda = nd * q;
    if (lambda > 1e4) return 0.5;
    const double spread = 12.0 * std::sqrt(lambda) + 20.0;
    const auto lo = static_cast<std::uint64_t>(std::max(0.0, std::floor(lambda - spread)));
    const auto hi = static_cast<std::uint64_t>(std::ceil(lambda + spread));
    double e_clogc = 0.0;
    for (std::uint64_t c = std::max<std::uint64_t>(lo, 2); c <= hi; ++c) {
        const double cd = static_cast<double>(c);
        e_clogc += std::exp(cd * std::log(lambda) - lambda - std::lgamma(cd + 1)) * cd * std::log(cd);
    }
    return e_clogc - lambda * std::log(lambda) + q / 2.0;
}

}  // namespace

double binary_occupancy(std::uint64_t ones, std::uint64_t total, double prior_rate, double prior_strength) {
    if (total == 0) return 1.0;
    const double p = (static_cast<double>(ones) + prior_strength * prior_rate) /
                     (static_cast<double>(total) + prior_strength);
    return std::clamp(1.0 + 2.0 * binary_shortfall(p, total), 1.0, 2.0);
}

double bias(const JointHistogram& hist, VarSet target, VarSet given, BiasMethod method) {
    if (method == BiasMethod::none || hist.n == 0) return 0.0;
    const auto joint = hist.marginal(target | given);
    const std::uint64_t given_mask = hist.mask(given);
    const std::uint64_t target_mask = hist.mask(target);
    const std::uint64_t dim = std::uint64_t{1} << std::popcount(target_mask);

    struct Stratum {
        std::vector<std::uint64_t> occupied;
        std::map<std::uint64_t, std::uint64_t> by_outcome;
        std::uint64_t total = 0;
    };
    std::map<std::uint64_t, Stratum> strata;
    std::map<std::uint64_t, std::uint64_t> pooled;
    for (const auto& [key, c] : joint) {
        if (c == 0) continue;
        auto& s = strata[key & given_mask];
        s.occupied.push_back(c);
        s.by_outcome[key & target_mask] += c;
        s.total += c;
        pooled[key & target_mask] += c;
    }

    // Binary targets: rate of the higher outcome across all strata.
    const std::uint64_t high = target_mask;
    const double prior_rate = static_cast<double>(pooled.count(high) ? pooled[high] : 0) /
                              static_cast<double>(hist.n);

    double excess = 0.0;
    for (const auto& [stratum, s] : strata) {
        double r = static_cast<double>(s.occupied.size());
        if (method == BiasMethod::panzeri_treves) {
            if (dim == 2) {
                const std::uint64_t ones = s.by_outcome.count(high) ? s.by_outcome.at(high) : 0;
                // Prior worth one pseudo-observation of the rarer outcome.
                if (prior_rate > 0.0 && prior_rate < 1.0)
                    r = binary_occupancy(ones, s.total, prior_rate, 1.0 / std::min(prior_rate, 1.0 - prior_rate));
            } else {
                r = bayesian_occupancy(s.occupied, dim);
            }
        }
        excess += r - 1.0;
    }
    return excess / (2.0 * static_cast<double>(hist.n) * std::log(2.0));
}

EntropyEstimate conditional_entropy(const JointHistogram& hist, VarSet target, VarSet given,
                                    BiasMethod method) {
    if ((target & given) != 0) throw ConfigError("target and conditioning variables must be disjoint");
    EntropyEstimate e;
    e.method = method;
    e.n = hist.n;
    const double joint = plugin_entropy(hist.marginal(target | given), hist.n);
    const double cond = given == 0 ? 0.0 : plugin_entropy(hist.marginal(given), hist.n);
    e.raw_bits = std::max(0.0, joint - cond);
    e.bias_bits = bias(hist, target, given, method);
    e.corrected_bits = e.raw_bits + e.bias_bits;
    return e;
}

TEResult transfer_entropy(const JointHistogram& hist, BiasMethod method) {
    TEResult r;
    r.n = hist.n;
    r.h_self = conditional_entropy(hist, kYNow, kYHist, method);
    r.h_joint = conditional_entropy(hist, kYNow, kYHist | kXHist, method);
    r.te_raw = std::max(0.0, r.h_self.raw_bits - r.h_joint.raw_bits);
    r.te_corrected = r.te_raw - (r.h_joint.bias_bits - r.h_self.bias_bits);
    return r;
}

TEResult transfer_entropy(const EventStream& target, const EventStream& source,
                          const BinningScheme& scheme, Seconds window_end, BiasMethod method) {
    TEResult r = transfer_entropy(histogram(history_samples(target, source, scheme, window_end)), method);
    r.source = source.node_id;
    r.target = target.node_id;
    return r;
}

}  // namespace tenet
