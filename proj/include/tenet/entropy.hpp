#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "tenet/events.hpp"

namespace tenet {

// Variables of a transfer-entropy sample, combinable as a bit set.
enum Var : unsigned {
    kYNow = 1u,
    kYHist = 2u,
    kXHist = 4u,
};
using VarSet = unsigned;

enum class BiasMethod { none, miller_madow, panzeri_treves };

std::string_view to_string(BiasMethod method);
BiasMethod parse_bias_method(std::string_view name);

// Outcome key layout: bit 0 = y_now, bits 1..k = y_hist, bits k+1..k+l = x_hist.
struct JointHistogram {
    int k = 1;
    int l = 1;
    std::uint64_t n = 0;
    std::map<std::uint64_t, std::uint64_t> counts;

    std::uint64_t key(const Sample& s) const;
    std::uint64_t mask(VarSet vars) const;
    // Counts projected onto the given variables (other bits zeroed).
    std::map<std::uint64_t, std::uint64_t> marginal(VarSet vars) const;
};

// Entropies in bits. The plug-in value underestimates the true entropy;
// bias_bits is the estimated shortfall, so corrected = raw + bias.
struct EntropyEstimate {
    double raw_bits = 0.0;
    double bias_bits = 0.0;
    double corrected_bits = 0.0;
    BiasMethod method = BiasMethod::none;
    std::uint64_t n = 0;
};

struct TEResult {
    std::string source;
    std::string target;
    EntropyEstimate h_self;    // H(y_now | y_hist)
    EntropyEstimate h_joint;   // H(y_now | y_hist, x_hist)
    double te_raw = 0.0;
    double te_corrected = 0.0;
    std::uint64_t n = 0;
};

JointHistogram histogram(const SampleSet& samples);

// Plug-in entropy of a count table, in bits.
double plugin_entropy(const std::map<std::uint64_t, std::uint64_t>& counts, std::uint64_t n);

double binary_occupancy(std::uint64_t ones, std::uint64_t total, double prior_rate, double prior_strength);

double bias(const JointHistogram& hist, VarSet target, VarSet given, BiasMethod method);

EntropyEstimate conditional_entropy(const JointHistogram& hist, VarSet target, VarSet given,
                                    BiasMethod method = BiasMethod::none);

// Bayesian estimate of the number of outcomes with nonzero probability among
// `dim` possible ones, given observed counts of the occupied outcomes.
double bayesian_occupancy(const std::vector<std::uint64_t>& occupied_counts, std::uint64_t dim);

TEResult transfer_entropy(const JointHistogram& hist, BiasMethod method);
TEResult transfer_entropy(const EventStream& target, const EventStream& source,
                          const BinningScheme& scheme, Seconds window_end, BiasMethod method);

}  // namespace tenet
