// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracle.hpp"
#include "tenet/entropy.hpp"
#include "tenet/evaluate.hpp"
#include "tenet/infer.hpp"
#include "tenet/random.hpp"
#include "tenet/simulate.hpp"

using namespace tenet;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double limit_seconds, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = limit_seconds <= 0.0 || secs < limit_seconds;
    if (!in_time) o.detail += "; over time limit";
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("criterion %d %-26s %s  %s  [%.2fs]\n", id, name, pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double std_error(const std::vector<double>& v) {
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

const NetworkSpec kPair{2, {{0, 1}}, 0.0};

// Source n0 influences target n1.
std::vector<EventStream> simulate_pair(double gamma_over_mu, double days, std::uint64_t seed) {
    return simulate(kPair, HazardModel::uniform(kPair, 1.0, gamma_over_mu), {days, seed, false});
}

TEResult forward_te(const std::vector<EventStream>& s, const BinningScheme& scheme, double days) {
    return transfer_entropy(s[1], s[0], scheme, days * kDay, BiasMethod::panzeri_treves);
}

// --------------------------------------------------------------------------

Outcome oracle_equivalence() {
    Rng rng(20240101);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int k = 1 + static_cast<int>(rng() % 2), l = 1 + static_cast<int>(rng() % 2);
        const int n = 1 + static_cast<int>(rng() % 50);
        SampleSet set;
        set.k = k;
        set.l = l;
        std::vector<oracle::Sample> brute;
        // Skewed occupancy so that rare cells and empty strata both occur.
        const double p = uniform01(rng);
        for (int i = 0; i < n; ++i) {
            Sample s;
            oracle::Sample o;
            s.y_now = uniform01(rng) < p;
            o.y_now = s.y_now;
            for (int b = 0; b < k; ++b) {
                const int bit = uniform01(rng) < p;
                s.y_hist |= static_cast<std::uint32_t>(bit) << b;
                o.y_hist.push_back(bit);
            }
            for (int b = 0; b < l; ++b) {
                const int bit = uniform01(rng) < 0.5;
                s.x_hist |= static_cast<std::uint32_t>(bit) << b;
                o.x_hist.push_back(bit);
            }
            set.runs.push_back({s, 1});
            brute.push_back(o);
        }
        set.n = static_cast<std::uint64_t>(n);
        const auto hist = histogram(set);
        const auto r = transfer_entropy(hist, BiasMethod::none);
        const auto t = oracle::table(brute, k, l);
        worst = std::max({worst, std::abs(r.h_self.raw_bits - oracle::h_self(t)),
                          std::abs(r.h_joint.raw_bits - oracle::h_joint(t)), std::abs(r.te_raw - oracle::te(t))});
    }
    return {worst <= 1e-12, fmt("max |diff| %.3g bits over 1000 sets", worst)};
}

Outcome copy_te() {
    Rng rng(99);
    BinnedSeries x{"x", {}, 0.0, 1.0}, y{"y", {}, 0.0, 1.0};
    std::uint8_t prev = 0;
    for (int i = 0; i < 100000; ++i) {
        const std::uint8_t bit = uniform01(rng) < 0.5;
        x.bits.push_back(bit);
        y.bits.push_back(prev);
        prev = bit;
    }
    const auto r = transfer_entropy(histogram(lagged_samples(y, x, 1, 1)), BiasMethod::none);
    return {r.te_raw >= 0.98 && r.te_raw <= 1.0, fmt("te_raw %.6f bits", r.te_raw)};
}

Outcome asymmetry(double stride, int need) {
    auto scheme = scheme_preset("synthetic");
    scheme.stride = stride;
    int wins = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const auto s = simulate_pair(2.0, 500.0, derive_seed(3, trial));
        const double xy = transfer_entropy(s[1], s[0], scheme, 500 * kDay, BiasMethod::panzeri_treves).te_corrected;
        const double yx = transfer_entropy(s[0], s[1], scheme, 500 * kDay, BiasMethod::panzeri_treves).te_corrected;
        wins += xy > yx;
    }
    return {wins >= need, std::to_string(wins) + "/50 trials X->Y > Y->X (need " + std::to_string(need) + ")"};
}

Outcome bias_correction() {
    const auto scheme = scheme_preset("synthetic");
    std::vector<double> raw, corrected;
    for (int trial = 0; trial < 200; ++trial) {
        const auto r = forward_te(simulate_pair(0.0, 500.0, derive_seed(4, trial)), scheme, 500.0);
        raw.push_back(r.te_raw);
        corrected.push_back(r.te_corrected);
    }
    const double mr = mean(raw), se = std_error(raw), mc = mean(corrected);
    const bool pass = mr > 3 * se && std::abs(mc) < mr / 5;
    return {pass, fmt("mean raw %.3e (%.1f SE)", mr, mr / se) + fmt(", mean corrected %.3e (ratio %.3f)", mc, mc / mr)};
}

// Per seed, one 450-day simulation scored at three window ends.
Outcome network_recovery() {
    const std::vector<double> horizons{50.0, 150.0, 450.0};
    const auto scheme = scheme_preset("synthetic");
    std::vector<std::vector<double>> aucs(horizons.size());
    int good = 0;
    for (int seed = 0; seed < 10; ++seed) {
        const auto net = random_network(20, 3.0, derive_seed(5, seed));
        const auto streams = simulate(net, HazardModel::uniform(net, 1.0, 2.0), {450.0, derive_seed(6, seed), false});
        std::vector<NodePair> truth;
        for (const auto& e : net.edges) truth.push_back({net.node_name(e.source), net.node_name(e.target)});
        const auto cands = all_pairs(streams, 0);
        for (std::size_t h = 0; h < horizons.size(); ++h) {
            ScoreOptions opt;
            opt.window_end = horizons[h] * kDay;
            opt.jobs = 0;
            aucs[h].push_back(auc(roc(score_edges(streams, cands, scheme, opt), truth)));
        }
        good += aucs.back().back() >= 0.95;
    }
    std::vector<double> curve;
    for (const auto& a : aucs) curve.push_back(mean(a));
    const bool monotone = std::is_sorted(curve.begin(), curve.end());
    std::string detail = std::to_string(good) + "/10 seeds AUC >= 0.95 at 450 d; mean AUC";
    for (std::size_t h = 0; h < horizons.size(); ++h)
        detail += fmt(" %.0fd=%.4f", horizons[h], curve[h]);
    return {good >= 9 && monotone, detail};
}

Outcome sampling_degradation() {
    const std::vector<double> fractions{1.0, 0.5, 0.2, 0.1};
    const auto scheme = scheme_preset("synthetic");
    std::vector<double> means(fractions.size(), 0.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto s = simulate_pair(2.0, 500.0, derive_seed(7, trial));
        for (std::size_t i = 0; i < fractions.size(); ++i) {
            std::vector<EventStream> kept{subsample(s[0], fractions[i], derive_seed(8, 2 * trial)),
                                          subsample(s[1], fractions[i], derive_seed(8, 2 * trial + 1))};
            means[i] += forward_te(kept, scheme, 500.0).te_corrected / 50.0;
        }
    }
    const bool monotone = std::is_sorted(means.rbegin(), means.rend());
    const bool drop = means[2] < 0.25 * means[0];
    std::string detail = "mean te_corrected";
    for (std::size_t i = 0; i < fractions.size(); ++i) detail += fmt(" f=%.1f:%.3e", fractions[i], means[i]);
    detail += fmt("; f=0.2/f=1 = %.3f", means[2] / means[0]);
    return {monotone && drop, detail};
}

Outcome influence_monotonicity() {
    const std::vector<double> ratios{0.0, 1.0, 2.0, 4.0};
    const auto scheme = scheme_preset("synthetic");
    std::vector<double> means;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        double m = 0.0;
        for (int trial = 0; trial < 100; ++trial)
            m += forward_te(simulate_pair(ratios[i], 500.0, derive_seed(9 + i, trial)), scheme, 500.0).te_corrected /
                 100.0;
        means.push_back(m);
    }
    bool strict = true;
    for (std::size_t i = 1; i < means.size(); ++i) strict = strict && means[i] > means[i - 1];
    std::string detail = "mean te_corrected";
    for (std::size_t i = 0; i < ratios.size(); ++i) detail += fmt(" g/mu=%.0f:%.3e", ratios[i], means[i]);
    return {strict, detail};
}

Outcome cascade_validation() {
    const auto net = random_network(20, 3.0, derive_seed(13, 0));
    const auto streams = simulate(net, HazardModel::uniform(net, 1.0, 2.0), {450.0, derive_seed(14, 0), true});
    const auto cands = all_pairs(streams, 0);
    ScoreOptions opt;
    opt.window_end = 450 * kDay;
    const auto scores = score_edges(streams, cands, scheme_preset("synthetic"), opt);
    const auto v = validate(scores, count_cascades(streams, cands));
    std::vector<double> x, y;
    for (const auto& row : v.rows) {
        x.push_back(static_cast<double>(row.cascade_count));
        y.push_back(row.te_corrected);
    }
    auto null = shuffled_correlations(x, y, 100, derive_seed(15, 0));
    std::sort(null.begin(), null.end());
    const double p95 = null[94];
    return {v.r > 0.0 && v.r > p95, fmt("r = %.4f, shuffled 95th percentile %.4f", v.r, p95) +
                                        " over " + std::to_string(v.rows.size()) + " pairs"};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome determinism_and_presets() {
    const auto dir = fs::temp_directory_path() / "tenet_acceptance";
    fs::remove_all(dir);
    std::ostringstream out, err;
    auto cli = [&](std::vector<std::string> args) { return cli::run(args, out, err); };
    const auto d = [&](const std::string& name) { return (dir / name).string(); };

    bool ok = cli({"simulate", "--n", "8", "--mean-degree", "2", "--days", "60", "--seed", "21", "--cascade-labels",
                   "--out", d("a")}) == 0;
    ok = ok && cli({"--config", d("a/manifest.toml"), "simulate", "--out", d("b")}) == 0;
    ok = ok && cli({"te", "--events", d("a/events.csv"), "--out", d("te_a")}) == 0;
    ok = ok && cli({"--config", d("te_a/manifest.toml"), "te", "--jobs", "1", "--out", d("te_b")}) == 0;
    if (!ok) return {false, "cli run failed: " + err.str()};

    bool identical = true;
    for (auto f : {"events.csv", "truth.csv", "summary.json"})
        identical = identical && slurp(dir / "a" / f) == slurp(dir / "b" / f);
    for (auto f : {"scores.csv", "summary.json"})
        identical = identical && slurp(dir / "te_a" / f) == slurp(dir / "te_b" / f);

    const auto digg = scheme_preset("digg");
    const bool digg_ok = digg.kind == BinningKind::uniform && digg.k == 7 && digg.l == 7 &&
                         digg.now_width == 4 * kHour && digg.stride == 4 * kHour;
    const auto tw = scheme_preset("twitter");
    const bool tw_ok = tw.kind == BinningKind::variable && tw.now_width == 1.0 &&
                       tw.history_widths == std::vector<double>{10 * kMinute, 2 * kHour, 24 * kHour};
    std::string detail = std::string("outputs ") + (identical ? "byte-identical" : "DIFFER") + ", digg preset " +
                         (digg_ok ? "ok" : "wrong") + ", twitter preset " + (tw_ok ? "ok" : "wrong");
    return {identical && digg_ok && tw_ok, detail};
}

}  // namespace

int main() {
    criterion(1, "oracle equivalence", 5.0, oracle_equivalence);
    criterion(2, "deterministic copy", 1.0, copy_te);
    criterion(3, "asymmetry (stride 60 s)", 600.0, [] { return asymmetry(60.0, 47); });
    criterion(4, "bias correction", 1200.0, bias_correction);
    criterion(5, "network recovery", 3600.0, network_recovery);
    criterion(6, "sampling degradation", 0.0, sampling_degradation);
    criterion(7, "influence monotonicity", 0.0, influence_monotonicity);
    criterion(8, "cascade validation", 0.0, cascade_validation);
    criterion(9, "determinism and presets", 0.0, determinism_and_presets);

    // Not a criterion: the same asymmetry trials sampled at every second.
    Outcome dense = asymmetry(1.0, 47);
    std::printf("info: asymmetry at stride 1 s: %s\n", dense.detail.c_str());

    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
