#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "tenet/evaluate.hpp"
#include "tenet/infer.hpp"
#include "tenet/random.hpp"
#include "tenet/simulate.hpp"

using namespace tenet;

namespace {

TEResult score(std::string s, std::string t, double v) {
    TEResult r;
    r.source = std::move(s);
    r.target = std::move(t);
    r.te_corrected = v;
    r.te_raw = v;
    return r;
}

EdgeScoreSet four_scores() {
    EdgeScoreSet set;
    set.scores = {score("a", "b", 0.9), score("a", "c", 0.8), score("b", "c", 0.7), score("c", "a", 0.1)};
    return set;
}

const std::vector<NodePair> kFourTruth{{"a", "b"}, {"b", "c"}};

std::set<std::pair<std::string, std::string>> edge_set(const WeightedDigraph& g) {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& e : g.edges) out.emplace(e.source, e.target);
    return out;
}

// F1 for "score > t" straight from the definition.
double f1_at(const EdgeScoreSet& set, const std::vector<NodePair>& truth, double t) {
    const std::set<NodePair> pos(truth.begin(), truth.end());
    double tp = 0, fp = 0;
    for (const auto& r : set.scores)
        if (r.te_corrected > t) (pos.count({r.source, r.target}) ? tp : fp) += 1;
    const double fn = static_cast<double>(pos.size()) - tp;
    return tp == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
}

}  // namespace

TEST_CASE("all_pairs enumerates ordered pairs of active nodes") {
    std::vector<EventStream> streams{{"x", std::vector<double>(12, 0.0), {}}, {"y", std::vector<double>(10, 0.0), {}},
                                     {"quiet", std::vector<double>(3, 0.0), {}}};
    auto pairs = all_pairs(streams, 10);
    CHECK(pairs == std::vector<NodePair>{{"x", "y"}, {"y", "x"}});
    CHECK(all_pairs(streams, 0).size() == 6);
}

TEST_CASE("score_edges produces one result per candidate") {
    NetworkSpec pair{2, {{0, 1}}, 0.0};
    auto streams = simulate(pair, HazardModel::uniform(pair, 1.0, 2.0), {60.0, 3, false});
    auto scheme = scheme_preset("synthetic");
    ScoreOptions opt;
    opt.window_end = 60 * kDay;

    auto set = score_edges(streams, all_pairs(streams, 0), scheme, opt);
    REQUIRE(set.scores.size() == 2);
    CHECK(set.scores[0].source == "n0");
    CHECK(set.scores[1].source == "n1");
    CHECK(set.skipped.empty());

    SUBCASE("restricted candidates") {
        auto only = score_edges(streams, {{"n0", "n1"}}, scheme, opt);
        REQUIRE(only.scores.size() == 1);
        CHECK(only.scores[0].target == "n1");
    }
    SUBCASE("bad pairs are skipped and reported") {
        auto bad = score_edges(streams, {{"n0", "n0"}, {"n0", "ghost"}, {"n1", "n0"}}, scheme, opt);
        CHECK(bad.scores.size() == 1);
        CHECK(bad.skipped.size() == 2);
        opt.window_end = 60.0;   // shorter than the history span
        auto short_window = score_edges(streams, {{"n0", "n1"}}, scheme, opt);
        CHECK(short_window.scores.empty());
        REQUIRE(short_window.skipped.size() == 1);
        CHECK(short_window.skipped[0].reason.find("insufficient window") != std::string::npos);
    }
}

TEST_CASE("score_edges is independent of candidate order and job count") {
    auto net = random_network(6, 2.0, 8);
    auto streams = simulate(net, HazardModel::uniform(net, 1.0, 2.0), {80.0, 8, false});
    auto cands = all_pairs(streams, 0);
    ScoreOptions opt;
    opt.window_end = 80 * kDay;
    auto scheme = scheme_preset("synthetic");
    auto a = score_edges(streams, cands, scheme, opt);
    std::reverse(cands.begin(), cands.end());
    opt.jobs = 4;
    auto b = score_edges(streams, cands, scheme, opt);
    REQUIRE(a.scores.size() == b.scores.size());
    for (std::size_t i = 0; i < a.scores.size(); ++i) {
        CHECK(a.scores[i].source == b.scores[i].source);
        CHECK(a.scores[i].target == b.scores[i].target);
        CHECK(a.scores[i].te_corrected == b.scores[i].te_corrected);
        CHECK(a.scores[i].te_raw == b.scores[i].te_raw);
    }
}

TEST_CASE("influence direction shows up as asymmetric transfer entropy") {
    NetworkSpec pair{2, {{0, 1}}, 0.0};
    auto streams = simulate(pair, HazardModel::uniform(pair, 1.0, 2.0), {500.0, 2024, false});
    ScoreOptions opt;
    opt.window_end = 500 * kDay;
    auto set = score_edges(streams, all_pairs(streams, 0), scheme_preset("synthetic"), opt);
    REQUIRE(set.scores.size() == 2);
    // scores sorted: (n0 -> n1), (n1 -> n0)
    CHECK(set.scores[0].te_corrected > set.scores[1].te_corrected);
}

TEST_CASE("fixed thresholds") {
    auto set = four_scores();
    CHECK(apply_threshold(set, FixedThreshold{1.0}).edges.empty());
    CHECK(apply_threshold(set, FixedThreshold{-std::numeric_limits<double>::infinity()}).edges.size() == 4);
    auto g = apply_threshold(set, FixedThreshold{0.75});
    CHECK(edge_set(g) == std::set<std::pair<std::string, std::string>>{{"a", "b"}, {"a", "c"}});
    CHECK(g.nodes == std::vector<std::string>{"a", "b", "c"});
    // Strictly greater than the threshold.
    CHECK(apply_threshold(set, FixedThreshold{0.8}).edges.size() == 1);
}

TEST_CASE("F-measure threshold on the worked example") {
    auto g = apply_threshold(four_scores(), FMeasureOptimal{}, kFourTruth);
    CHECK(g.threshold < 0.7);
    CHECK(g.threshold > 0.1);
    CHECK(g.threshold == std::nextafter(0.7, -1.0));
    CHECK(edge_set(g).size() == 3);
    auto c = classify(g, kFourTruth);
    CHECK(c.f1 == doctest::Approx(0.8));
    CHECK_THROWS_AS(apply_threshold(four_scores(), FMeasureOptimal{}), ConfigError);
}

TEST_CASE("F-measure ties go to the sparser graph") {
    EdgeScoreSet set;
    // Cutting below 0.9 gives F1 = 2/3 (tp 1, fn 1); below 0.5 gives tp 2, fp 2 -> 2/3 too.
    set.scores = {score("a", "b", 0.9), score("a", "c", 0.6), score("c", "a", 0.55), score("b", "c", 0.5)};
    auto g = apply_threshold(set, FMeasureOptimal{}, std::vector<NodePair>{{"a", "b"}, {"b", "c"}});
    CHECK(g.edges.size() == 1);
}

TEST_CASE("F-measure optimum beats every other cut point") {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        EdgeScoreSet set;
        std::vector<NodePair> truth;
        for (int i = 0; i < 12; ++i) {
            const std::string s = "s" + std::to_string(i), t = "t" + std::to_string(i);
            const bool positive = uniform01(rng) < 0.4;
            const double v = std::round((uniform01(rng) + (positive ? 0.3 : 0.0)) * 20.0) / 20.0;
            set.scores.push_back(score(s, t, v));
            if (positive) truth.push_back({s, t});
        }
        if (truth.empty()) continue;
        auto g = apply_threshold(set, FMeasureOptimal{}, truth);
        const double best = classify(g, truth).f1;
        std::vector<double> values;
        for (const auto& r : set.scores) values.push_back(r.te_corrected);
        for (double t : candidate_thresholds(values)) CHECK(best >= f1_at(set, truth, t) - 1e-15);
    }
}

TEST_CASE("thresholded graphs are nested") {
    Rng rng(4);
    EdgeScoreSet set;
    for (int i = 0; i < 30; ++i) set.scores.push_back(score("a" + std::to_string(i), "b", uniform01(rng)));
    auto prev = edge_set(apply_threshold(set, FixedThreshold{-1.0}));
    for (double t = 0.0; t <= 1.0; t += 0.05) {
        auto cur = edge_set(apply_threshold(set, FixedThreshold{t}));
        CHECK(std::includes(prev.begin(), prev.end(), cur.begin(), cur.end()));
        prev = cur;
    }
}

TEST_CASE("perfectly separated scores recover the truth exactly") {
    EdgeScoreSet set;
    set.scores = {score("a", "b", 0.5), score("b", "c", 0.4), score("a", "c", 0.1), score("c", "b", 0.05)};
    auto g = apply_threshold(set, FMeasureOptimal{}, kFourTruth);
    CHECK(edge_set(g) == std::set<std::pair<std::string, std::string>>{{"a", "b"}, {"b", "c"}});
}

TEST_CASE("outgoing influence ranking") {
    SUBCASE("single edge") {
        EdgeScoreSet set;
        set.scores = {score("x", "y", 0.3)};
        auto rank = outgoing_influence(set);
        REQUIRE(rank.size() == 2);
        CHECK(rank[0].node == "x");
        CHECK(rank[0].outgoing == 0.3);
        CHECK(rank[1].node == "y");
        CHECK(rank[1].outgoing == 0.0);
    }
    SUBCASE("ties broken by node id") {
        EdgeScoreSet set;
        set.scores = {score("m", "z", 0.2), score("b", "z", 0.2)};
        auto rank = outgoing_influence(set);
        CHECK(rank[0].node == "b");
        CHECK(rank[1].node == "m");
    }
    SUBCASE("one strong edge outranks many weak ones") {
        EdgeScoreSet set;
        for (int i = 0; i < 5; ++i) set.scores.push_back(score("hub", "f" + std::to_string(i), 0.01));
        set.scores.push_back(score("focused", "g", 0.2));
        CHECK(outgoing_influence(set)[0].node == "focused");
    }
}
