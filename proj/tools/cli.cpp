#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <cmath>
#include <ostream>
#include <sstream>

#include "tenet/evaluate.hpp"
#include "tenet/infer.hpp"
#include "tenet/io.hpp"
#include "tenet/random.hpp"
#include "tenet/simulate.hpp"

namespace tenet::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr std::size_t kLargeCandidateCount = 2000;

struct SchemeArgs {
    std::string preset = "synthetic";
    std::string kind;          // empty: from preset or --widths
    std::string width;         // uniform bin width
    std::string widths;        // variable ladder, now-bin first
    std::string stride;
    std::string origin = "0";
    int k = 0;                 // 0: from preset
    int l = 0;
};

struct ScoreArgs {
    std::string events;
    std::string source;
    std::string target;
    std::string candidates;
    std::size_t min_events = 10;
    std::string method = "panzeri_treves";
    std::string window_end;    // empty: last event time
    unsigned jobs = 0;
    bool allow_large = false;
    SchemeArgs scheme;
};

void add_scheme_options(CLI::App* cmd, SchemeArgs& a) {
    cmd->add_option("--preset", a.preset, "Binning preset: digg, twitter or synthetic");
    cmd->add_option("--kind", a.kind, "Binning kind: uniform or variable (default: from preset)");
    cmd->add_option("--width", a.width, "Uniform bin width, e.g. 4h");
    cmd->add_option("--widths", a.widths, "Variable ladder, now-bin first, e.g. 1s,1h,2h");
    cmd->add_option("--stride", a.stride, "Sampling stride (default: now-bin width)");
    cmd->add_option("--origin", a.origin, "Binning origin");
    cmd->add_option("--k", a.k, "Target history lags (0: from preset)");
    cmd->add_option("--l", a.l, "Source history lags (0: from preset)");
}

void add_score_options(CLI::App* cmd, ScoreArgs& a) {
    cmd->add_option("--events", a.events, "Event file (.csv or .jsonl)");
    cmd->add_option("--source", a.source, "Score a single pair: source node");
    cmd->add_option("--target", a.target, "Score a single pair: target node");
    cmd->add_option("--candidates", a.candidates, "Candidate edge list CSV (default: all pairs)");
    cmd->add_option("--min-events", a.min_events, "Activity filter for all-pairs scoring");
    cmd->add_option("--method", a.method, "Bias correction: none, miller_madow or panzeri_treves");
    cmd->add_option("--window-end", a.window_end, "End of the observation window (default: last event)");
    cmd->add_option("--jobs", a.jobs, "Worker threads (0: all cores)");
    cmd->add_flag("--allow-large", a.allow_large, "Permit more than 2000 candidate pairs");
    add_scheme_options(cmd, a.scheme);
}

std::vector<Seconds> parse_duration_list(const std::string& text) {
    std::vector<Seconds> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_duration(item));
    return out;
}

BinningScheme resolve_scheme(const SchemeArgs& a) {
    const std::optional<Seconds> stride =
        a.stride.empty() ? std::nullopt : std::optional<Seconds>(parse_duration(a.stride));
    const Seconds origin = parse_duration(a.origin);
    BinningScheme s;
    if (!a.widths.empty()) {
        if (a.kind == "uniform") throw ConfigError("--widths describes a variable scheme; drop --kind uniform");
        auto w = parse_duration_list(a.widths);
        if (w.size() < 2) throw ConfigError("--widths needs the now-bin width plus at least one history width");
        const Seconds now = w.front();
        w.erase(w.begin());
        s = BinningScheme::variable(now, std::move(w), stride, origin);
    } else if (a.kind == "uniform" || !a.width.empty()) {
        if (a.kind == "variable") throw ConfigError("--width describes a uniform scheme; use --widths");
        const Seconds width = parse_duration(a.width.empty() ? "4h" : a.width);
        s = BinningScheme::uniform(width, a.k > 0 ? a.k : 1, a.l > 0 ? a.l : 1, origin);
    } else {
        if (!a.kind.empty() && a.kind != "variable") throw ConfigError("unknown binning kind '" + a.kind + "'");
        s = scheme_preset(a.preset);
        if (stride) s.stride = *stride;
        s.origin = origin;
    }
    if (stride && s.kind == BinningKind::uniform && *stride != s.now_width)
        throw ConfigError("uniform schemes sample every bin; --stride must equal the bin width");
    if (a.k > 0) s.k = a.k;
    if (a.l > 0) s.l = a.l;
    s.validate();
    return s;
}

Json scheme_json(const BinningScheme& s) {
    return Json{{"kind", s.kind == BinningKind::uniform ? "uniform" : "variable"},
                {"now_width", s.now_width},
                {"history_widths", s.history_widths},
                {"k", s.k},
                {"l", s.l},
                {"stride", s.stride},
                {"origin", s.origin},
                {"span", s.span()}};
}

std::vector<EventStream> load_streams(const std::string& path) {
    if (path.empty()) throw ConfigError("--events is required");
    if (!fs::exists(path)) throw ConfigError("event file not found: " + path);
    const auto format = fs::path(path).extension() == ".jsonl" ? EventFormat::jsonl : EventFormat::csv;
    return load_events(path, format).streams;
}

Seconds last_event(const std::vector<EventStream>& streams) {
    Seconds end = 0.0;
    for (const auto& s : streams)
        if (!s.events.empty()) end = std::max(end, s.events.back());
    return end;
}

std::string csv_of(void (*writer)(std::ostream&, const EdgeScoreSet&), const EdgeScoreSet& set) {
    std::ostringstream os;
    writer(os, set);
    return os.str();
}

template <class Writer, class Value>
void write_csv(const fs::path& path, Writer writer, const Value& value) {
    std::ostringstream os;
    writer(os, value);
    io::write_file(path, os.str());
}

void write_json(const fs::path& path, const Json& j) { io::write_file(path, j.dump(2) + "\n"); }

void write_manifest(const fs::path& dir, const CLI::App& cmd) {
    io::write_file(dir / "manifest.toml", "[" + cmd.get_name() + "]\n" + cmd.config_to_str(true, false));
}

Json result_json(const TEResult& r) {
    return Json{{"source", r.source},       {"target", r.target},
                {"n", r.n},                 {"te_raw", r.te_raw},
                {"te_corrected", r.te_corrected},
                {"h_self", r.h_self.raw_bits}, {"h_joint", r.h_joint.raw_bits}};
}

EdgeScoreSet score_from_args(const ScoreArgs& a, Json& summary, std::ostream& err) {
    const auto method = parse_bias_method(a.method);
    const auto scheme = resolve_scheme(a.scheme);
    const auto streams = load_streams(a.events);

    std::vector<NodePair> candidates;
    auto policy = CandidatePolicy::all_pairs;
    if (!a.source.empty() || !a.target.empty()) {
        if (a.source.empty() || a.target.empty()) throw ConfigError("--source and --target go together");
        candidates = {{a.source, a.target}};
        policy = CandidatePolicy::edge_list;
    } else if (!a.candidates.empty()) {
        if (!fs::exists(a.candidates)) throw ConfigError("candidate file not found: " + a.candidates);
        candidates = io::read_pairs(a.candidates);
        policy = CandidatePolicy::edge_list;
    } else {
        candidates = all_pairs(streams, a.min_events);
    }
    if (candidates.size() > kLargeCandidateCount) {
        err << "warning: " << candidates.size() << " candidate pairs\n";
        if (!a.allow_large)
            throw ConfigError("more than " + std::to_string(kLargeCandidateCount) +
                              " candidate pairs; pass --allow-large to proceed");
    }

    ScoreOptions opt;
    opt.window_end = a.window_end.empty() ? last_event(streams) : parse_duration(a.window_end);
    opt.method = method;
    opt.policy = policy;
    opt.jobs = a.jobs;
    auto set = score_edges(streams, candidates, scheme, opt);

    for (const auto& s : set.skipped)
        err << "skipped " << s.pair.source << " -> " << s.pair.target << ": " << s.reason << "\n";

    Json skipped = Json::array();
    for (const auto& s : set.skipped)
        skipped.push_back({{"source", s.pair.source}, {"target", s.pair.target}, {"reason", s.reason}});
    Json results = Json::array();
    for (const auto& r : set.scores) results.push_back(result_json(r));
    summary["scheme"] = scheme_json(scheme);
    summary["method"] = std::string(to_string(method));
    summary["window_end"] = opt.window_end;
    summary["candidates"] = candidates.size();
    summary["scored"] = set.scores.size();
    summary["skipped"] = skipped;
    summary["results"] = results;
    return set;
}

std::vector<NodePair> load_truth(const std::string& path) {
    if (!fs::exists(path)) throw ConfigError("truth file not found: " + path);
    return io::read_pairs(path);
}

ThresholdPolicy resolve_policy(const std::string& name, double threshold) {
    if (name == "fmeasure") return FMeasureOptimal{};
    if (name == "fixed") {
        if (!std::isfinite(threshold)) throw ConfigError("fixed threshold must be finite");
        return FixedThreshold{threshold};
    }
    throw ConfigError("unknown threshold policy '" + name + "' (expected fixed or fmeasure)");
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    int n = 20;
    double mean_degree = 3.0;
    double gamma_over_mu = 2.0;
    double mu = 1.0;
    double days = 450.0;
    double prune_days = 7.0;
    std::uint64_t seed = 1;
    bool cascade_labels = false;
    std::string out = "out";
};

void cmd_simulate(const SimulateArgs& a, const CLI::App& cmd, std::ostream& out) {
    if (!(a.days > 0.0)) throw ConfigError("--days must be positive");
    if (a.n < 0) throw ConfigError("--n must be non-negative");
    const auto net = random_network(a.n, a.mean_degree, derive_seed(a.seed, 0));
    auto model = HazardModel::uniform(net, a.mu, a.gamma_over_mu);
    model.prune_days = a.prune_days;
    const auto streams = simulate(net, model, {a.days, derive_seed(a.seed, 1), a.cascade_labels});

    const fs::path dir = a.out;
    write_csv(dir / "events.csv", io::write_events_csv, streams);
    std::ostringstream truth;
    io::write_truth_csv(truth, net, model);
    io::write_file(dir / "truth.csv", truth.str());

    Json per_node = Json::object();
    std::size_t total = 0;
    for (const auto& s : streams) {
        per_node[s.node_id] = s.size();
        total += s.size();
    }
    write_json(dir / "summary.json", Json{{"nodes", net.n},
                                          {"edges", net.edges.size()},
                                          {"horizon_days", a.days},
                                          {"events", total},
                                          {"events_per_node", per_node}});
    write_manifest(dir, cmd);
    out << "simulated " << net.n << " nodes, " << net.edges.size() << " edges, " << total << " events -> "
        << dir.string() << "\n";
}

struct TeArgs {
    ScoreArgs score;
    std::string out = "out";
};

void cmd_te(const TeArgs& a, const CLI::App& cmd, std::ostream& out, std::ostream& err) {
    Json summary;
    auto set = score_from_args(a.score, summary, err);
    const fs::path dir = a.out;
    io::write_file(dir / "scores.csv", csv_of(io::write_scores_csv, set));
    write_json(dir / "summary.json", summary);
    write_manifest(dir, cmd);
    out << "scored " << set.scores.size() << " pairs (" << set.skipped.size() << " skipped) -> " << dir.string()
        << "\n";
}

struct InferArgs {
    ScoreArgs score;
    std::string scores;        // precomputed scores instead of --events
    std::string policy = "fixed";
    double threshold = 0.0;
    std::string truth;
    std::string out = "out";
};

void cmd_infer(const InferArgs& a, const CLI::App& cmd, std::ostream& out, std::ostream& err) {
    const auto policy = resolve_policy(a.policy, a.threshold);
    std::optional<std::vector<NodePair>> truth;
    if (!a.truth.empty()) truth = load_truth(a.truth);
    if (std::holds_alternative<FMeasureOptimal>(policy) && !truth)
        throw ConfigError("the fmeasure policy needs --truth");

    const fs::path dir = a.out;
    Json summary;
    EdgeScoreSet set;
    if (!a.scores.empty()) {
        if (!fs::exists(a.scores)) throw ConfigError("score file not found: " + a.scores);
        set = io::read_scores_csv(a.scores);
    } else {
        set = score_from_args(a.score, summary, err);
        summary.erase("results");
        io::write_file(dir / "scores.csv", csv_of(io::write_scores_csv, set));
    }
    const auto graph = apply_threshold(set, policy, truth);
    write_csv(dir / "edges.csv", io::write_edges_csv, graph);

    Json influence = Json::array();
    for (const auto& node : outgoing_influence(set))
        influence.push_back({{"node", node.node}, {"outgoing", node.outgoing}});
    summary["policy"] = a.policy;
    summary["threshold"] = graph.threshold;
    summary["nodes"] = graph.nodes.size();
    summary["edges"] = graph.edges.size();
    summary["influence"] = influence;
    if (truth) {
        const auto c = classify(graph, *truth);
        summary["precision"] = c.precision;
        summary["recall"] = c.recall;
        summary["f1"] = c.f1;
    }
    write_json(dir / "summary.json", summary);
    write_manifest(dir, cmd);
    out << graph.edges.size() << " edges above threshold " << io::format_double(graph.threshold) << " -> "
        << dir.string() << "\n";
}

struct EvalArgs {
    std::string scores;
    std::string truth;
    std::string policy = "fmeasure";
    double threshold = 0.0;
    std::string out = "out";
};

void cmd_eval(const EvalArgs& a, const CLI::App& cmd, std::ostream& out) {
    const auto policy = resolve_policy(a.policy, a.threshold);
    if (a.truth.empty()) {
        if (std::holds_alternative<FMeasureOptimal>(policy)) throw ConfigError("the fmeasure policy needs --truth");
        throw ConfigError("eval needs --truth");
    }
    if (a.scores.empty()) throw ConfigError("--scores is required");
    if (!fs::exists(a.scores)) throw ConfigError("score file not found: " + a.scores);
    const auto truth = load_truth(a.truth);
    const auto set = io::read_scores_csv(a.scores);

    const auto labeled = label_scores(set, truth);
    const auto curve = roc(labeled);
    const auto graph = apply_threshold(set, policy, truth);
    const auto c = classify(graph, truth);

    const fs::path dir = a.out;
    write_csv(dir / "roc.csv", io::write_roc_csv, curve);
    write_csv(dir / "edges.csv", io::write_edges_csv, graph);
    const double area = auc(curve);
    write_json(dir / "metrics.json", Json{{"auc", area},
                                          {"positives", labeled.positives.size()},
                                          {"negatives", labeled.negatives.size()},
                                          {"policy", a.policy},
                                          {"threshold", graph.threshold},
                                          {"true_positives", c.true_positives},
                                          {"false_positives", c.false_positives},
                                          {"false_negatives", c.false_negatives},
                                          {"precision", c.precision},
                                          {"recall", c.recall},
                                          {"f1", c.f1}});
    write_manifest(dir, cmd);
    out << "auc " << io::format_double(area) << ", f1 " << io::format_double(c.f1) << " -> " << dir.string()
        << "\n";
}

struct ValidateArgs {
    std::string events;
    std::string scores;
    std::string origin = "global";
    int shuffles = 100;
    std::uint64_t seed = 1;
    std::string out = "out";
};

void cmd_validate(const ValidateArgs& a, const CLI::App& cmd, std::ostream& out, std::ostream& err) {
    OriginRule rule;
    if (a.origin == "global") rule = OriginRule::global;
    else if (a.origin == "pairwise") rule = OriginRule::pairwise;
    else throw ConfigError("unknown origin rule '" + a.origin + "' (expected global or pairwise)");
    if (a.shuffles < 0) throw ConfigError("--shuffles must be non-negative");
    if (a.scores.empty()) throw ConfigError("--scores is required");
    if (!fs::exists(a.scores)) throw ConfigError("score file not found: " + a.scores);

    const auto streams = load_streams(a.events);
    const auto set = io::read_scores_csv(a.scores);
    std::vector<NodePair> pairs;
    for (const auto& r : set.scores) pairs.push_back({r.source, r.target});
    const auto counts = count_cascades(streams, pairs, rule);
    if (counts.streams_without_items > 0)
        err << "warning: " << counts.streams_without_items << " streams carry no item ids\n";
    const auto v = validate(set, counts);

    std::vector<double> x, y;
    for (const auto& row : v.rows) {
        x.push_back(static_cast<double>(row.cascade_count));
        y.push_back(row.te_corrected);
    }
    auto null = shuffled_correlations(x, y, a.shuffles, a.seed);
    const auto below = std::count_if(null.begin(), null.end(), [&](double r) { return r < v.r; });
    Json summary{{"pairs", v.rows.size()},
                 {"origin", a.origin},
                 {"r", v.r},
                 {"shuffles", a.shuffles},
                 {"shuffled_below", below}};
    if (!null.empty()) {
        std::sort(null.begin(), null.end());
        const auto idx = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(null.size()))) - 1;
        summary["shuffled_p95"] = null[idx];
    }

    const fs::path dir = a.out;
    write_csv(dir / "validation.csv", io::write_validation_csv, v);
    write_json(dir / "summary.json", summary);
    write_manifest(dir, cmd);
    out << "r " << io::format_double(v.r) << " over " << v.rows.size() << " pairs -> " << dir.string() << "\n";
}

std::uint64_t env_seed() {
    const char* env = std::getenv("TE_NET_SEED");
    if (env == nullptr || *env == '\0') return 1;
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw ConfigError(std::string("TE_NET_SEED is not an unsigned integer: ") + env);
    return v;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        CLI::App app{"Transfer entropy network inference for event streams", "tenet"};
        app.require_subcommand(1);
        app.option_defaults()->always_capture_default();
        app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        app.fallthrough();
        app.set_config("--config", "", "TOML config with a section per command; flags override");
        const std::uint64_t seed = env_seed();

        SimulateArgs sim;
        sim.seed = seed;
        auto* sim_cmd = app.add_subcommand("simulate", "Simulate a random influence network");
        sim_cmd->add_option("--n", sim.n, "Number of nodes");
        sim_cmd->add_option("--mean-degree", sim.mean_degree, "Mean out-degree");
        sim_cmd->add_option("--gamma-over-mu", sim.gamma_over_mu, "Influence strength relative to background");
        sim_cmd->add_option("--mu", sim.mu, "Background rate per day");
        sim_cmd->add_option("--days", sim.days, "Horizon in days");
        sim_cmd->add_option("--prune-days", sim.prune_days, "Ignore source events older than this");
        sim_cmd->add_option("--seed", sim.seed, "Seed (default: TE_NET_SEED or 1)");
        sim_cmd->add_flag("--cascade-labels", sim.cascade_labels, "Attach cascade item ids");
        sim_cmd->add_option("--out", sim.out, "Output directory");

        TeArgs te;
        auto* te_cmd = app.add_subcommand("te", "Score candidate pairs with transfer entropy");
        add_score_options(te_cmd, te.score);
        te_cmd->add_option("--out", te.out, "Output directory");

        InferArgs inf;
        auto* inf_cmd = app.add_subcommand("infer", "Threshold scores into a directed graph");
        add_score_options(inf_cmd, inf.score);
        inf_cmd->add_option("--scores", inf.scores, "Use a score CSV instead of --events");
        inf_cmd->add_option("--policy", inf.policy, "Threshold policy: fixed or fmeasure");
        inf_cmd->add_option("--threshold", inf.threshold, "Fixed threshold on te_corrected");
        inf_cmd->add_option("--truth", inf.truth, "Ground-truth edge list");
        inf_cmd->add_option("--out", inf.out, "Output directory");

        EvalArgs ev;
        auto* ev_cmd = app.add_subcommand("eval", "ROC, AUC and F-measure against ground truth");
        ev_cmd->add_option("--scores", ev.scores, "Score CSV");
        ev_cmd->add_option("--truth", ev.truth, "Ground-truth edge list");
        ev_cmd->add_option("--policy", ev.policy, "Threshold policy: fixed or fmeasure");
        ev_cmd->add_option("--threshold", ev.threshold, "Fixed threshold on te_corrected");
        ev_cmd->add_option("--out", ev.out, "Output directory");

        ValidateArgs val;
        val.seed = seed;
        auto* val_cmd = app.add_subcommand("validate", "Correlate scores with cascade counts");
        val_cmd->add_option("--events", val.events, "Event file with item ids");
        val_cmd->add_option("--scores", val.scores, "Score CSV");
        val_cmd->add_option("--origin", val.origin, "Cascade origin rule: global or pairwise");
        val_cmd->add_option("--shuffles", val.shuffles, "Alignment-shuffled controls");
        val_cmd->add_option("--seed", val.seed, "Shuffle seed (default: TE_NET_SEED or 1)");
        val_cmd->add_option("--out", val.out, "Output directory");

        try {
            std::vector<std::string> reversed(args.rbegin(), args.rend());
            app.parse(reversed);
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e, out, err);
            return code == 0 ? 0 : 2;
        }

        if (sim_cmd->parsed()) cmd_simulate(sim, *sim_cmd, out);
        else if (te_cmd->parsed()) cmd_te(te, *te_cmd, out, err);
        else if (inf_cmd->parsed()) cmd_infer(inf, *inf_cmd, out, err);
        else if (ev_cmd->parsed()) cmd_eval(ev, *ev_cmd, out);
        else if (val_cmd->parsed()) cmd_validate(val, *val_cmd, out, err);
        return 0;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace tenet::cli
