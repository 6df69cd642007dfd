#include "tenet/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace tenet::io {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void write_events_csv(std::ostream& out, const std::vector<EventStream>& streams) {
    bool items = false;
    for (const auto& s : streams) items = items || s.has_item_ids();
    out << (items ? "node_id,timestamp,item_id\n" : "node_id,timestamp\n");
    for (const auto& s : streams) {
        for (std::size_t i = 0; i < s.events.size(); ++i) {
            out << s.node_id << ',' << format_double(s.events[i]);
            if (items) out << ',' << (s.has_item_ids() ? s.item_ids[i] : "");
            out << '\n';
        }
    }
}

void write_truth_csv(std::ostream& out, const NetworkSpec& network, const HazardModel& model) {
    out << "source,target,gamma\n";
    for (const auto& e : network.edges) {
        auto it = model.gamma_per_day.find(e);
        out << network.node_name(e.source) << ',' << network.node_name(e.target) << ','
            << format_double(it == model.gamma_per_day.end() ? 0.0 : it->second) << '\n';
    }
}

void write_scores_csv(std::ostream& out, const EdgeScoreSet& scores) {
    out << "source,target,n,te_raw,te_corrected,h_self,h_joint,method\n";
    for (const auto& r : scores.scores)
        out << r.source << ',' << r.target << ',' << r.n << ',' << format_double(r.te_raw) << ','
            << format_double(r.te_corrected) << ',' << format_double(r.h_self.raw_bits) << ','
            << format_double(r.h_joint.raw_bits) << ',' << to_string(r.h_self.method) << '\n';
}

void write_edges_csv(std::ostream& out, const WeightedDigraph& graph) {
    out << "source,target,te_corrected,te_raw,n\n";
    for (const auto& e : graph.edges)
        out << e.source << ',' << e.target << ',' << format_double(e.weight) << ',' << format_double(e.te_raw)
            << ',' << e.n << '\n';
}

void write_roc_csv(std::ostream& out, const RocCurve& curve) {
    out << "threshold,fpr,tpr\n";
    for (const auto& p : curve.points)
        out << format_double(p.threshold) << ',' << format_double(p.fpr) << ',' << format_double(p.tpr) << '\n';
}

void write_validation_csv(std::ostream& out, const Validation& validation) {
    out << "source,target,cascade_count,te_corrected\n";
    for (const auto& row : validation.rows)
        out << row.pair.source << ',' << row.pair.target << ',' << row.cascade_count << ','
            << format_double(row.te_corrected) << '\n';
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) {
        auto b = f.find_first_not_of(" \t\r");
        auto e = f.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos ? "" : f.substr(b, e - b + 1));
    }
    return fields;
}

double number(const std::string& s, std::size_t line) {
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError(line, "unparseable number '" + s + "'");
    return v;
}

template <typename Fn>
void for_each_row(const std::filesystem::path& path, const std::string& header_first, Fn&& fn) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = split_csv(line);
        if (lineno == 1 && !fields.empty() && fields[0] == header_first) continue;
        fn(fields, lineno);
    }
}

}  // namespace

std::vector<WeightedPair> read_pair_csv(const std::filesystem::path& path) {
    std::vector<WeightedPair> out;
    for_each_row(path, "source", [&](const std::vector<std::string>& f, std::size_t line) {
        if (f.size() < 2 || f[0].empty() || f[1].empty()) throw ParseError(line, "expected source,target");
        WeightedPair p{{f[0], f[1]}, 0.0};
        if (f.size() >= 3 && !f[2].empty()) p.weight = number(f[2], line);
        out.push_back(std::move(p));
    });
    return out;
}

std::vector<NodePair> read_pairs(const std::filesystem::path& path) {
    std::vector<NodePair> out;
    for (auto& p : read_pair_csv(path)) out.push_back(std::move(p.pair));
    return out;
}

EdgeScoreSet read_scores_csv(const std::filesystem::path& path) {
    EdgeScoreSet set;
    for_each_row(path, "source", [&](const std::vector<std::string>& f, std::size_t line) {
        if (f.size() != 8) throw ParseError(line, "expected source,target,n,te_raw,te_corrected,h_self,h_joint,method");
        TEResult r;
        r.source = f[0];
        r.target = f[1];
        r.n = static_cast<std::uint64_t>(number(f[2], line));
        r.te_raw = number(f[3], line);
        r.te_corrected = number(f[4], line);
        r.h_self.raw_bits = number(f[5], line);
        r.h_joint.raw_bits = number(f[6], line);
        r.h_self.method = r.h_joint.method = parse_bias_method(f[7]);
        set.method = r.h_self.method;
        set.scores.push_back(std::move(r));
    });
    return set;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot write " + path.string());
        out << contents;
        if (!out) throw Error("failed writing " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace tenet::io
