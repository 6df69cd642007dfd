#include "tenet/events.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "tenet/random.hpp"

namespace tenet {

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_double(std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

struct RawEvent {
    Seconds t;
    std::string item;
};

LoadResult assemble(std::map<std::string, std::vector<RawEvent>>& rows, bool any_items) {
    LoadResult out;
    for (auto& [node, raw] : rows) {
        std::stable_sort(raw.begin(), raw.end(),
                         [](const RawEvent& a, const RawEvent& b) { return a.t < b.t; });
        EventStream s;
        s.node_id = node;
        for (auto& ev : raw) {
            if (!s.events.empty() && s.events.back() == ev.t) {
                ++out.duplicates_collapsed;
                continue;
            }
            s.events.push_back(ev.t);
            if (any_items) s.item_ids.push_back(std::move(ev.item));
        }
        out.streams.push_back(std::move(s));
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// BinningScheme

Seconds BinningScheme::span() const {
    Seconds total = now_width;
    for (int i = 0; i < max_lags() && i < static_cast<int>(history_widths.size()); ++i)
        total += history_widths[i];
    return total;
}

void BinningScheme::validate() const {
    if (k < 1 || l < 1) throw ConfigError("binning scheme needs k >= 1 and l >= 1");
    if (k > 31 || l > 31) throw ConfigError("binning scheme supports at most 31 lags");
    if (static_cast<int>(history_widths.size()) < max_lags())
        throw ConfigError("binning scheme has fewer history widths than lags");
    if (!(now_width > 0.0) || !(stride > 0.0) || !std::isfinite(now_width) || !std::isfinite(stride))
        throw ConfigError("bin widths and stride must be positive");
    for (Seconds w : history_widths)
        if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("bin widths must be positive");
    if (kind == BinningKind::uniform) {
        for (Seconds w : history_widths)
            if (w != now_width) throw ConfigError("uniform scheme requires equal widths");
        if (stride != now_width) throw ConfigError("uniform scheme requires stride equal to the bin width");
    }
}

BinningScheme BinningScheme::uniform(Seconds width, int k, int l, Seconds origin) {
    BinningScheme s;
    s.kind = BinningKind::uniform;
    s.now_width = width;
    s.history_widths.assign(static_cast<std::size_t>(std::max(k, l)), width);
    s.k = k;
    s.l = l;
    s.stride = width;
    s.origin = origin;
    return s;
}

BinningScheme BinningScheme::variable(Seconds now_width, std::vector<Seconds> history_widths,
                                      std::optional<Seconds> stride, Seconds origin) {
    BinningScheme s;
    s.kind = BinningKind::variable;
    s.now_width = now_width;
    s.k = s.l = static_cast<int>(history_widths.size());
    s.history_widths = std::move(history_widths);
    s.stride = stride.value_or(now_width);
    s.origin = origin;
    return s;
}

BinningScheme scheme_preset(const std::string& name) {
    if (name == "digg") return BinningScheme::uniform(4 * kHour, 7, 7);
    if (name == "twitter") return BinningScheme::variable(1.0, {10 * kMinute, 2 * kHour, 24 * kHour});
    if (name == "synthetic") return BinningScheme::variable(1.0, {1 * kHour, 2 * kHour});
    throw ConfigError("unknown scheme preset '" + name + "' (expected digg, twitter or synthetic)");
}

// ---------------------------------------------------------------------------
// Loading

EventStream make_stream(std::string node_id, std::vector<Seconds> times) {
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    return EventStream{std::move(node_id), std::move(times), {}};
}

LoadResult parse_events_csv(std::istream& in, const LoadOptions& options) {
    std::map<std::string, std::vector<RawEvent>> rows;
    bool any_items = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string stripped = trim(line);
        if (stripped.empty()) continue;

        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (true) {
            auto comma = stripped.find(',', pos);
            fields.push_back(trim(std::string_view(stripped).substr(pos, comma - pos)));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (lineno == 1 && fields[0] == "node_id") continue;
        if (fields.size() < 2 || fields.size() > 3)
            throw ParseError(lineno, "expected node_id,timestamp[,item_id]");
        if (fields[0].empty()) throw ParseError(lineno, "empty node_id");
        auto t = parse_double(fields[1]);
        if (!t) throw ParseError(lineno, "unparseable timestamp");
        RawEvent ev{*t - options.epoch, {}};
        if (fields.size() == 3) {
            any_items = true;
            ev.item = fields[2];
        }
        rows[fields[0]].push_back(std::move(ev));
    }
    return assemble(rows, any_items);
}

LoadResult parse_events_jsonl(std::istream& in, const LoadOptions& options) {
    using nlohmann::json;
    std::map<std::string, std::vector<RawEvent>> rows;
    bool any_items = false;
    std::string line;
    std::size_t lineno = 0;
    auto as_text = [](const json& v) {
        return v.is_string() ? v.get<std::string>() : v.dump();
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) throw ParseError(lineno, "invalid JSON object");
        if (!obj.contains("node_id")) throw ParseError(lineno, "missing node_id");
        if (!obj.contains("timestamp")) throw ParseError(lineno, "missing timestamp");
        const json& ts = obj["timestamp"];
        std::optional<double> t;
        if (ts.is_number()) t = ts.get<double>();
        else if (ts.is_string()) t = parse_double(ts.get<std::string>());
        if (!t || !std::isfinite(*t)) throw ParseError(lineno, "unparseable timestamp");
        RawEvent ev{*t - options.epoch, {}};
        if (obj.contains("item_id") && !obj["item_id"].is_null()) {
            any_items = true;
            ev.item = as_text(obj["item_id"]);
        }
        rows[as_text(obj["node_id"])].push_back(std::move(ev));
    }
    return assemble(rows, any_items);
}

LoadResult load_events(const std::filesystem::path& path, EventFormat format,
                       const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open events file " + path.string());
    return format == EventFormat::csv ? parse_events_csv(in, options)
                                      : parse_events_jsonl(in, options);
}

// ---------------------------------------------------------------------------
// Binning

BinnedSeries bin_uniform(const EventStream& stream, Seconds origin, Seconds width,
                         std::size_t count) {
    if (!(width > 0.0)) throw ConfigError("bin width must be positive");
    if (count < 1) throw ConfigError("bin count must be at least 1");
    BinnedSeries out{stream.node_id, std::vector<std::uint8_t>(count, 0), origin, width};
    auto edge = [&](std::int64_t b) { return origin + static_cast<double>(b) * width; };
    const auto n = static_cast<std::int64_t>(count);
    for (Seconds e : stream.events) {
        double guess = std::ceil((e - origin) / width) - 1.0;
        if (guess < -1.0 || guess > static_cast<double>(n)) continue;
        auto b = static_cast<std::int64_t>(guess);
        while (edge(b) >= e) --b;
        while (edge(b + 1) < e) ++b;
        if (b >= 0 && b < n) out.bits[static_cast<std::size_t>(b)] = 1;
    }
    return out;
}

std::uint64_t sample_count(const BinningScheme& scheme, Seconds window_end) {
    double q = (window_end - scheme.origin - scheme.span()) / scheme.stride;
    if (q < -1e-9) return 0;
    return static_cast<std::uint64_t>(std::floor(q + 1e-9)) + 1;
}

namespace {

// Edge positions of the stacked bins at evaluation index m. Edge 0 is the
// evaluation time itself; bin j covers (edge(m, j+1), edge(m, j)].
class BinGeometry {
public:
    BinGeometry(const BinningScheme& s, std::uint64_t count) : scheme_(s), count_(count) {
        lags_ = s.max_lags();
        offsets_.push_back(0.0);
        offsets_.push_back(s.now_width);
        for (int i = 0; i < lags_; ++i) offsets_.push_back(offsets_.back() + s.history_widths[i]);
        first_ = s.origin + s.span();
    }

    double edge(std::int64_t m, int o) const {
        if (scheme_.kind == BinningKind::uniform)
            return scheme_.origin + static_cast<double>(m + lags_ + 1 - o) * scheme_.now_width;
        return first_ + static_cast<double>(m) * scheme_.stride - offsets_[o];
    }

    // Smallest m in [0, count] with edge(m, o) >= e.
    std::int64_t first_reaching(double e, int o) const {
        const auto n = static_cast<std::int64_t>(count_);
        double guess = std::ceil((e - edge(0, o)) / scheme_.stride);
        std::int64_t m = guess <= 0.0 ? 0 : guess >= static_cast<double>(n) ? n
                                                                           : static_cast<std::int64_t>(guess);
        while (m > 0 && edge(m - 1, o) >= e) --m;
        while (m < n && edge(m, o) < e) ++m;
        return m;
    }

private:
    const BinningScheme& scheme_;
    std::uint64_t count_;
    int lags_ = 0;
    std::vector<double> offsets_;
    double first_ = 0.0;
};

struct Toggle {
    std::int64_t at;
    int field;   // 0 y_now, 1 y_hist, 2 x_hist
    std::uint32_t mask;
};

void add_channel(const BinGeometry& geo, const std::vector<Seconds>& events, int bin, int field,
                 std::uint32_t mask, std::vector<Toggle>& toggles) {
    std::int64_t open_start = -1, open_end = -1;
    for (Seconds e : events) {
        std::int64_t start = geo.first_reaching(e, bin);
        std::int64_t end = geo.first_reaching(e, bin + 1);
        if (start >= end) continue;
        if (open_start >= 0 && start <= open_end) {
            open_end = std::max(open_end, end);
            continue;
        }
        if (open_start >= 0) {
            toggles.push_back({open_start, field, mask});
            toggles.push_back({open_end, field, mask});
        }
        open_start = start;
        open_end = end;
    }
    if (open_start >= 0) {
        toggles.push_back({open_start, field, mask});
        toggles.push_back({open_end, field, mask});
    }
}

void push_run(SampleSet& set, const Sample& s, std::uint64_t count) {
    if (count == 0) return;
    if (!set.runs.empty() && set.runs.back().sample == s) set.runs.back().count += count;
    else set.runs.push_back({s, count});
}

}  // namespace

SampleSet history_samples(const EventStream& target, const EventStream& source,
                          const BinningScheme& scheme, Seconds window_end) {
    scheme.validate();
    const std::uint64_t count = sample_count(scheme, window_end);
    if (count == 0) throw Error("insufficient window: observation window shorter than history span");

    BinGeometry geo(scheme, count);
    std::vector<Toggle> toggles;
    add_channel(geo, target.events, 0, 0, 1u, toggles);
    for (int i = 1; i <= scheme.k; ++i) add_channel(geo, target.events, i, 1, 1u << (i - 1), toggles);
    for (int i = 1; i <= scheme.l; ++i) add_channel(geo, source.events, i, 2, 1u << (i - 1), toggles);
    std::sort(toggles.begin(), toggles.end(),
              [](const Toggle& a, const Toggle& b) { return a.at < b.at; });

    SampleSet set;
    set.k = scheme.k;
    set.l = scheme.l;
    set.n = count;
    Sample state;
    std::int64_t pos = 0;
    for (std::size_t i = 0; i < toggles.size();) {
        const std::int64_t at = toggles[i].at;
        push_run(set, state, static_cast<std::uint64_t>(at - pos));
        for (; i < toggles.size() && toggles[i].at == at; ++i) {
            const Toggle& t = toggles[i];
            if (t.field == 0) state.y_now ^= static_cast<std::uint8_t>(t.mask);
            else if (t.field == 1) state.y_hist ^= t.mask;
            else state.x_hist ^= t.mask;
        }
        pos = at;
    }
    push_run(set, state, count - static_cast<std::uint64_t>(pos));
    return set;
}

SampleSet lagged_samples(const BinnedSeries& target, const BinnedSeries& source, int k, int l) {
    if (k < 1 || l < 1 || k > 31 || l > 31) throw ConfigError("lags must be in [1, 31]");
    if (target.bits.size() != source.bits.size())
        throw Error("lagged samples need series over a common set of bins");
    const std::size_t lags = static_cast<std::size_t>(std::max(k, l));
    if (target.bits.size() < lags + 1)
        throw Error("insufficient window: observation window shorter than history span");

    SampleSet set;
    set.k = k;
    set.l = l;
    for (std::size_t now = lags; now < target.bits.size(); ++now) {
        Sample s;
        s.y_now = target.bits[now];
        for (int i = 1; i <= k; ++i) s.y_hist |= static_cast<std::uint32_t>(target.bits[now - i]) << (i - 1);
        for (int i = 1; i <= l; ++i) s.x_hist |= static_cast<std::uint32_t>(source.bits[now - i]) << (i - 1);
        push_run(set, s, 1);
        ++set.n;
    }
    return set;
}

std::vector<Sample> SampleSet::expanded() const {
    std::vector<Sample> out;
    out.reserve(static_cast<std::size_t>(n));
    for (const auto& run : runs) out.insert(out.end(), static_cast<std::size_t>(run.count), run.sample);
    return out;
}

EventStream subsample(const EventStream& stream, double keep_probability, std::uint64_t seed) {
    if (!(keep_probability >= 0.0 && keep_probability <= 1.0))
        throw ConfigError("subsample probability must lie in [0, 1]");
    Rng rng(seed);
    EventStream out;
    out.node_id = stream.node_id;
    for (std::size_t i = 0; i < stream.events.size(); ++i) {
        if (uniform01(rng) < keep_probability) {
            out.events.push_back(stream.events[i]);
            if (stream.has_item_ids()) out.item_ids.push_back(stream.item_ids[i]);
        }
    }
    return out;
}

Seconds parse_duration(const std::string& text) {
    std::string s = trim(text);
    std::size_t split = s.find_first_not_of("0123456789.+-eE");
    // "1e" would swallow a unit letter, so back off if the exponent has no digits.
    while (split != std::string::npos && split > 0 && (s[split - 1] == 'e' || s[split - 1] == 'E'))
        --split;
    std::string number = s.substr(0, split);
    std::string unit = split == std::string::npos ? "" : trim(s.substr(split));
    auto value = parse_double(number);
    if (number.empty() || !value) throw ConfigError("invalid duration '" + text + "'");

    static const std::map<std::string, double> units = {
        {"", 1.0},        {"s", 1.0},      {"sec", 1.0},      {"secs", 1.0},
        {"min", kMinute}, {"mins", kMinute}, {"h", kHour},      {"hr", kHour},
        {"hrs", kHour},   {"hour", kHour}, {"hours", kHour},  {"d", kDay},
        {"day", kDay},    {"days", kDay},
    };
    auto it = units.find(unit);
    if (it == units.end()) throw ConfigError("unknown duration unit '" + unit + "' in '" + text + "'");
    return *value * it->second;
}

}  // namespace tenet
