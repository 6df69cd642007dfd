#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tenet/error.hpp"

namespace tenet {

// Timestamps are seconds relative to the observation window origin.
using Seconds = double;

inline constexpr Seconds kMinute = 60.0;
inline constexpr Seconds kHour = 3600.0;
inline constexpr Seconds kDay = 86400.0;

struct EventStream {
    std::string node_id;
    std::vector<Seconds> events;             // strictly increasing
    std::vector<std::string> item_ids;       // empty, or one per event

    bool has_item_ids() const { return !item_ids.empty(); }
    std::size_t size() const { return events.size(); }
};

enum class BinningKind { uniform, variable };

// Bin layout shared by target and source. The "now" bin is (t - now_width, t];
// history bin i (1-based) sits immediately before bin i-1, so the stacked
// bins tile (t - span, t] without gaps.
struct BinningScheme {
    BinningKind kind = BinningKind::variable;
    Seconds now_width = 1.0;
    std::vector<Seconds> history_widths;     // one per lag, most recent first
    int k = 1;                               // target lags
    int l = 1;                               // source lags
    Seconds stride = 1.0;
    Seconds origin = 0.0;

    int max_lags() const { return k > l ? k : l; }
    Seconds span() const;                    // now_width + widths of max(k,l) lags
    void validate() const;                   // throws ConfigError

    static BinningScheme uniform(Seconds width, int k, int l, Seconds origin = 0.0);
    static BinningScheme variable(Seconds now_width, std::vector<Seconds> history_widths,
                                  std::optional<Seconds> stride = std::nullopt,
                                  Seconds origin = 0.0);

    bool operator==(const BinningScheme&) const = default;
};

// Named presets: "digg", "twitter", "synthetic".
BinningScheme scheme_preset(const std::string& name);

struct BinnedSeries {
    std::string node_id;
    std::vector<std::uint8_t> bits;
    Seconds origin = 0.0;
    Seconds width = 0.0;
};

// One evaluation time. Bit i of y_hist / x_hist holds lag i+1.
struct Sample {
    std::uint8_t y_now = 0;
    std::uint32_t y_hist = 0;
    std::uint32_t x_hist = 0;

    bool operator==(const Sample&) const = default;
};

// Consecutive evaluation times sharing one outcome, in time order.
struct SampleRun {
    Sample sample;
    std::uint64_t count = 0;
};

struct SampleSet {
    int k = 1;
    int l = 1;
    std::uint64_t n = 0;
    std::vector<SampleRun> runs;

    std::vector<Sample> expanded() const;
};

enum class EventFormat { csv, jsonl };

struct LoadResult {
    std::vector<EventStream> streams;        // sorted by node_id
    std::size_t duplicates_collapsed = 0;
};

struct LoadOptions {
    // Subtracted from every timestamp; used to rebase absolute epochs.
    Seconds epoch = 0.0;
};

LoadResult load_events(const std::filesystem::path& path, EventFormat format,
                       const LoadOptions& options = {});
LoadResult parse_events_csv(std::istream& in, const LoadOptions& options = {});
LoadResult parse_events_jsonl(std::istream& in, const LoadOptions& options = {});

// Builds a stream from unsorted timestamps, collapsing exact duplicates.
EventStream make_stream(std::string node_id, std::vector<Seconds> times);

BinnedSeries bin_uniform(const EventStream& stream, Seconds origin, Seconds width,
                         std::size_t count);

// Number of evaluation times between origin + span and window_end.
std::uint64_t sample_count(const BinningScheme& scheme, Seconds window_end);

SampleSet history_samples(const EventStream& target, const EventStream& source,
                          const BinningScheme& scheme, Seconds window_end);

// Digg mode: lagged bits of two aligned uniform series.
SampleSet lagged_samples(const BinnedSeries& target, const BinnedSeries& source, int k, int l);

EventStream subsample(const EventStream& stream, double keep_probability, std::uint64_t seed);

// "90", "1.5s", "10min", "2h", "3day" -> seconds.
Seconds parse_duration(const std::string& text);

}  // namespace tenet
