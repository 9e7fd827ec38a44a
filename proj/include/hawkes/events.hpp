#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hawkes {

/// A multivariate point-process realization: one strictly increasing
/// timestamp sequence per subject, all within [0, horizon].
struct EventStream {
    int dim = 0;
    double horizon = 0.0;
    std::vector<std::vector<double>> events;

    /// Validates all invariants and returns the stream; throws
    /// std::invalid_argument on violation.
    static EventStream create(int dim, double horizon,
                              std::vector<std::vector<double>> events);

    std::size_t total_events() const;

    /// Translates every timestamp (and the horizon) by +c. Used by the
    /// shift-invariance checks; c must keep all timestamps nonnegative.
    EventStream shifted(double c) const;
};

/// Sliding-window scheme: windows [origin + k*stride, origin + k*stride + length).
struct WindowSpec {
    double length = 0.0;
    double stride = 0.0;
    double origin = 0.0;

    void validate() const; // throws std::invalid_argument
};

struct PriceSample {
    double time;
    double price;
};

/// Per-instrument price paths with nondecreasing timestamps and positive prices.
struct PriceSeries {
    std::vector<std::vector<PriceSample>> samples;

    int dim() const { return static_cast<int>(samples.size()); }
    void validate() const;
};

/// Cuts the stream into overlapping windows. Window k covers the half-open
/// interval [start, start + length) with start = origin + k*stride, for every
/// k with start + length <= horizon. Events are re-based to local time 0 and
/// each output has horizon = length. An event may land in several windows.
std::vector<EventStream> slice_windows(const EventStream& stream,
                                       const WindowSpec& spec);

/// Threshold-crossing event extraction: per instrument, an event fires at the
/// first sample whose relative move from the reference price reaches
/// `threshold` (two-sided); the reference then resets to that sample's price.
/// The horizon is the last timestamp across all instruments.
EventStream prices_to_events(const PriceSeries& series, double threshold);

} // namespace hawkes
