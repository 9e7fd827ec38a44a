#include "hawkes/events.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hawkes {

EventStream EventStream::create(int dim, double horizon,
                                std::vector<std::vector<double>> events) {
    if (dim < 0) throw std::invalid_argument("dim must be nonnegative");
    if (static_cast<int>(events.size()) != dim)
        throw std::invalid_argument("dim does not match number of subject sequences");
    if (horizon < 0.0 || !std::isfinite(horizon))
        throw std::invalid_argument("horizon must be finite and nonnegative");
    for (int i = 0; i < dim; ++i) {
        double prev = -1.0;
        bool first = true;
        for (double t : events[i]) {
            if (!std::isfinite(t)) throw std::invalid_argument("non-finite timestamp");
            if (t < 0.0) throw std::invalid_argument("negative timestamp");
            if (t > horizon) throw std::invalid_argument("timestamp beyond horizon");
            if (!first && t <= prev)
                throw std::invalid_argument("non-increasing timestamps");
            prev = t;
            first = false;
        }
    }
    EventStream s;
    s.dim = dim;
    s.horizon = horizon;
    s.events = std::move(events);
    return s;
}

std::size_t EventStream::total_events() const {
    std::size_t n = 0;
    for (const auto& z : events) n += z.size();
    return n;
}

EventStream EventStream::shifted(double c) const {
    std::vector<std::vector<double>> ev = events;
    for (auto& z : ev)
        for (double& t : z) t += c;
    return EventStream::create(dim, horizon + c, std::move(ev));
}

void WindowSpec::validate() const {
    if (!(length > 0.0)) throw std::invalid_argument("window length must be positive");
    if (!(stride > 0.0)) throw std::invalid_argument("window stride must be positive");
    if (stride > length) throw std::invalid_argument("stride must not exceed length");
    if (origin < 0.0) throw std::invalid_argument("window origin must be nonnegative");
}

void PriceSeries::validate() const {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double prev = -1.0;
        for (const auto& s : samples[i]) {
            if (!(s.price > 0.0))
                throw std::invalid_argument("nonpositive price for instrument " +
                                            std::to_string(i));
            if (s.time < prev)
                throw std::invalid_argument("decreasing timestamps for instrument " +
                                            std::to_string(i));
            prev = s.time;
        }
    }
}

std::vector<EventStream> slice_windows(const EventStream& stream,
                                       const WindowSpec& spec) {
    spec.validate();
    if (spec.length > stream.horizon)
        throw std::invalid_argument("window longer than recording");

    std::vector<EventStream> out;
    for (int k = 0;; ++k) {
        const double start = spec.origin + k * spec.stride;
        if (start + spec.length > stream.horizon) break;
        std::vector<std::vector<double>> ev(stream.dim);
        for (int i = 0; i < stream.dim; ++i) {
            const auto& z = stream.events[i];
            auto lo = std::lower_bound(z.begin(), z.end(), start);
            auto hi = std::lower_bound(lo, z.end(), start + spec.length);
            ev[i].reserve(static_cast<std::size_t>(hi - lo));
            for (auto it = lo; it != hi; ++it) ev[i].push_back(*it - start);
        }
        out.push_back(EventStream::create(stream.dim, spec.length, std::move(ev)));
    }
    return out;
}

EventStream prices_to_events(const PriceSeries& series, double threshold) {
    if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
    series.validate();

    double horizon = 0.0;
    std::vector<std::vector<double>> ev(series.samples.size());
    for (std::size_t i = 0; i < series.samples.size(); ++i) {
        const auto& path = series.samples[i];
        if (path.empty()) continue;
        horizon = std::max(horizon, path.back().time);
        double ref = path.front().price;
        for (std::size_t k = 1; k < path.size(); ++k) {
            const auto& s = path[k];
            if (std::abs(s.price - ref) / ref >= threshold) {
                // Two samples can share a timestamp (nondecreasing series);
                // the reference still advances but only one event is emitted.
                if (ev[i].empty() || s.time > ev[i].back()) ev[i].push_back(s.time);
                ref = s.price;
            }
        }
    }
    return EventStream::create(static_cast<int>(series.samples.size()), horizon,
                               std::move(ev));
}

} // namespace hawkes
