#pragma once

#include "hawkes/events.hpp"

#include <string>

namespace hawkes {

enum class EventFormat { csv, jsonl };

EventFormat format_from_string(const std::string& name);

/// Loads an event stream.
///
/// CSV: header `subject,time`; optional comment `# dim=<m> horizon=<T>`;
/// rows may interleave subjects arbitrarily but each subject's rows must
/// appear in increasing time order.
/// JSONL: one `{"subject": i, "time": t}` object per line; an optional
/// first line `{"meta": {"dim": m, "horizon": T}}`.
///
/// A declared horizon/dim overrides inference from the data. Errors carry
/// the 1-based line number of the offending row.
EventStream load_events(const std::string& path, EventFormat format);

/// Writes a stream in a form load_events round-trips exactly: the meta
/// declaration first, then all events merged in global time order.
void save_events(const EventStream& stream, const std::string& path,
                 EventFormat format);

/// Price CSV with header `instrument,time,price`.
PriceSeries load_prices_csv(const std::string& path);

} // namespace hawkes
