#include "hawkes/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hawkes {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& what, std::size_t line) {
    throw std::runtime_error(what + " at line " + std::to_string(line));
}

double parse_double(const std::string& tok, std::size_t line) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last) fail("malformed number '" + tok + "'", line);
    return v;
}

long parse_long(const std::string& tok, std::size_t line) {
    long v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
        fail("malformed integer '" + tok + "'", line);
    return v;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

struct Builder {
    std::vector<std::vector<double>> events;
    int declared_dim = -1;
    double declared_horizon = -1.0;
    double max_time = 0.0;
    std::size_t rows = 0;

    void add(long subject, double time, std::size_t line) {
        if (subject < 0) fail("negative subject id", line);
        if (declared_dim >= 0 && subject >= declared_dim)
            fail("subject id exceeds declared dim", line);
        if (!std::isfinite(time)) fail("non-finite timestamp", line);
        if (time < 0.0) fail("negative timestamp", line);
        if (events.size() <= static_cast<std::size_t>(subject))
            events.resize(subject + 1);
        auto& z = events[subject];
        if (!z.empty() && time <= z.back()) fail("non-increasing timestamps", line);
        z.push_back(time);
        max_time = std::max(max_time, time);
        ++rows;
    }

    EventStream finish() {
        int dim = declared_dim >= 0 ? declared_dim : static_cast<int>(events.size());
        if (dim == 0)
            throw std::runtime_error("empty input and no declared dim");
        events.resize(dim);
        double horizon = declared_horizon >= 0.0 ? declared_horizon : max_time;
        if (declared_horizon >= 0.0 && max_time > declared_horizon)
            throw std::runtime_error("timestamp beyond declared horizon");
        return EventStream::create(dim, horizon, std::move(events));
    }
};

// `# dim=<m> horizon=<T>` (either key optional, any order)
void parse_meta_comment(const std::string& line, Builder& b, std::size_t lineno) {
    std::istringstream iss(line.substr(1));
    std::string tok;
    while (iss >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (key == "dim") b.declared_dim = static_cast<int>(parse_long(val, lineno));
        else if (key == "horizon") b.declared_horizon = parse_double(val, lineno);
    }
}

EventStream load_events_csv(std::istream& in) {
    Builder b;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            parse_meta_comment(t, b, lineno);
            continue;
        }
        if (!header_seen) {
            if (t != "subject,time") fail("expected header 'subject,time'", lineno);
            header_seen = true;
            continue;
        }
        auto comma = t.find(',');
        if (comma == std::string::npos) fail("malformed row", lineno);
        const long subject = parse_long(trim(t.substr(0, comma)), lineno);
        const double time = parse_double(trim(t.substr(comma + 1)), lineno);
        b.add(subject, time, lineno);
    }
    return b.finish();
}

EventStream load_events_jsonl(std::istream& in) {
    Builder b;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        json j;
        try {
            j = json::parse(t);
        } catch (const json::exception& e) {
            fail(std::string("malformed JSON (") + e.what() + ")", lineno);
        }
        if (j.contains("meta")) {
            const auto& meta = j["meta"];
            if (meta.contains("dim")) b.declared_dim = meta["dim"].get<int>();
            if (meta.contains("horizon")) b.declared_horizon = meta["horizon"].get<double>();
            continue;
        }
        if (!j.contains("subject") || !j.contains("time"))
            fail("object missing 'subject' or 'time'", lineno);
        b.add(j["subject"].get<long>(), j["time"].get<double>(), lineno);
    }
    return b.finish();
}

// Events merged across subjects in global time order (ties by subject id),
// so each subject's rows stay increasing.
std::vector<std::pair<int, double>> merged_rows(const EventStream& s) {
    std::vector<std::pair<int, double>> rows;
    rows.reserve(s.total_events());
    for (int i = 0; i < s.dim; ++i)
        for (double t : s.events[i]) rows.emplace_back(i, t);
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return a.first < b.first;
    });
    return rows;
}

std::string fmt_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

} // namespace

EventFormat format_from_string(const std::string& name) {
    if (name == "csv") return EventFormat::csv;
    if (name == "jsonl") return EventFormat::jsonl;
    throw std::invalid_argument("unknown event format '" + name + "'");
}

EventStream load_events(const std::string& path, EventFormat format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return format == EventFormat::csv ? load_events_csv(in)
                                          : load_events_jsonl(in);
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void save_events(const EventStream& stream, const std::string& path,
                 EventFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    const auto rows = merged_rows(stream);
    if (format == EventFormat::csv) {
        out << "# dim=" << stream.dim << " horizon=" << fmt_double(stream.horizon)
            << "\n";
        out << "subject,time\n";
        for (const auto& [subject, time] : rows)
            out << subject << ',' << fmt_double(time) << '\n';
    } else {
        json meta = {{"meta", {{"dim", stream.dim}, {"horizon", stream.horizon}}}};
        out << meta.dump() << '\n';
        for (const auto& [subject, time] : rows) {
            json j = {{"subject", subject}, {"time", time}};
            out << j.dump() << '\n';
        }
    }
}

PriceSeries load_prices_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    PriceSeries series;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!header_seen) {
            if (t != "instrument,time,price")
                fail("expected header 'instrument,time,price'", lineno);
            header_seen = true;
            continue;
        }
        auto c1 = t.find(',');
        auto c2 = t.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            fail("malformed row", lineno);
        const long inst = parse_long(trim(t.substr(0, c1)), lineno);
        const double time = parse_double(trim(t.substr(c1 + 1, c2 - c1 - 1)), lineno);
        const double price = parse_double(trim(t.substr(c2 + 1)), lineno);
        if (inst < 0) fail("negative instrument id", lineno);
        if (!(price > 0.0)) fail("nonpositive price", lineno);
        if (series.samples.size() <= static_cast<std::size_t>(inst))
            series.samples.resize(inst + 1);
        auto& path_i = series.samples[inst];
        if (!path_i.empty() && time < path_i.back().time)
            fail("decreasing timestamps", lineno);
        path_i.push_back({time, price});
    }
    series.validate();
    return series;
}

} // namespace hawkes
