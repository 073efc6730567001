// report.hpp -- check rows, report container, deterministic formatting helpers

#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace trinity {

struct CheckRow {
    std::string name;   // what was checked
    std::string anchor; // external cross-reference tag carried into reports
    double defect{0.0};
    double tolerance{0.0};
    bool pass{false};
    std::string note; // skip reason or extra context; empty for plain rows
};

struct Report {
    std::string title;
    std::vector<CheckRow> rows;

    CheckRow& add(std::string name, std::string anchor, double defect, double tolerance) {
        CheckRow row;
        row.name = std::move(name);
        row.anchor = std::move(anchor);
        row.defect = defect;
        row.tolerance = tolerance;
        row.pass = defect <= tolerance;
        rows.push_back(std::move(row));
        return rows.back();
    }

    // skipped checks stay visible instead of silently disappearing
    CheckRow& add_skip(std::string name, std::string anchor, std::string reason) {
        CheckRow row;
        row.name = std::move(name);
        row.anchor = std::move(anchor);
        row.pass = true;
        row.note = "skipped: " + std::move(reason);
        rows.push_back(std::move(row));
        return rows.back();
    }

    void append(const Report& other) {
        rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    }

    bool all_pass() const {
        for (const auto& r : rows)
            if (!r.pass) return false;
        return true;
    }

    std::size_t failures() const {
        std::size_t n = 0;
        for (const auto& r : rows)
            if (!r.pass) ++n;
        return n;
    }
};

// round-trippable, locale-independent float formatting for byte-stable reports
inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string report_to_csv(const Report& rep) {
    std::string out = "name,anchor,defect,tolerance,pass,note\n";
    for (const auto& r : rep.rows) {
        out += csv_field(r.name) + ',' + csv_field(r.anchor) + ',' + format_double(r.defect) +
               ',' + format_double(r.tolerance) + ',' + (r.pass ? "true" : "false") + ',' +
               csv_field(r.note) + '\n';
    }
    return out;
}

// ---- scenario tables -------------------------------------------------------------
// plottable rows for scenario runs; pass direction depends on the quantity (defects
// pass below tolerance, fidelities pass above threshold), so the caller decides

struct ScenarioRow {
    std::string scenario;
    std::string parameter;
    std::string quantity;
    double value{0.0};
    double tolerance{0.0};
    bool pass{false};
};

struct ScenarioReport {
    std::string scenario;
    std::vector<ScenarioRow> rows;

    ScenarioRow& add(std::string parameter, std::string quantity, double value, double tolerance,
                     bool pass) {
        ScenarioRow row;
        row.scenario = scenario;
        row.parameter = std::move(parameter);
        row.quantity = std::move(quantity);
        row.value = value;
        row.tolerance = tolerance;
        row.pass = pass;
        rows.push_back(std::move(row));
        return rows.back();
    }

    void append(const ScenarioReport& other) {
        rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    }

    bool all_pass() const {
        for (const auto& r : rows)
            if (!r.pass) return false;
        return true;
    }
};

inline std::string scenario_to_csv(const ScenarioReport& rep) {
    std::string out = "scenario,parameter,quantity,value,tolerance,pass\n";
    for (const auto& r : rep.rows) {
        out += csv_field(r.scenario) + ',' + csv_field(r.parameter) + ',' +
               csv_field(r.quantity) + ',' + format_double(r.value) + ',' +
               format_double(r.tolerance) + ',' + (r.pass ? "true" : "false") + '\n';
    }
    return out;
}

// ---- misc plumbing -------------------------------------------------------------

inline std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline unsigned thread_budget() {
    if (const char* env = std::getenv("TRINITY_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// index-sliced parallel map; each worker touches disjoint indices, so results land
// in preassigned slots and ordering stays deterministic; a worker exception is
// re-thrown after the join, picking the lowest failing index so the thread budget
// cannot change which error surfaces
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const unsigned workers = std::min<std::size_t>(thread_budget(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::size_t> error_at(workers, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) {
                try {
                    fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                    error_at[w] = i;
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    std::exception_ptr first;
    std::size_t at = n;
    for (unsigned w = 0; w < workers; ++w)
        if (errors[w] && error_at[w] < at) {
            at = error_at[w];
            first = errors[w];
        }
    if (first) std::rethrow_exception(first);
}

} // namespace trinity
