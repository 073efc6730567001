// config.hpp -- JSON run configuration: named presets, field-by-field overrides,
// and assembly of models and scenario parameters

#pragma once

#include "trinity/framechange.hpp"
#include "trinity/probability.hpp"

#include <json.hpp>

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace trinity {

using Json = nlohmann::json;

// configuration problems get their own type so the front end can map every one of
// them to the config-error exit code
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// ---- presets ---------------------------------------------------------------------

namespace detail {

inline Json matrix_json(std::initializer_list<std::initializer_list<double>> rows) {
    Json out = Json::array();
    for (const auto& row : rows) {
        Json r = Json::array();
        for (const double x : row) r.push_back(x);
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace detail

// named starting configurations; user fields override preset fields key-by-key
inline Json preset_config(std::string name) {
    for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    Json j;
    if (name == "m1") {
        j["clock"] = {{"regime", "compact"},
                      {"energies", Json::array({0.0, 1.0, 2.0, 3.0})},
                      {"t_max", 2.0 * M_PI}};
        j["system"] = {{"hamiltonian", detail::matrix_json({{-1.0, 0.0}, {0.0, -2.0}})}};
        j["observables"] = Json::array(
            {{{"name", "level-0-projector"}, {"matrix", detail::matrix_json({{1.0, 0.0}, {0.0, 0.0}})}}});
    } else if (name == "m2") {
        j["clock"] = {{"regime", "compact"},
                      {"energies", Json::array({-2.0, -1.0, 0.0, 1.0, 2.0})},
                      {"t_max", 2.0 * M_PI}};
        j["system"] = {{"hamiltonian", detail::matrix_json({{0.0, 1.0}, {1.0, 0.0}})}};
        j["observables"] = Json::array(
            {{{"name", "flip"}, {"matrix", detail::matrix_json({{0.0, 1.0}, {1.0, 0.0}})}}});
        j["scenario"] = {{"points", 50}, {"q", 0}, {"q2", 1}, {"tau", 0.0}};
    } else if (name == "f1") {
        j["clock"] = {{"regime", "compact"},
                      {"energies", Json::array({0.0, 1.0, 2.0, 3.0})},
                      {"t_max", 2.0 * M_PI}};
        j["clock_b"] = {{"regime", "compact"},
                        {"energies", Json::array({-4.0, -3.0, -2.0, -1.0, 0.0})},
                        {"t_max", 2.0 * M_PI}};
        j["system"] = {{"hamiltonian", detail::matrix_json({{0.0, 1.0}, {1.0, 0.0}})}};
        j["scenario"] = {{"states", 3}, {"points", 7}, {"tau_a", 0.3}, {"seed", 42}};
    } else if (name == "n1") {
        j["scenario"] = {{"sigma", 0.12},          {"delta", 2.4},
                         {"dim", 64},              {"grid_step", 1.0},
                         {"tau_b", 0.0},           {"fidelity_threshold", 0.999}};
    } else if (name == "ideal-clock") {
        j["clock"] = {{"regime", "continuum"}, {"grid", {{"count", 256}, {"step", 0.1}}}};
    } else {
        throw ConfigError("unknown preset: " + name);
    }
    return j;
}

// recursive override: objects merge key-by-key, everything else is replaced
inline Json merged_over(Json base, const Json& user) {
    if (!base.is_object() || !user.is_object()) return user;
    for (const auto& [key, val] : user.items())
        base[key] = base.contains(key) ? merged_over(base.at(key), val) : val;
    return base;
}

// ---- loading ----------------------------------------------------------------------

struct RunConfig {
    Json raw;              // preset-merged configuration
    std::uint64_t hash{0}; // FNV-1a of the config file bytes, pre-merge
    std::uint64_t seed{12345};
    double tol_scale{1.0};
};

inline RunConfig parse_config_text(const std::string& text) {
    Json user;
    try {
        user = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    if (!user.is_object()) throw ConfigError("config root must be a JSON object");

    RunConfig cfg;
    cfg.hash = fnv1a(text);
    cfg.raw = std::move(user);
    try {
        if (cfg.raw.contains("preset")) {
            if (!cfg.raw.at("preset").is_string())
                throw ConfigError("preset: expected a string");
            cfg.raw = merged_over(preset_config(cfg.raw.at("preset").get<std::string>()), cfg.raw);
        }
        if (cfg.raw.contains("seed")) cfg.seed = cfg.raw.at("seed").get<std::uint64_t>();
        if (cfg.raw.contains("tolerances"))
            cfg.tol_scale = cfg.raw.at("tolerances").value("scale", 1.0);
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("invalid config field: ") + e.what());
    }
    if (!(cfg.tol_scale >= 0.0)) throw ConfigError("tolerances.scale must be >= 0");
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

// ---- field extraction ----------------------------------------------------------------

namespace detail {

inline double json_number(const Json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    return j.get<double>();
}

inline Complex json_entry(const Json& e, const std::string& where) {
    if (e.is_number()) return Complex(e.get<double>(), 0.0);
    if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
        return Complex(e[0].get<double>(), e[1].get<double>());
    throw ConfigError(where + ": entries must be numbers or [re, im] pairs");
}

} // namespace detail

inline Matrix matrix_from_json(const Json& j, const std::string& where) {
    if (!j.is_array() || j.empty())
        throw ConfigError(where + ": expected a non-empty array of rows");
    const Index rows = static_cast<Index>(j.size());
    if (!j[0].is_array() || j[0].empty())
        throw ConfigError(where + ": rows must be non-empty arrays");
    const Index cols = static_cast<Index>(j[0].size());
    Matrix out(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        const Json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Index>(row.size()) != cols)
            throw ConfigError(where + ": ragged matrix rows");
        for (Index c = 0; c < cols; ++c)
            out(r, c) = detail::json_entry(row[static_cast<std::size_t>(c)], where);
    }
    return out;
}

inline Vector vector_from_json(const Json& j, const std::string& where) {
    if (!j.is_array() || j.empty())
        throw ConfigError(where + ": expected a non-empty array");
    Vector out(static_cast<Index>(j.size()));
    for (Index i = 0; i < out.size(); ++i)
        out(i) = detail::json_entry(j[static_cast<std::size_t>(i)], where);
    return out;
}

inline ClockSpec clock_spec_from_json(const Json& j, const std::string& who) {
    if (!j.is_object()) throw ConfigError(who + ": expected an object");
    ClockSpec spec;
    const std::string regime = j.value("regime", std::string("compact"));
    if (regime == "compact")
        spec.regime = ClockRegime::Compact;
    else if (regime == "continuum")
        spec.regime = ClockRegime::ContinuumApprox;
    else
        throw ConfigError(who + ".regime: must be \"compact\" or \"continuum\"");

    if (j.contains("energies")) {
        for (const auto& e : j.at("energies"))
            spec.energies.push_back(detail::json_number(e, who + ".energies"));
    } else if (j.contains("grid")) {
        const Json& g = j.at("grid");
        const double count = detail::json_number(g.value("count", Json()), who + ".grid.count");
        const double step = detail::json_number(g.value("step", Json()), who + ".grid.step");
        if (count < 1.0 || count != std::floor(count))
            throw ConfigError(who + ".grid.count: expected a positive integer");
        if (!(step > 0.0)) throw ConfigError(who + ".grid.step: must be > 0");
        const Index n = static_cast<Index>(count);
        for (Index i = 0; i < n; ++i)
            spec.energies.push_back((static_cast<double>(i) - static_cast<double>(n / 2)) * step);
    } else {
        throw ConfigError(who + ": needs an energies list or a grid spec");
    }
    if (spec.energies.size() > 4096) throw ConfigError(who + ": energy grid exceeds the size cap");

    if (j.contains("phases"))
        for (const auto& p : j.at("phases"))
            spec.phases.push_back(detail::json_number(p, who + ".phases"));
    if (j.contains("t_max")) spec.t_max = detail::json_number(j.at("t_max"), who + ".t_max");
    if (j.contains("window")) spec.window = detail::json_number(j.at("window"), who + ".window");
    return spec;
}

// ---- model assembly -----------------------------------------------------------------

inline ClockSystem clock_from_config(const RunConfig& cfg, const std::string& key = "clock") {
    if (!cfg.raw.contains(key)) throw ConfigError("config: \"" + key + "\" section missing");
    try {
        return build_clock(clock_spec_from_json(cfg.raw.at(key), key));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

inline Matrix system_hamiltonian_from_config(const RunConfig& cfg) {
    if (!cfg.raw.contains("system") || !cfg.raw.at("system").contains("hamiltonian"))
        throw ConfigError("config: \"system.hamiltonian\" missing");
    const Matrix h = matrix_from_json(cfg.raw.at("system").at("hamiltonian"), "system.hamiltonian");
    if (h.rows() != h.cols()) throw ConfigError("system.hamiltonian: must be square");
    if (!is_hermitian(h)) throw ConfigError("system.hamiltonian: must be Hermitian");
    return h;
}

inline ConstraintModel model_from_config(const RunConfig& cfg) {
    try {
        return build_model(clock_from_config(cfg), system_hamiltonian_from_config(cfg));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

inline ThreeFrameModel three_frame_from_config(const RunConfig& cfg) {
    try {
        return build_three_frame_model(clock_from_config(cfg, "clock"),
                                       clock_from_config(cfg, "clock_b"),
                                       system_hamiltonian_from_config(cfg));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

inline std::vector<NamedOperator> observables_from_config(const RunConfig& cfg, Index dim_s) {
    std::vector<NamedOperator> out;
    if (!cfg.raw.contains("observables")) return out;
    const Json& list = cfg.raw.at("observables");
    if (!list.is_array()) throw ConfigError("observables: expected an array");
    for (const auto& o : list) {
        if (!o.is_object() || !o.contains("name") || !o.contains("matrix"))
            throw ConfigError("observables: each entry needs a name and a matrix");
        const std::string name = o.at("name").get<std::string>();
        const Matrix f = matrix_from_json(o.at("matrix"), "observables." + name);
        if (f.rows() != dim_s || f.cols() != dim_s)
            throw ConfigError("observables." + name + ": dimension mismatch with the system");
        if (!is_hermitian(f)) throw ConfigError("observables." + name + ": must be Hermitian");
        out.emplace_back(name, f);
    }
    return out;
}

// ---- scenario parameters --------------------------------------------------------------

inline const Json& scenario_object(const RunConfig& cfg) {
    if (!cfg.raw.contains("scenario") || !cfg.raw.at("scenario").is_object())
        throw ConfigError("config: \"scenario\" section missing");
    return cfg.raw.at("scenario");
}

inline double scenario_number(const Json& s, const std::string& key, const std::string& scen) {
    if (!s.contains(key))
        throw ConfigError(scen + " scenario: missing parameter \"" + key + "\"");
    return detail::json_number(s.at(key), scen + " scenario." + key);
}

inline double scenario_number_or(const Json& s, const std::string& key, double dflt) {
    return s.contains(key) ? detail::json_number(s.at(key), "scenario." + key) : dflt;
}

inline Index scenario_index(const Json& s, const std::string& key, const std::string& scen) {
    const double v = scenario_number(s, key, scen);
    if (v != std::floor(v)) throw ConfigError(scen + " scenario." + key + ": expected an integer");
    return static_cast<Index>(v);
}

inline Index scenario_index_or(const Json& s, const std::string& key, Index dflt) {
    if (!s.contains(key)) return dflt;
    const double v = detail::json_number(s.at(key), "scenario." + key);
    if (v != std::floor(v)) throw ConfigError("scenario." + key + ": expected an integer");
    return static_cast<Index>(v);
}

inline NonlocalityConfig nonlocality_from_config(const RunConfig& cfg) {
    const Json& s = scenario_object(cfg);
    NonlocalityConfig n;
    n.sigma = scenario_number(s, "sigma", "nonlocality");
    n.delta = scenario_number_or(s, "delta", n.delta);
    if (s.contains("dim")) n.dim_a = n.dim_b = scenario_index(s, "dim", "nonlocality");
    n.dim_a = scenario_index_or(s, "dim_a", n.dim_a);
    n.dim_b = scenario_index_or(s, "dim_b", n.dim_b);
    n.grid_step = scenario_number_or(s, "grid_step", n.grid_step);
    n.window = scenario_number_or(s, "window", n.window);
    n.tau_b = scenario_number_or(s, "tau_b", n.tau_b);
    n.fidelity_threshold = scenario_number_or(s, "fidelity_threshold", n.fidelity_threshold);
    n.convolution_tol = scenario_number_or(s, "convolution_tol", n.convolution_tol);
    n.truncation_limit = scenario_number_or(s, "truncation_limit", n.truncation_limit);
    if (cfg.raw.contains("system") && cfg.raw.at("system").contains("hamiltonian"))
        n.h_s = system_hamiltonian_from_config(cfg);
    if (cfg.raw.contains("system") && cfg.raw.at("system").contains("state"))
        n.psi_s = vector_from_json(cfg.raw.at("system").at("state"), "system.state");
    return n;
}

inline std::vector<double> nonlocality_deltas(const RunConfig& cfg) {
    const Json& s = scenario_object(cfg);
    if (!s.contains("deltas")) return {nonlocality_from_config(cfg).delta};
    std::vector<double> out;
    for (const auto& d : s.at("deltas"))
        out.push_back(detail::json_number(d, "scenario.deltas"));
    if (out.empty()) throw ConfigError("scenario.deltas: empty sweep");
    return out;
}

} // namespace trinity
