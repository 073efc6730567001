// trinity_main.cpp -- command-line front end: verify, scenario, clock-info

#include "trinity/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

namespace {

using namespace trinity;

constexpr const char* kTool = "trinity 0.1.0";

std::string hex_hash(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string output_path(const RunConfig& cfg, const char* key, const std::string& dflt) {
    if (cfg.raw.contains("output") && cfg.raw.at("output").contains(key)) {
        const Json& p = cfg.raw.at("output").at(key);
        if (!p.is_string()) throw ConfigError(std::string("output.") + key + ": expected a string");
        return p.get<std::string>();
    }
    return dflt;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write output file: " + path);
    out << body;
}

Json rows_to_json(const Report& rep) {
    Json rows = Json::array();
    for (const CheckRow& r : rep.rows)
        rows.push_back(Json{{"name", r.name},
                            {"anchor", r.anchor},
                            {"defect", r.defect},
                            {"tolerance", r.tolerance},
                            {"pass", r.pass},
                            {"note", r.note}});
    return rows;
}

Json rows_to_json(const ScenarioReport& rep) {
    Json rows = Json::array();
    for (const ScenarioRow& r : rep.rows)
        rows.push_back(Json{{"parameter", r.parameter},
                            {"quantity", r.quantity},
                            {"value", r.value},
                            {"tolerance", r.tolerance},
                            {"pass", r.pass}});
    return rows;
}

void print_summary(const Report& rep) {
    std::size_t passed = 0;
    for (const CheckRow& r : rep.rows) passed += r.pass ? 1 : 0;
    std::cout << rep.title << ": " << passed << "/" << rep.rows.size() << " checks passed\n";
    for (const CheckRow& r : rep.rows)
        if (!r.pass)
            std::cout << "  FAIL " << r.name << "  defect " << format_double(r.defect)
                      << " > tolerance " << format_double(r.tolerance) << "\n";
}

int cmd_verify(const std::string& cfg_path) {
    const RunConfig cfg = load_config(cfg_path);
    const std::string report_path = output_path(cfg, "report", "trinity-report.json");
    const std::string csv_path = output_path(cfg, "csv", "trinity-report.csv");
    const std::string timings_path = output_path(cfg, "timings", "trinity-timings.json");

    Report rep;
    std::vector<std::pair<std::string, double>> timings;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        VerifyRun run = full_report(cfg);
        rep = std::move(run.report);
        timings = std::move(run.timings_ms);
    } catch (const DegenerateConditioning& e) {
        rep.title = "trinity-verify";
        CheckRow& row = rep.add("degenerate-conditioning", "Eq. AwhenT", 1.0, 0.0);
        row.note = "stage " + std::to_string(e.stage) + ": " + e.what();
    }
    const double total_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    Json doc;
    doc["tool"] = kTool;
    doc["title"] = rep.title;
    doc["config_hash"] = hex_hash(cfg.hash);
    doc["seed"] = cfg.seed;
    doc["timings_file"] = timings_path;
    doc["rows"] = rows_to_json(rep);
    write_file(report_path, doc.dump(2) + "\n");
    write_file(csv_path, report_to_csv(rep));

    Json tm;
    tm["total_ms"] = total_ms;
    tm["suites"] = Json::object();
    for (const auto& [name, ms] : timings) tm["suites"][name] = ms;
    write_file(timings_path, tm.dump(2) + "\n");

    print_summary(rep);
    std::cout << "report: " << report_path << "\n";
    return rep.all_pass() ? 0 : 1;
}

int cmd_scenario(const std::string& name, const std::string& cfg_path) {
    const RunConfig cfg = load_config(cfg_path);
    const std::string report_path = output_path(cfg, "report", "trinity-scenario.json");
    const std::string csv_path = output_path(cfg, "csv", "trinity-scenario.csv");

    ScenarioReport rep;
    std::string csv;
    try {
        if (name == "propagator") {
            PropagatorScenario run = scenario_propagator(cfg);
            rep = std::move(run.report);
            csv = propagator_table_to_csv(run.table);
        } else if (name == "frame-change") {
            rep = scenario_frame_change(cfg);
            csv = scenario_to_csv(rep);
        } else if (name == "nonlocality") {
            rep = scenario_nonlocality(cfg);
            csv = scenario_to_csv(rep);
        } else {
            throw ConfigError("unknown scenario: " + name +
                              " (expected propagator, frame-change or nonlocality)");
        }
    } catch (const DegenerateConditioning& e) {
        rep.scenario = name;
        rep.rows.clear();
        rep.add("stage=" + std::to_string(e.stage), "degenerate-conditioning", 1.0, 0.0, false);
        csv = scenario_to_csv(rep);
        std::cout << "degenerate conditioning: " << e.what() << "\n";
    }

    Json doc;
    doc["tool"] = kTool;
    doc["scenario"] = rep.scenario;
    doc["config_hash"] = hex_hash(cfg.hash);
    doc["seed"] = cfg.seed;
    doc["rows"] = rows_to_json(rep);
    write_file(report_path, doc.dump(2) + "\n");
    write_file(csv_path, csv);

    std::size_t passed = 0;
    for (const ScenarioRow& r : rep.rows) passed += r.pass ? 1 : 0;
    std::cout << rep.scenario << ": " << passed << "/" << rep.rows.size() << " rows passed\n";
    std::cout << "table: " << csv_path << "\n";
    return rep.all_pass() ? 0 : 1;
}

int cmd_clock_info(const std::string& cfg_path) {
    const RunConfig cfg = load_config(cfg_path);
    const ClockSystem c = clock_from_config(cfg);
    for (const std::string& line : clock_info_lines(c)) std::cout << line << "\n";

    Report rep = clock_report(c);
    scale_tolerances(rep, cfg.tol_scale);
    for (const CheckRow& r : rep.rows) {
        if (!r.note.empty()) {
            std::cout << r.name << ": " << r.note << "\n";
            continue;
        }
        std::cout << r.name << " = " << format_double(r.defect) << "  (tolerance "
                  << format_double(r.tolerance) << ", " << (r.pass ? "ok" : "FAIL") << ")\n";
    }

    if (cfg.raw.contains("output") && cfg.raw.at("output").contains("report")) {
        Json doc;
        doc["tool"] = kTool;
        doc["title"] = rep.title;
        doc["config_hash"] = hex_hash(cfg.hash);
        doc["rows"] = rows_to_json(rep);
        write_file(output_path(cfg, "report", "trinity-clock.json"), doc.dump(2) + "\n");
    }
    return rep.all_pass() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"defect reports for relational-clock quantum dynamics"};
    app.set_version_flag("--version", std::string(kTool));
    app.require_subcommand(1);

    std::string verify_cfg, scen_name, scen_cfg, info_cfg;
    CLI::App* verify = app.add_subcommand("verify", "run the full defect-report suite");
    verify->add_option("config", verify_cfg, "JSON run configuration")->required();
    CLI::App* scen = app.add_subcommand("scenario", "run a named scenario");
    scen->add_option("name", scen_name, "propagator | frame-change | nonlocality")->required();
    scen->add_option("config", scen_cfg, "JSON run configuration")->required();
    CLI::App* info = app.add_subcommand("clock-info", "print clock diagnostics");
    info->add_option("config", info_cfg, "JSON run configuration")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) return cmd_verify(verify_cfg);
        if (scen->parsed()) return cmd_scenario(scen_name, scen_cfg);
        return cmd_clock_info(info_cfg);
    } catch (const trinity::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
