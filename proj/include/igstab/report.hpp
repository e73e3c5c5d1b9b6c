#pragma once

// Config-driven analysis runs with a deterministic JSON report.
//
// Config files are flat "key = value" lines; '#' starts a comment, blank
// lines are skipped, unknown or repeated keys are errors.  Every omitted key
// takes a documented default, most of which adapt to the chosen catalog
// entry; the effective values are echoed into the report so a report is
// reproducible from its own config block.  Identical configs produce byte
// identical reports.
//
// Keys:
//   entry            catalog entry name (default "plane"); or
//   field_csv        path to a sampled field written by write_field_csv
//   n_eta, n_tau     sampling resolution for catalog entries (>= 16)
//   analyses         comma list out of area, variation, flow, ruling,
//                    stability, hardy, exponents, probe
//   seed             bump placement seed
//   bumps            number of random test bumps (0..200)
//   fd_check         true/false, difference-quotient check per bump
//   area_eta_min, area_eta_max, area_tau_min, area_tau_max
//                    area window (default: middle half of the rectangle)
//   eta0             flow base time
//   flow_t_min, flow_t_max, flow_n_t, flow_zeta_min, flow_zeta_max,
//   flow_n_zeta, ode_tol
//                    characteristic flow window and tolerance
//   stab_t_min, stab_t_max, stab_n_t, stab_zeta_min, stab_zeta_max,
//   stab_n_zeta      stability form window (zeta defaults to the flow range)
//   hardy_A, hardy_B, hardy_L, hardy_n
//   exp_p, exp_q
//   probe_exponent, probe_kappa, probe_decades, probe_eta_lo, probe_eta_hi
//   out_json         default output path for the CLI
//
// Each analysis runs independently; a failure is recorded as
// {"stage": name, "error": message} without stopping the others, and the
// top-level "errors" counts them.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace igstab {

struct ReportConfig {
    std::string entry = "plane";
    bool entry_given = false;
    std::string field_csv;
    int n_eta = 241;
    int n_tau = 241;
    std::vector<std::string> analyses = {"area", "variation", "flow", "ruling", "stability"};
    std::uint64_t seed = 2026;
    int bumps = 5;
    bool fd_check = true;
    double area_eta_min, area_eta_max, area_tau_min, area_tau_max;  // NaN = default
    double eta0 = 0.0;
    double flow_t_min, flow_t_max;  // NaN = per-entry default
    int flow_n_t = 201;
    double flow_zeta_min, flow_zeta_max;  // NaN = per-entry default
    int flow_n_zeta = 41;
    double ode_tol = 1e-9;
    double stab_t_min, stab_t_max;  // NaN = per-entry default
    int stab_n_t = 161;
    double stab_zeta_min, stab_zeta_max;  // NaN = flow range
    int stab_n_zeta = 33;
    double hardy_A = 2.0, hardy_B = 0.0, hardy_L = 20.0;
    int hardy_n = 2000;
    double exp_p = 10.0, exp_q = 5.0;
    double probe_exponent = 4.0, probe_kappa = 0.0;
    int probe_decades = 5;
    double probe_eta_lo, probe_eta_hi;  // NaN = middle half
    std::string out_json = "report.json";

    ReportConfig();
};

ReportConfig parse_config_text(const std::string& text);
ReportConfig parse_config_file(const std::string& path);

// Runs the configured analyses.  Throws only for config-level failures (bad
// entry name, unreadable field file); per-stage failures land in the report.
nlohmann::ordered_json run_report(const ReportConfig& cfg);

void write_report(const nlohmann::ordered_json& report, const std::string& path);

// Extracts one plottable series from a report into a CSV file:
//   "ruling"   zeta,a,b,da,db            from the ruling stage
//   "witness"  t,zeta,value              from the stability stage
//   "hardy"    t,witness                 from the hardy stage
// Unknown names raise std::invalid_argument listing the options; a missing
// or failed stage raises std::runtime_error.
void emit_plot_data(const nlohmann::ordered_json& report, const std::string& series,
                    const std::string& path);

}  // namespace igstab
