// Command line driver: every subcommand runs one analysis from the shared
// config machinery, `report` runs whatever the config asks for.  Exit codes:
// 0 clean, 1 usage or config problems, 2 at least one analysis failed.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "igstab/report.hpp"

namespace {

using nlohmann::ordered_json;

std::string num(const ordered_json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return "n/a";
    return j[key].dump();
}

void print_stage(const ordered_json& st) {
    const std::string name = st.value("stage", "?");
    if (st.contains("error")) {
        std::cout << name << ": ERROR: " << st["error"].get<std::string>() << "\n";
        return;
    }
    if (name == "area") {
        std::cout << "area: value = " << num(st, "value")
                  << ", quadrature error estimate = " << num(st, "error_estimate") << "\n";
    } else if (name == "variation") {
        std::cout << "variation: " << st["bumps"].size() << " bumps, max |first| = "
                  << num(st, "max_abs_first") << ", min second = " << num(st, "min_second") << "\n";
    } else if (name == "flow") {
        std::cout << "flow: " << num(st, "n_t") << " x " << num(st, "n_zeta")
                  << " samples, clipped trajectories = " << num(st, "clipped_trajectories")
                  << ", conjugation residuals = " << num(st, "conjugation_res_t") << ", "
                  << num(st, "conjugation_res_zeta") << "\n";
    } else if (name == "ruling") {
        std::cout << "ruling: residual = " << num(st, "residual")
                  << ", lift straightness = " << num(st, "straightness")
                  << ", vandermonde gaps a/b/c = " << num(st, "vandermonde_max_a_gap") << "/"
                  << num(st, "vandermonde_max_b_gap") << "/" << num(st, "vandermonde_max_c_gap")
                  << "\n";
    } else if (name == "stability") {
        std::cout << "stability: lambda_min = " << num(st, "lambda_min") << ", verdict = "
                  << st.value("verdict", "?") << ", pair discriminant ok = " << num(st, "pairs_ok")
                  << ", pointwise ok = " << num(st, "pointwise_ok") << "\n";
        if (st.contains("note")) std::cout << "  note: " << st["note"].get<std::string>() << "\n";
    } else if (name == "hardy") {
        std::cout << "hardy: window minimum = " << num(st, "rayleigh")
                  << ", line rigidity threshold = " << num(st, "rigidity_rhs") << "\n";
    } else if (name == "exponents") {
        std::cout << "exponents: s = " << num(st["set"], "s") << ", beta = " << num(st["set"], "beta")
                  << ", conditions = " << st["conditions"].dump() << ", min_p = " << st["min_p"].dump()
                  << "\n";
    } else if (name == "probe") {
        std::string last = "n/a";
        if (st.contains("ratios") && !st["ratios"].empty()) last = st["ratios"].back().dump();
        std::cout << "probe: last strip ratio = " << last << ", diverging = " << num(st, "diverging")
                  << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"variational toolkit for intrinsic graphs: area, stability and ruling analyses"};
    app.require_subcommand(1);

    std::string config_path, out_path, entry;
    std::uint64_t seed = 0;
    bool verbose = false;
    app.add_option("--config", config_path, "config file with key = value lines");
    auto* out_opt = app.add_option("--out", out_path, "write the JSON report to this path");
    auto* entry_opt = app.add_option("--entry", entry, "catalog entry name");
    auto* seed_opt = app.add_option("--seed", seed, "bump placement seed");
    app.add_flag("--verbose", verbose, "print the full report to stdout");

    const auto add_sub = [&](const char* name, const char* desc) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->fallthrough();
        return sub;
    };
    add_sub("area", "graph area over the area window");
    add_sub("variation", "first and second variation on random bumps");
    add_sub("flow", "characteristic flow and conjugation residuals");
    add_sub("ruling", "ruling coefficients and parabola fit quality");
    add_sub("stability", "window form assembly and smallest eigenvalue");

    auto* hardy_cmd = add_sub("hardy", "weighted Hardy window minimum");
    double hA = 0, hB = 0, hL = 0;
    int hn = 0;
    auto* hA_opt = hardy_cmd->add_option("--A", hA, "quadratic coefficient of the weight");
    auto* hB_opt = hardy_cmd->add_option("--B", hB, "linear coefficient of the weight");
    auto* hL_opt = hardy_cmd->add_option("--L", hL, "window half width");
    auto* hn_opt = hardy_cmd->add_option("--n", hn, "number of elements");

    auto* exp_cmd = add_sub("exponents", "exponent set, conditions and thresholds");
    double xp = 0, xq = 0;
    auto* xp_opt = exp_cmd->add_option("--p", xp, "exponent p (> 2)");
    auto* xq_opt = exp_cmd->add_option("--q", xq, "exponent q (> 1)");

    auto* probe_cmd = add_sub("probe", "decade integrability probe of d_tau f");
    double pe = 0, pk = 0;
    int pd = 0;
    auto* pe_opt = probe_cmd->add_option("--exponent", pe, "moment exponent");
    auto* pk_opt = probe_cmd->add_option("--kappa", pk, "exponential weight (overrides the moment)");
    auto* pd_opt = probe_cmd->add_option("--decades", pd, "number of decades toward tau = 0");

    auto* report_cmd = add_sub("report", "run every analysis listed in the config");
    std::string plot_series, plot_out;
    auto* plot_opt = report_cmd->add_option("--plot", plot_series, "emit a plot series: ruling, witness or hardy");
    report_cmd->add_option("--plot-out", plot_out, "plot CSV path (default <series>.csv)");

    CLI11_PARSE(app, argc, argv);

    try {
        igstab::ReportConfig cfg =
            config_path.empty() ? igstab::ReportConfig{} : igstab::parse_config_file(config_path);
        if (entry_opt->count() > 0) {
            cfg.entry = entry;
            cfg.entry_given = true;
            cfg.field_csv.clear();
        }
        if (seed_opt->count() > 0) cfg.seed = seed;

        const CLI::App* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        if (name != "report") cfg.analyses = {name};
        if (hA_opt->count() > 0) cfg.hardy_A = hA;
        if (hB_opt->count() > 0) cfg.hardy_B = hB;
        if (hL_opt->count() > 0) cfg.hardy_L = hL;
        if (hn_opt->count() > 0) cfg.hardy_n = hn;
        if (xp_opt->count() > 0) cfg.exp_p = xp;
        if (xq_opt->count() > 0) cfg.exp_q = xq;
        if (pe_opt->count() > 0) cfg.probe_exponent = pe;
        if (pk_opt->count() > 0) cfg.probe_kappa = pk;
        if (pd_opt->count() > 0) cfg.probe_decades = pd;

        const ordered_json rep = igstab::run_report(cfg);

        for (const auto& st : rep["stages"]) print_stage(st);
        if (verbose) std::cout << rep.dump(2) << "\n";

        if (out_opt->count() > 0) {
            igstab::write_report(rep, out_path);
            std::cout << "report written to " << out_path << "\n";
        } else if (name == "report") {
            igstab::write_report(rep, cfg.out_json);
            std::cout << "report written to " << cfg.out_json << "\n";
        }

        if (plot_opt->count() > 0) {
            const std::string path = plot_out.empty() ? plot_series + ".csv" : plot_out;
            igstab::emit_plot_data(rep, plot_series, path);
            std::cout << "plot data written to " << path << "\n";
        }

        const int errors = rep.value("errors", 0);
        return errors > 0 ? 2 : 0;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
}
