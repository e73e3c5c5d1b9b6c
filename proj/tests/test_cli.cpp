#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "igstab/catalog.hpp"
#include "igstab/grid.hpp"
#include "igstab/report.hpp"

using namespace igstab;
using nlohmann::ordered_json;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir() {
    const fs::path d = fs::temp_directory_path() / "igstab_cli_tests";
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    REQUIRE(out.good());
    out << text;
}

// Runs the installed binary and maps the raw status to an exit code.
int run_cli(const std::string& args) {
    const std::string cmd = std::string(IGSTAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

}  // namespace

TEST_CASE("config text parses keys, comments and lists") {
    const auto cfg = parse_config_text(
        "# analysis setup\n"
        "entry = hyperbolic-fan\n"
        "\n"
        "analyses = area, flow , ruling\n"
        "seed = 99\n"
        "bumps = 7\n"
        "fd_check = false\n"
        "area_eta_min = -1.5  # inline comment\n"
        "area_eta_max = 1.5\n"
        "area_tau_min = -2\n"
        "area_tau_max = 2\n");
    CHECK(cfg.entry == "hyperbolic-fan");
    CHECK(cfg.entry_given);
    CHECK(cfg.analyses == std::vector<std::string>{"area", "flow", "ruling"});
    CHECK(cfg.seed == 99);
    CHECK(cfg.bumps == 7);
    CHECK_FALSE(cfg.fd_check);
    CHECK(cfg.area_eta_min == -1.5);
    CHECK(cfg.area_tau_max == 2.0);

    const auto defaults = parse_config_text("");
    CHECK(defaults.entry == "plane");
    CHECK_FALSE(defaults.entry_given);
    CHECK(defaults.n_eta == 241);
    CHECK(std::isnan(defaults.area_eta_min));
}

TEST_CASE("config errors carry the offending line and key") {
    CHECK_THROWS_WITH_AS(parse_config_text("entry = plane\nno_such_key = 3\n"),
                         doctest::Contains("line 2"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config_text("seed = 1\n\nseed = 2\n"),
                         doctest::Contains("repeated key 'seed'"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config_text("just some words\n"),
                         doctest::Contains("expected key = value"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config_text("n_eta = twelve\n"), doctest::Contains("n_eta"),
                         std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("n_eta = 32.5\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("fd_check = maybe\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("analyses = area,,flow\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_file((scratch_dir() / "missing.cfg").string()),
                    std::runtime_error);
}

TEST_CASE("report validation refuses inconsistent configs") {
    ReportConfig both;
    both.entry = "plane";
    both.entry_given = true;
    both.field_csv = "somewhere.csv";
    CHECK_THROWS_WITH_AS(run_report(both), doctest::Contains("not both"), std::invalid_argument);

    ReportConfig unknown;
    unknown.analyses = {"area", "nonsense"};
    CHECK_THROWS_WITH_AS(run_report(unknown), doctest::Contains("nonsense"),
                         std::invalid_argument);

    ReportConfig bumps;
    bumps.bumps = 500;
    CHECK_THROWS_AS(run_report(bumps), std::invalid_argument);

    ReportConfig window;
    window.area_eta_min = -1.0;  // three siblings left NaN
    CHECK_THROWS_WITH_AS(run_report(window), doctest::Contains("together"), std::invalid_argument);

    ReportConfig entry;
    entry.entry = "nosuch";
    CHECK_THROWS_WITH_AS(run_report(entry), doctest::Contains("unknown catalog entry"),
                         std::invalid_argument);
}

TEST_CASE("identical configs produce byte-identical reports") {
    ReportConfig cfg;
    cfg.entry = "hyperbolic-fan";
    cfg.entry_given = true;
    cfg.n_eta = 81;
    cfg.n_tau = 81;
    cfg.bumps = 3;
    cfg.fd_check = false;
    cfg.flow_n_t = 61;
    cfg.flow_n_zeta = 11;
    cfg.stab_n_t = 41;
    cfg.stab_n_zeta = 9;
    cfg.analyses = {"area", "variation", "flow", "ruling", "stability", "hardy", "exponents",
                    "probe"};
    cfg.hardy_n = 200;

    const auto a = run_report(cfg);
    const auto b = run_report(cfg);
    CHECK(a.dump() == b.dump());
    CHECK(a["errors"].get<int>() == 0);
    CHECK(a["stages"].size() == 8);
    // The echoed config block pins every effective value.
    CHECK(a["config"]["seed"].get<std::uint64_t>() == 2026);
    CHECK(a["config"]["flow_t_min"].is_number());
}

TEST_CASE("per-stage failures are recorded without aborting the run") {
    ReportConfig cfg;
    cfg.analyses = {"hardy", "exponents"};
    cfg.hardy_A = 2.0;
    cfg.hardy_B = 5.0;  // weight goes negative inside [-L, L]
    cfg.hardy_L = 3.0;
    cfg.hardy_n = 100;

    const auto rep = run_report(cfg);
    CHECK(rep["errors"].get<int>() == 1);
    REQUIRE(rep["stages"].size() == 2);
    CHECK(rep["stages"][0]["stage"] == "hardy");
    CHECK(rep["stages"][0].contains("error"));
    CHECK_FALSE(rep["stages"][1].contains("error"));
}

TEST_CASE("plot series extraction writes the documented headers") {
    ReportConfig cfg;
    cfg.entry = "hyperbolic-fan";
    cfg.entry_given = true;
    cfg.n_eta = 81;
    cfg.n_tau = 81;
    cfg.analyses = {"flow", "ruling", "stability", "hardy"};
    cfg.flow_n_t = 61;
    cfg.flow_n_zeta = 11;
    cfg.stab_n_t = 41;
    cfg.stab_n_zeta = 9;
    cfg.hardy_n = 100;
    const auto rep = run_report(cfg);
    REQUIRE(rep["errors"].get<int>() == 0);

    const auto dir = scratch_dir();
    emit_plot_data(rep, "ruling", (dir / "ruling.csv").string());
    CHECK(first_line(dir / "ruling.csv") == "zeta,a,b,da,db");

    emit_plot_data(rep, "witness", (dir / "witness.csv").string());
    CHECK(first_line(dir / "witness.csv") == "t,zeta,value");
    // One row per node of the stability window plus the header.
    std::ifstream wit(dir / "witness.csv");
    int rows = 0;
    for (std::string line; std::getline(wit, line);) ++rows;
    CHECK(rows == 1 + 41 * 9);

    emit_plot_data(rep, "hardy", (dir / "hardy.csv").string());
    CHECK(first_line(dir / "hardy.csv") == "t,witness");

    CHECK_THROWS_AS(emit_plot_data(rep, "spectrum", (dir / "x.csv").string()),
                    std::invalid_argument);
    ReportConfig partial;
    partial.analyses = {"exponents"};
    CHECK_THROWS_AS(emit_plot_data(run_report(partial), "ruling", (dir / "x.csv").string()),
                    std::runtime_error);
}

TEST_CASE("binary: subcommands succeed and write parseable reports") {
    const auto dir = scratch_dir();
    const auto out = dir / "exp.json";
    CHECK(run_cli("exponents --p 10 --q 5 --out " + out.string()) == 0);

    const auto rep = ordered_json::parse(slurp(out));
    REQUIRE(rep["stages"].size() == 1);
    const auto& st = rep["stages"][0];
    CHECK(st["stage"] == "exponents");
    CHECK(st["set"]["s"].get<double>() == doctest::Approx(20.0 / 7.0));
    CHECK(st["conditions"]["a3"].get<bool>() == false);

    const auto hout = dir / "hardy.json";
    CHECK(run_cli("hardy --A 2 --B 0 --L 20 --n 400 --out " + hout.string()) == 0);
    const auto hrep = ordered_json::parse(slurp(hout));
    const double ray = hrep["stages"][0]["rayleigh"].get<double>();
    CHECK(ray > 1.0);
    CHECK(ray < 1.1);
    CHECK(hrep["stages"][0]["rigidity_rhs"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("binary: exit codes distinguish usage, config and stage failures") {
    const auto dir = scratch_dir();

    CHECK(run_cli("area --entry nosuch") == 1);

    const auto badcfg = dir / "bad.cfg";
    spit(badcfg, "entry = plane\nunknown_key = 1\n");
    CHECK(run_cli("report --config " + badcfg.string()) == 1);

    // A weight that dips negative fails the hardy stage but parses fine.
    CHECK(run_cli("hardy --A 2 --B 5 --L 3 --n 100") == 2);

    CHECK(run_cli("") != 0);  // a subcommand is required
}

TEST_CASE("binary: report runs a config end to end, deterministically") {
    const auto dir = scratch_dir();
    const auto cfg_path = dir / "fan.cfg";
    const auto out1 = dir / "fan1.json";
    const auto out2 = dir / "fan2.json";
    spit(cfg_path,
         "entry = hyperbolic-fan\n"
         "n_eta = 81\n"
         "n_tau = 81\n"
         "analyses = flow, ruling, stability\n"
         "flow_n_t = 61\n"
         "flow_n_zeta = 11\n"
         "stab_n_t = 41\n"
         "stab_n_zeta = 9\n");

    CHECK(run_cli("report --config " + cfg_path.string() + " --out " + out1.string()) == 0);
    CHECK(run_cli("report --config " + cfg_path.string() + " --out " + out2.string()) == 0);
    CHECK(slurp(out1) == slurp(out2));

    const auto rep = ordered_json::parse(slurp(out1));
    CHECK(rep["errors"].get<int>() == 0);
    CHECK(rep["stages"][2]["verdict"] == "unstable");

    const auto plot = dir / "fanruling.csv";
    CHECK(run_cli("report --config " + cfg_path.string() + " --plot ruling --plot-out " +
                  plot.string() + " --out " + (dir / "fan3.json").string()) == 0);
    CHECK(first_line(plot) == "zeta,a,b,da,db");
    CHECK(run_cli("report --config " + cfg_path.string() + " --plot spectrum --out " +
                  (dir / "fan4.json").string()) == 1);
}

TEST_CASE("binary: sampled fields round trip through CSV into the area stage") {
    const auto dir = scratch_dir();
    const auto csv = dir / "young_field.csv";
    const auto out = dir / "young_csv.json";

    // Sample the two-sided square-root profile with NaN on the tau = 0 column,
    // the way an external sampler marks nodes it cannot evaluate.  The reader
    // must infer the singular line from the column, not fail the parse.
    auto e = catalog_entry("young");
    GridSpec spec{e.rect, 41, 101};
    std::vector<double> vals(static_cast<std::size_t>(41) * 101);
    for (int i = 0; i < 41; ++i)
        for (int j = 0; j < 101; ++j) {
            const double tau = spec.tau(j);
            vals[static_cast<std::size_t>(i) * 101 + j] =
                std::abs(tau) < 1e-12 ? std::numeric_limits<double>::quiet_NaN()
                                      : e.source.value(spec.eta(i), tau);
        }
    ScalarField f = ScalarField::from_values(spec, vals, {0.0}, {});
    write_field_csv(f, csv.string());

    const auto back = read_field_csv(csv.string());
    REQUIRE(back.singular_tau().size() == 1);
    CHECK(back.singular_tau()[0] == doctest::Approx(0.0).epsilon(1e-12));

    const auto cfg_path = dir / "young.cfg";
    spit(cfg_path, "field_csv = " + csv.string() + "\nanalyses = area\n");
    CHECK(run_cli("report --config " + cfg_path.string() + " --out " + out.string()) == 0);

    // The default window integrates a region where W = sqrt(5) exactly; the
    // bilinear resample costs ~2e-3 relative near the singular line.
    const auto rep = ordered_json::parse(slurp(out));
    const double area = rep["stages"][0]["value"].get<double>();
    const double exact = 31.25 * std::sqrt(5.0);
    CHECK(std::abs(area - exact) < 0.5);

    // The same entry analysed analytically nails the window area.
    const auto aout = dir / "young_entry.json";
    CHECK(run_cli("area --entry young --out " + aout.string()) == 0);
    const double entry_area =
        ordered_json::parse(slurp(aout))["stages"][0]["value"].get<double>();
    CHECK(entry_area == doctest::Approx(exact).epsilon(1e-9));
    CHECK(std::abs(area - entry_area) < 0.5);
}
