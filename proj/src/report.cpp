#include "igstab/report.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "igstab/bump.hpp"
#include "igstab/catalog.hpp"
#include "igstab/exponents.hpp"
#include "igstab/field.hpp"
#include "igstab/lagrangian.hpp"
#include "igstab/stability.hpp"
#include "igstab/util.hpp"
#include "igstab/variation.hpp"

namespace igstab {

namespace {

using nlohmann::ordered_json;

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x = 0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': cannot parse '" + v + "' as a number");
    }
    if (pos != v.size())
        throw std::invalid_argument("config key '" + key + "': trailing characters in '" + v + "'");
    return x;
}

int parse_int(const std::string& key, const std::string& v) {
    const double x = parse_double(key, v);
    if (x != std::floor(x) || std::abs(x) > 2e9)
        throw std::invalid_argument("config key '" + key + "': '" + v + "' is not an integer");
    return static_cast<int>(x);
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    std::uint64_t x = 0;
    try {
        x = std::stoull(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': cannot parse '" + v + "' as an unsigned integer");
    }
    if (pos != v.size())
        throw std::invalid_argument("config key '" + key + "': trailing characters in '" + v + "'");
    return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw std::invalid_argument("config key '" + key + "': expected true or false, got '" + v + "'");
}

const std::set<std::string>& known_analyses() {
    static const std::set<std::string> k = {"area",      "variation", "flow",      "ruling",
                                            "stability", "hardy",     "exponents", "probe"};
    return k;
}

// Both-or-neither pair of optional window bounds.
void check_pair(const std::string& a, double va, const std::string& b, double vb) {
    if (std::isnan(va) != std::isnan(vb))
        throw std::invalid_argument("config keys '" + a + "' and '" + b + "' must be given together");
    if (!std::isnan(va) && !(va < vb))
        throw std::invalid_argument("config key '" + a + "' must be below '" + b + "'");
}

struct EntryDefaults {
    double ft0, ft1, fz0, fz1, st0, st1;
};

EntryDefaults entry_defaults(const std::string& name) {
    if (name == "plane") return {-3.0, 3.0, -1.0, 1.0, -10.0, 10.0};
    if (name == "young") return {-0.5, 1.5, 1.0, 2.0, -0.75, 1.5};
    if (name == "hyperbolic-fan") return {-3.0, 3.0, -1.0, 1.0, -10.0, 10.0};
    if (name == "tau-log") return {-0.4, 0.4, 0.5, 0.9, -0.4, 0.4};
    if (name == "sine") return {-2.0, 2.0, 1.0, 2.0, -2.0, 2.0};
    throw std::invalid_argument("unknown catalog entry: " + name);
}

struct Resolved {
    ReportConfig eff;
    GraphFunction g;
    Rect rect;
    Rect area_window;
    std::optional<CatalogEntry> entry;
};

Resolved resolve(const ReportConfig& cfg) {
    Resolved r;
    r.eff = cfg;

    if (cfg.entry_given && !cfg.field_csv.empty())
        throw std::invalid_argument("give either 'entry' or 'field_csv', not both");
    if (cfg.analyses.empty()) throw std::invalid_argument("'analyses' must name at least one analysis");
    for (const auto& a : cfg.analyses)
        if (!known_analyses().count(a))
            throw std::invalid_argument("unknown analysis '" + a +
                                        "'; choose from area, variation, flow, ruling, stability, "
                                        "hardy, exponents, probe");
    if (cfg.bumps < 0 || cfg.bumps > 200) throw std::invalid_argument("'bumps' must be 0..200");
    if (!(cfg.ode_tol >= 1e-12 && cfg.ode_tol <= 1e-3))
        throw std::invalid_argument("'ode_tol' must lie in [1e-12, 1e-3]");
    if (cfg.flow_n_t < 9) throw std::invalid_argument("'flow_n_t' must be at least 9");
    if (cfg.flow_n_zeta < 3) throw std::invalid_argument("'flow_n_zeta' must be at least 3");
    if (cfg.stab_n_t < 4 || cfg.stab_n_zeta < 4)
        throw std::invalid_argument("stability window needs at least 4 nodes per axis");
    if (cfg.hardy_n < 2) throw std::invalid_argument("'hardy_n' must be at least 2");
    if (cfg.probe_decades < 1 || cfg.probe_decades > 14)
        throw std::invalid_argument("'probe_decades' must be 1..14");

    check_pair("area_eta_min", cfg.area_eta_min, "area_eta_max", cfg.area_eta_max);
    check_pair("area_tau_min", cfg.area_tau_min, "area_tau_max", cfg.area_tau_max);
    if (std::isnan(cfg.area_eta_min) != std::isnan(cfg.area_tau_min))
        throw std::invalid_argument("the four area window keys must be given together");
    check_pair("flow_t_min", cfg.flow_t_min, "flow_t_max", cfg.flow_t_max);
    check_pair("flow_zeta_min", cfg.flow_zeta_min, "flow_zeta_max", cfg.flow_zeta_max);
    check_pair("stab_t_min", cfg.stab_t_min, "stab_t_max", cfg.stab_t_max);
    check_pair("stab_zeta_min", cfg.stab_zeta_min, "stab_zeta_max", cfg.stab_zeta_max);
    check_pair("probe_eta_lo", cfg.probe_eta_lo, "probe_eta_hi", cfg.probe_eta_hi);

    EntryDefaults ed{};
    if (cfg.field_csv.empty()) {
        if (cfg.n_eta < 16 || cfg.n_tau < 16 || cfg.n_eta > 20000 || cfg.n_tau > 20000)
            throw std::invalid_argument("'n_eta' and 'n_tau' must lie in 16..20000");
        r.entry = catalog_entry(cfg.entry);
        r.g = catalog_graph(*r.entry, cfg.n_eta, cfg.n_tau);
        ed = entry_defaults(cfg.entry);
    } else {
        ScalarField f = read_field_csv(cfg.field_csv);
        if (f.spec().n_eta < 3 || f.spec().n_tau < 3)
            throw std::invalid_argument("sampled field needs at least 3 nodes per axis");
        r.g = build_graph_function(f);
        r.eff.n_eta = r.g.spec().n_eta;
        r.eff.n_tau = r.g.spec().n_tau;
        const Rect& rc = r.g.spec().rect;
        ed.ft0 = rc.eta_min + 0.25 * rc.width();
        ed.ft1 = rc.eta_max - 0.25 * rc.width();
        ed.fz0 = rc.tau_min + 0.25 * rc.height();
        ed.fz1 = rc.tau_max - 0.25 * rc.height();
        ed.st0 = ed.ft0;
        ed.st1 = ed.ft1;
    }
    r.rect = r.g.spec().rect;

    auto fill = [](double& v, double dflt) {
        if (std::isnan(v)) v = dflt;
    };
    fill(r.eff.area_eta_min, r.rect.eta_min + 0.25 * r.rect.width());
    fill(r.eff.area_eta_max, r.rect.eta_max - 0.25 * r.rect.width());
    fill(r.eff.area_tau_min, r.rect.tau_min + 0.25 * r.rect.height());
    fill(r.eff.area_tau_max, r.rect.tau_max - 0.25 * r.rect.height());
    fill(r.eff.flow_t_min, ed.ft0);
    fill(r.eff.flow_t_max, ed.ft1);
    fill(r.eff.flow_zeta_min, ed.fz0);
    fill(r.eff.flow_zeta_max, ed.fz1);
    fill(r.eff.stab_t_min, ed.st0);
    fill(r.eff.stab_t_max, ed.st1);
    fill(r.eff.stab_zeta_min, r.eff.flow_zeta_min);
    fill(r.eff.stab_zeta_max, r.eff.flow_zeta_max);
    fill(r.eff.probe_eta_lo, r.rect.eta_min + 0.25 * r.rect.width());
    fill(r.eff.probe_eta_hi, r.rect.eta_max - 0.25 * r.rect.width());

    r.area_window = Rect{r.eff.area_eta_min, r.eff.area_eta_max, r.eff.area_tau_min, r.eff.area_tau_max};
    if (!r.rect.contains(r.area_window))
        throw std::invalid_argument("area window must sit inside the field rectangle");
    if (r.eff.flow_t_min < r.rect.eta_min || r.eff.flow_t_max > r.rect.eta_max)
        throw std::invalid_argument("flow time window must sit inside the eta extent");
    if (r.eff.flow_zeta_min < r.rect.tau_min || r.eff.flow_zeta_max > r.rect.tau_max)
        throw std::invalid_argument("flow zeta window must sit inside the tau extent");
    if (r.eff.eta0 < r.eff.flow_t_min || r.eff.eta0 > r.eff.flow_t_max)
        throw std::invalid_argument("eta0 must lie inside the flow time window");
    return r;
}

ordered_json echo_config(const Resolved& r) {
    const ReportConfig& c = r.eff;
    ordered_json j;
    if (c.field_csv.empty())
        j["entry"] = c.entry;
    else
        j["field_csv"] = c.field_csv;
    j["n_eta"] = c.n_eta;
    j["n_tau"] = c.n_tau;
    j["analyses"] = c.analyses;
    j["seed"] = c.seed;
    j["bumps"] = c.bumps;
    j["fd_check"] = c.fd_check;
    j["area_eta_min"] = c.area_eta_min;
    j["area_eta_max"] = c.area_eta_max;
    j["area_tau_min"] = c.area_tau_min;
    j["area_tau_max"] = c.area_tau_max;
    j["eta0"] = c.eta0;
    j["flow_t_min"] = c.flow_t_min;
    j["flow_t_max"] = c.flow_t_max;
    j["flow_n_t"] = c.flow_n_t;
    j["flow_zeta_min"] = c.flow_zeta_min;
    j["flow_zeta_max"] = c.flow_zeta_max;
    j["flow_n_zeta"] = c.flow_n_zeta;
    j["ode_tol"] = c.ode_tol;
    j["stab_t_min"] = c.stab_t_min;
    j["stab_t_max"] = c.stab_t_max;
    j["stab_n_t"] = c.stab_n_t;
    j["stab_zeta_min"] = c.stab_zeta_min;
    j["stab_zeta_max"] = c.stab_zeta_max;
    j["stab_n_zeta"] = c.stab_n_zeta;
    j["hardy_A"] = c.hardy_A;
    j["hardy_B"] = c.hardy_B;
    j["hardy_L"] = c.hardy_L;
    j["hardy_n"] = c.hardy_n;
    j["exp_p"] = c.exp_p;
    j["exp_q"] = c.exp_q;
    j["probe_exponent"] = c.probe_exponent;
    j["probe_kappa"] = c.probe_kappa;
    j["probe_decades"] = c.probe_decades;
    j["probe_eta_lo"] = c.probe_eta_lo;
    j["probe_eta_hi"] = c.probe_eta_hi;
    j["out_json"] = c.out_json;
    return j;
}

}  // namespace

ReportConfig::ReportConfig()
    : area_eta_min(nan_value()),
      area_eta_max(nan_value()),
      area_tau_min(nan_value()),
      area_tau_max(nan_value()),
      flow_t_min(nan_value()),
      flow_t_max(nan_value()),
      flow_zeta_min(nan_value()),
      flow_zeta_max(nan_value()),
      stab_t_min(nan_value()),
      stab_t_max(nan_value()),
      stab_zeta_min(nan_value()),
      stab_zeta_max(nan_value()),
      probe_eta_lo(nan_value()),
      probe_eta_hi(nan_value()) {}

ReportConfig parse_config_text(const std::string& text) {
    ReportConfig cfg;
    std::map<std::string, std::function<void(const std::string&, const std::string&)>> keys;
    keys["entry"] = [&](const std::string&, const std::string& v) {
        cfg.entry = v;
        cfg.entry_given = true;
    };
    keys["field_csv"] = [&](const std::string&, const std::string& v) { cfg.field_csv = v; };
    keys["analyses"] = [&](const std::string& k, const std::string& v) {
        cfg.analyses.clear();
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) throw std::invalid_argument("config key '" + k + "': empty list item");
            cfg.analyses.push_back(item);
        }
    };
    keys["out_json"] = [&](const std::string&, const std::string& v) { cfg.out_json = v; };
    keys["seed"] = [&](const std::string& k, const std::string& v) { cfg.seed = parse_u64(k, v); };
    keys["fd_check"] = [&](const std::string& k, const std::string& v) { cfg.fd_check = parse_bool(k, v); };

    const auto int_key = [&](const char* name, int& slot) {
        keys[name] = [&slot, name](const std::string&, const std::string& v) { slot = parse_int(name, v); };
    };
    int_key("n_eta", cfg.n_eta);
    int_key("n_tau", cfg.n_tau);
    int_key("bumps", cfg.bumps);
    int_key("flow_n_t", cfg.flow_n_t);
    int_key("flow_n_zeta", cfg.flow_n_zeta);
    int_key("stab_n_t", cfg.stab_n_t);
    int_key("stab_n_zeta", cfg.stab_n_zeta);
    int_key("hardy_n", cfg.hardy_n);
    int_key("probe_decades", cfg.probe_decades);

    const auto dbl_key = [&](const char* name, double& slot) {
        keys[name] = [&slot, name](const std::string&, const std::string& v) { slot = parse_double(name, v); };
    };
    dbl_key("area_eta_min", cfg.area_eta_min);
    dbl_key("area_eta_max", cfg.area_eta_max);
    dbl_key("area_tau_min", cfg.area_tau_min);
    dbl_key("area_tau_max", cfg.area_tau_max);
    dbl_key("eta0", cfg.eta0);
    dbl_key("flow_t_min", cfg.flow_t_min);
    dbl_key("flow_t_max", cfg.flow_t_max);
    dbl_key("flow_zeta_min", cfg.flow_zeta_min);
    dbl_key("flow_zeta_max", cfg.flow_zeta_max);
    dbl_key("ode_tol", cfg.ode_tol);
    dbl_key("stab_t_min", cfg.stab_t_min);
    dbl_key("stab_t_max", cfg.stab_t_max);
    dbl_key("stab_zeta_min", cfg.stab_zeta_min);
    dbl_key("stab_zeta_max", cfg.stab_zeta_max);
    dbl_key("hardy_A", cfg.hardy_A);
    dbl_key("hardy_B", cfg.hardy_B);
    dbl_key("hardy_L", cfg.hardy_L);
    dbl_key("exp_p", cfg.exp_p);
    dbl_key("exp_q", cfg.exp_q);
    dbl_key("probe_exponent", cfg.probe_exponent);
    dbl_key("probe_kappa", cfg.probe_kappa);
    dbl_key("probe_eta_lo", cfg.probe_eta_lo);
    dbl_key("probe_eta_hi", cfg.probe_eta_hi);

    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        const auto it = keys.find(key);
        if (it == keys.end())
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        if (!seen.insert(key).second)
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": repeated key '" + key + "'");
        if (val.empty())
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty value for '" + key + "'");
        it->second(key, val);
    }
    return cfg;
}

ReportConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

nlohmann::ordered_json run_report(const ReportConfig& cfg) {
    Resolved r = resolve(cfg);
    const ReportConfig& c = r.eff;

    ordered_json rep;
    rep["config"] = echo_config(r);
    rep["stages"] = ordered_json::array();
    int errors = 0;

    // The flow is shared by the flow, ruling and stability stages.
    std::optional<LagrangianFlow> flow;
    std::string flow_error;
    const auto ensure_flow = [&]() -> const LagrangianFlow& {
        if (!flow_error.empty()) throw std::runtime_error(flow_error);
        if (!flow) {
            try {
                const std::vector<double> zg = linspace(c.flow_zeta_min, c.flow_zeta_max, c.flow_n_zeta);
                flow = integrate_flow(r.g, c.eta0, zg, TimeSpan{c.flow_t_min, c.flow_t_max, c.flow_n_t},
                                      c.ode_tol);
            } catch (const std::exception& ex) {
                flow_error = ex.what();
                throw;
            }
        }
        return *flow;
    };

    for (const std::string& name : c.analyses) {
        ordered_json st;
        st["stage"] = name;
        try {
            if (name == "area") {
                const VariationResult a = area(r.g, r.area_window, variation_default_options());
                st["value"] = a.value;
                st["error_estimate"] = a.quadrature_error_estimate;
            } else if (name == "variation") {
                std::mt19937_64 rng(c.seed);
                std::uniform_real_distribution<double> U(0.0, 1.0);
                ordered_json bumps = ordered_json::array();
                double max_first = 0.0;
                double min_second = std::numeric_limits<double>::infinity();
                for (int k = 0; k < c.bumps; ++k) {
                    const double re = (0.08 + 0.07 * U(rng)) * r.area_window.width();
                    const double rt = (0.08 + 0.07 * U(rng)) * r.area_window.height();
                    const double ce = r.area_window.eta_min + 1.05 * re +
                                      U(rng) * (r.area_window.width() - 2.1 * re);
                    const double ct = r.area_window.tau_min + 1.05 * rt +
                                      U(rng) * (r.area_window.height() - 2.1 * rt);
                    const double amp = 0.5 + U(rng);
                    const TestFunction tf(ce, ct, re, rt, amp);
                    const VariationResult I = first_variation(r.g, tf);
                    const VariationResult II = second_variation(r.g, tf);
                    ordered_json b;
                    b["center_eta"] = ce;
                    b["center_tau"] = ct;
                    b["r_eta"] = re;
                    b["r_tau"] = rt;
                    b["amplitude"] = amp;
                    b["first"] = I.value;
                    b["first_error_estimate"] = I.quadrature_error_estimate;
                    b["second"] = II.value;
                    b["second_error_estimate"] = II.quadrature_error_estimate;
                    if (c.fd_check) {
                        const FdCheck fc = variation_fd_check(r.g, tf, default_eps_sweep(),
                                                              variation_default_options());
                        b["fd_first_error"] = fc.first_error;
                        b["fd_second_error"] = fc.second_error;
                    }
                    bumps.push_back(std::move(b));
                    max_first = std::max(max_first, std::abs(I.value));
                    min_second = std::min(min_second, II.value);
                }
                st["bumps"] = std::move(bumps);
                st["max_abs_first"] = max_first;
                st["min_second"] = min_second;
            } else if (name == "flow") {
                const LagrangianFlow& fl = ensure_flow();
                int clipped = 0;
                double max_chi = 0.0;
                for (int j = 0; j < fl.n_zeta(); ++j) {
                    if (fl.trajectory_clipped(j)) ++clipped;
                    for (int i = 0; i < fl.n_t(); ++i)
                        if (fl.sample_valid(i, j)) max_chi = std::max(max_chi, std::abs(fl.chi(i, j)));
                }
                st["n_t"] = fl.n_t();
                st["n_zeta"] = fl.n_zeta();
                st["clipped_trajectories"] = clipped;
                st["max_abs_chi"] = max_chi;
                const ConjugationResidual cr = conjugation_residual(fl, r.g);
                st["conjugation_res_t"] = cr.res1;
                st["conjugation_res_zeta"] = cr.res2;
            } else if (name == "ruling") {
                const LagrangianFlow& fl = ensure_flow();
                const RulingProfile pr = extract_ruling(fl, r.g);
                st["residual"] = ruling_residual(fl, pr);
                st["straightness"] = horizontal_lift_straightness(fl, r.g);
                const double span = c.flow_t_max - c.flow_t_min;
                const VandermondeRuling vr = vandermonde_extract(fl, c.flow_t_min + 0.25 * span,
                                                                 c.flow_t_min + 0.5 * span,
                                                                 c.flow_t_min + 0.75 * span);
                double ga = 0.0, gb = 0.0, gc = 0.0;
                int skipped = 0;
                for (std::size_t j = 0; j < pr.zeta.size(); ++j) {
                    const double va = vr.profile.a[j], vb = vr.profile.b[j], vc = vr.c[j];
                    if (!std::isfinite(va) || !std::isfinite(vb) || !std::isfinite(vc)) {
                        ++skipped;
                        continue;
                    }
                    ga = std::max(ga, std::abs(va - pr.a[j]));
                    gb = std::max(gb, std::abs(vb - pr.b[j]));
                    gc = std::max(gc, std::abs(vc - pr.zeta[j]));
                }
                st["vandermonde_max_a_gap"] = ga;
                st["vandermonde_max_b_gap"] = gb;
                st["vandermonde_max_c_gap"] = gc;
                st["vandermonde_skipped"] = skipped;
                ordered_json series;
                series["zeta"] = pr.zeta;
                series["a"] = pr.a;
                series["b"] = pr.b;
                series["da"] = pr.da;
                series["db"] = pr.db;
                st["series"] = std::move(series);
            } else if (name == "stability") {
                const LagrangianFlow& fl = ensure_flow();
                const RulingProfile pr = extract_ruling(fl, r.g);
                const FormWindow fw{c.stab_t_min, c.stab_t_max, c.stab_n_t,
                                    c.stab_zeta_min, c.stab_zeta_max, c.stab_n_zeta};
                const StabilityReport sr = stability_verdict(pr, fw);
                st["lambda_min"] = sr.lambda_min;
                st["verdict"] = sr.verdict;
                st["pairs_ok"] = sr.pairs_ok;
                st["pointwise_ok"] = sr.pointwise_ok;
                if (!sr.note.empty()) st["note"] = sr.note;
                if (sr.witness.rows > 0) {
                    st["eig_residual"] = sr.eig_residual;
                    ordered_json w;
                    w["t"] = linspace(fw.t_min, fw.t_max, fw.n_t);
                    w["zeta"] = linspace(fw.zeta_min, fw.zeta_max, fw.n_zeta);
                    ordered_json rows = ordered_json::array();
                    for (int i = 0; i < sr.witness.rows; ++i) {
                        ordered_json row = ordered_json::array();
                        for (int j = 0; j < sr.witness.cols; ++j) row.push_back(sr.witness(i, j));
                        rows.push_back(std::move(row));
                    }
                    w["values"] = std::move(rows);
                    st["witness"] = std::move(w);
                }
            } else if (name == "hardy") {
                const HardyResult hr = hardy_rayleigh(c.hardy_A, c.hardy_B, c.hardy_L, c.hardy_n);
                st["rayleigh"] = hr.rayleigh;
                st["rigidity_rhs"] = hr.rigidity_rhs;
                st["eig_residual"] = hr.eig_residual;
                ordered_json series;
                series["t"] = hr.t;
                series["witness"] = hr.witness;
                st["series"] = std::move(series);
            } else if (name == "exponents") {
                const ExponentSet e = build_exponents(c.exp_p, c.exp_q);
                ordered_json set;
                set["p"] = e.p;
                set["q"] = e.q;
                set["q_conj"] = e.q_conj;
                set["s"] = e.s;
                set["alpha"] = e.alpha;
                if (e.beta)
                    set["beta"] = *e.beta;
                else
                    set["beta"] = nullptr;
                set["r"] = e.r;
                st["set"] = std::move(set);
                const ConditionReport cr = check_conditions(e);
                ordered_json conds;
                conds["a1"] = cr.a1;
                conds["a2"] = cr.a2;
                if (cr.a3)
                    conds["a3"] = *cr.a3;
                else
                    conds["a3"] = nullptr;
                conds["a4"] = cr.a4;
                st["conditions"] = std::move(conds);
                ordered_json th;
                const std::pair<const char*, Condition> cs[] = {
                    {"a1", Condition::A1}, {"a2", Condition::A2}, {"a3", Condition::A3}, {"a4", Condition::A4}};
                for (const auto& [label, cond] : cs) {
                    try {
                        th[label] = find_min_p(c.exp_q, cond);
                    } catch (const std::exception& ex) {
                        th[label] = ex.what();
                    }
                }
                st["min_p"] = std::move(th);
            } else if (name == "probe") {
                if (!r.entry)
                    throw std::runtime_error("the probe needs a catalog entry with exact evaluators");
                const ProbeResult pr = integrability_probe(*r.entry, c.probe_exponent, c.probe_kappa,
                                                           c.probe_eta_lo, c.probe_eta_hi,
                                                           c.probe_decades);
                st["strip_lo"] = pr.strip_lo;
                st["integrals"] = pr.integrals;
                st["cumulative"] = pr.cumulative;
                st["ratios"] = pr.ratios;
                st["diverging"] = pr.diverging;
            }
        } catch (const std::exception& ex) {
            st["error"] = ex.what();
            ++errors;
        }
        rep["stages"].push_back(std::move(st));
    }
    rep["errors"] = errors;
    return rep;
}

void write_report(const nlohmann::ordered_json& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open report output: " + path);
    out << report.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

void emit_plot_data(const nlohmann::ordered_json& report, const std::string& series,
                    const std::string& path) {
    std::string stage_name, payload_key;
    if (series == "ruling") {
        stage_name = "ruling";
        payload_key = "series";
    } else if (series == "witness") {
        stage_name = "stability";
        payload_key = "witness";
    } else if (series == "hardy") {
        stage_name = "hardy";
        payload_key = "series";
    } else {
        throw std::invalid_argument("unknown plot series '" + series +
                                    "'; available: ruling, witness, hardy");
    }

    if (!report.contains("stages") || !report["stages"].is_array())
        throw std::runtime_error("report carries no stages array");
    const nlohmann::ordered_json* stage = nullptr;
    for (const auto& st : report["stages"]) {
        if (st.value("stage", "") == stage_name && !st.contains("error") && st.contains(payload_key)) {
            stage = &st;
            break;
        }
    }
    if (stage == nullptr)
        throw std::runtime_error("report has no successful '" + stage_name + "' stage with plot data");

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open plot output: " + path);
    const auto& p = (*stage)[payload_key];
    if (series == "ruling") {
        out << "zeta,a,b,da,db\n";
        const auto& z = p["zeta"];
        for (std::size_t k = 0; k < z.size(); ++k)
            out << format_sig(z[k].get<double>()) << ',' << format_sig(p["a"][k].get<double>()) << ','
                << format_sig(p["b"][k].get<double>()) << ',' << format_sig(p["da"][k].get<double>())
                << ',' << format_sig(p["db"][k].get<double>()) << '\n';
    } else if (series == "witness") {
        out << "t,zeta,value\n";
        const auto& t = p["t"];
        const auto& z = p["zeta"];
        const auto& vals = p["values"];
        for (std::size_t i = 0; i < t.size(); ++i)
            for (std::size_t j = 0; j < z.size(); ++j)
                out << format_sig(t[i].get<double>()) << ',' << format_sig(z[j].get<double>()) << ','
                    << format_sig(vals[i][j].get<double>()) << '\n';
    } else {
        out << "t,witness\n";
        const auto& t = p["t"];
        for (std::size_t k = 0; k < t.size(); ++k)
            out << format_sig(t[k].get<double>()) << ',' << format_sig(p["witness"][k].get<double>())
                << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace igstab
