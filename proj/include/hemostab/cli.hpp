#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hemostab/convergence.hpp"
#include "hemostab/error.hpp"
#include "hemostab/hopf.hpp"
#include "hemostab/models.hpp"
#include "hemostab/robust.hpp"
#include "hemostab/simulator.hpp"
#include "hemostab/spectral.hpp"
#include "hemostab/stability.hpp"

namespace hemostab::cli {

using json = nlohmann::json;

/// Bad flags or an incomplete configuration (exit code 1).
class UsageError : public Error {
public:
    using Error::Error;
};

[[nodiscard]] inline int exit_code(const std::exception& e)
{
    if (dynamic_cast<const UsageError*>(&e) || dynamic_cast<const json::exception*>(&e)) return 1;
    if (dynamic_cast<const NoHopf*>(&e)) return 4;
    if (dynamic_cast<const ConvergenceError*>(&e)) return 3;
    if (dynamic_cast<const DomainError*>(&e)) return 2;
    return 3;
}

inline const std::vector<std::string>& command_names()
{
    static const std::vector<std::string> names{"equilibrium", "thresholds", "chart",    "roc",
                                                "robust",      "hopf",       "simulate", "phase",
                                                "bifurcate",   "verify"};
    return names;
}

/// Tabular output; cells are numbers, strings ("none", "unbounded") or booleans.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
};

struct Output {
    Table table;
    std::optional<json> report;  // hopf: structured JSON body
};

/// %.12g
[[nodiscard]] inline std::string format_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

[[nodiscard]] inline json rounded(double v)
{
    if (!std::isfinite(v)) return v > 0.0 ? json("unbounded") : json("none");
    return std::stod(format_number(v));
}

[[nodiscard]] inline json cell(const std::optional<double>& v, const char* missing = "unbounded")
{
    return v ? rounded(*v) : json(missing);
}

namespace detail {

[[nodiscard]] inline double num(const json& cfg, const char* key)
{
    if (!cfg.contains(key) || !cfg[key].is_number()) {
        throw UsageError(std::string("missing --") + key);
    }
    return cfg[key].get<double>();
}

inline void require(const json& cfg, std::initializer_list<const char*> keys)
{
    for (const char* k : keys) (void)num(cfg, k);
}

inline void default_to(json& cfg, const char* key, const json& value)
{
    if (!cfg.contains(key)) cfg[key] = value;
}

[[nodiscard]] inline ModelKind model_of(const json& cfg)
{
    if (!cfg.contains("model")) throw UsageError("missing --model");
    try {
        return parse_model_kind(cfg["model"].get<std::string>());
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
}

[[nodiscard]] inline ModelParameters params_of(const json& cfg)
{
    ModelParameters p;
    p.beta = num(cfg, "beta");
    p.gamma = num(cfg, "gamma");
    p.n = num(cfg, "n");
    p.tau = cfg.value("tau", 0.0);
    p.eta = cfg.value("eta", 1.0);
    p.validate();
    return p;
}

[[nodiscard]] inline bool generic(const json& cfg) { return cfg.value("generic", false); }

[[nodiscard]] inline LinearCoefficients generic_lin(const json& cfg)
{
    return {num(cfg, "a"), num(cfg, "b")};
}

/// Keys that a command reads; anything else is dropped from the resolved config.
[[nodiscard]] inline std::vector<std::string> relevant_keys(const std::string& cmd, bool is_generic)
{
    std::vector<std::string> keys{"command", "format"};
    auto add = [&](std::initializer_list<const char*> ks) { keys.insert(keys.end(), ks.begin(), ks.end()); };
    const auto model = {"model", "beta", "gamma", "n"};
    if (cmd == "equilibrium") add(model);
    if (cmd == "thresholds") {
        add({"eta", "tau", "generic"});
        if (is_generic) add({"a", "b"}); else add(model);
    }
    if (cmd == "chart") {
        add({"eta", "sweep", "from", "to", "steps", "generic"});
        if (is_generic) add({"a", "tau"}); else add(model);
    }
    if (cmd == "roc") {
        add({"from", "to", "steps", "generic"});
        if (is_generic) add({"a", "b"}); else add(model);
    }
    if (cmd == "robust") {
        add({"model", "beta_lo", "beta_hi", "gamma_lo", "gamma_hi", "n_lo", "n_hi", "sweep", "from", "to",
             "steps"});
    }
    if (cmd == "hopf") {
        add(model);
        add({"tau", "eta"});
    }
    if (cmd == "simulate" || cmd == "phase") {
        add(model);
        add({"tau", "eta", "x0", "t_end", "h", "stride"});
    }
    if (cmd == "bifurcate") {
        add(model);
        add({"tau", "eta_from", "eta_to", "steps", "h", "transient"});
    }
    if (cmd == "verify") {
        add({"generic", "eta"});
        if (is_generic) add({"a", "b"}); else add(model);
    }
    return keys;
}

}  // namespace detail

/**
 * @brief Fills defaults, drops unused keys and validates, so the result fully
 * determines the output.
 */
[[nodiscard]] inline json resolve_config(const json& raw)
{
    using detail::default_to;
    if (!raw.contains("command")) throw UsageError("missing command");
    const std::string cmd = raw["command"].get<std::string>();
    if (std::find(command_names().begin(), command_names().end(), cmd) == command_names().end()) {
        throw UsageError("unknown command '" + cmd + "'");
    }
    const bool is_generic = detail::generic(raw);
    json cfg = json::object();
    for (const auto& k : detail::relevant_keys(cmd, is_generic)) {
        if (raw.contains(k)) cfg[k] = raw[k];
    }
    default_to(cfg, "format", "csv");
    const auto fmt = cfg["format"].get<std::string>();
    if (fmt != "csv" && fmt != "json") throw UsageError("--format must be csv or json");
    if (cfg.contains("generic") && !is_generic) cfg.erase("generic");
    if (!is_generic && cmd != "robust") {
        (void)detail::model_of(cfg);
        detail::require(cfg, {"beta", "gamma", "n"});
    }

    if (cmd == "thresholds" || cmd == "chart" || cmd == "verify") default_to(cfg, "eta", 1.0);
    if (cmd == "thresholds" && is_generic) detail::require(cfg, {"a", "b"});
    if (cmd == "chart") {
        if (!cfg.contains("sweep")) throw UsageError("missing --sweep");
        detail::require(cfg, {"from", "to"});
        default_to(cfg, "steps", 101);
        const auto sweep = cfg["sweep"].get<std::string>();
        if (is_generic) {
            if (sweep == "a") default_to(cfg, "tau", 1.0);
            else if (sweep == "b") detail::require(cfg, {"a"});
            else throw UsageError("generic charts sweep a or b");
            if (sweep == "b") cfg.erase("tau");
            if (sweep == "a") cfg.erase("a");
        } else if (sweep != "beta" && sweep != "n" && sweep != "gamma") {
            throw UsageError("model charts sweep beta, n or gamma");
        }
    }
    if (cmd == "roc") {
        if (is_generic) detail::require(cfg, {"a", "b"});
        default_to(cfg, "from", 0.0);
        detail::require(cfg, {"to"});
        default_to(cfg, "steps", 200);
    }
    if (cmd == "robust") {
        (void)detail::model_of(cfg);
        detail::require(cfg, {"beta_lo", "beta_hi", "gamma_lo", "gamma_hi", "n_lo", "n_hi"});
        if (cfg.contains("sweep")) {
            const auto s = cfg["sweep"].get<std::string>();
            static const std::vector<std::string> ok{"beta_lo", "beta_hi", "gamma_lo",
                                                     "gamma_hi", "n_lo", "n_hi"};
            if (std::find(ok.begin(), ok.end(), s) == ok.end()) {
                throw UsageError("robust sweeps one of beta_lo, beta_hi, gamma_lo, gamma_hi, n_lo, n_hi");
            }
            detail::require(cfg, {"from", "to"});
            default_to(cfg, "steps", 101);
        } else {
            cfg.erase("from");
            cfg.erase("to");
            cfg.erase("steps");
        }
    }
    if (cmd == "hopf") {
        detail::require(cfg, {"tau"});
        default_to(cfg, "eta", 1.0);
    }
    if (cmd == "simulate" || cmd == "phase") {
        detail::require(cfg, {"tau"});
        default_to(cfg, "eta", 1.0);
        default_to(cfg, "x0", 0.5);
        default_to(cfg, "t_end", 200.0);
        default_to(cfg, "h", default_step(detail::num(cfg, "tau")));
        default_to(cfg, "stride", 1);
        if (cfg["stride"].get<long long>() < 1) throw UsageError("--stride must be >= 1");
    }
    if (cmd == "bifurcate") {
        if (!cfg.contains("tau")) {
            const auto kind = detail::model_of(cfg);
            auto p = detail::params_of(cfg);
            cfg["tau"] = tau_critical(linearize(kind, p, largest_equilibrium(kind, p))).tau_c;
        }
        default_to(cfg, "eta_from", 0.9);
        default_to(cfg, "eta_to", 1.2);
        default_to(cfg, "steps", 31);
        default_to(cfg, "h", detail::num(cfg, "tau") / 100.0);
        default_to(cfg, "transient", 0.8);
    }
    if (cmd == "verify" && is_generic) detail::require(cfg, {"a", "b"});
    if (cfg.contains("steps") && cfg["steps"].get<long long>() < 2) throw UsageError("--steps must be >= 2");
    return cfg;
}

namespace detail {

[[nodiscard]] inline Table run_equilibrium(const json& cfg)
{
    const auto kind = model_of(cfg);
    const auto p = params_of(cfg);
    Table t{{"x_star", "residual", "a", "b"}, {}};
    for (const auto& eq : solve_equilibrium(kind, p)) {
        const auto lin = linearize(kind, p, eq);
        t.rows.push_back({rounded(eq.x_star), rounded(eq.residual), rounded(lin.a), rounded(lin.b)});
    }
    return t;
}

[[nodiscard]] inline std::vector<json> threshold_cells(const LinearCoefficients& lin, double eta)
{
    const auto row = chart_row(0.0, lin, eta);
    return {cell(row.tau_noc), cell(row.tau_suff), cell(row.tau_c), cell(row.period, "none")};
}

[[nodiscard]] inline Table run_thresholds(const json& cfg)
{
    LinearCoefficients lin;
    const double eta = num(cfg, "eta");
    if (generic(cfg)) {
        lin = generic_lin(cfg);
    } else {
        const auto kind = model_of(cfg);
        const auto p = params_of(cfg);
        lin = linearize(kind, p, largest_equilibrium(kind, p));
    }
    std::vector<json> row{cfg.contains("tau") ? rounded(num(cfg, "tau")) : json("none")};
    for (auto& c : threshold_cells(lin, eta)) row.push_back(std::move(c));
    return {{"tau", "tau_noc", "tau_suff", "tau_c", "period"}, {row}};
}

[[nodiscard]] inline std::vector<json> chart_cells(const ChartRow& r)
{
    if (!r.has_equilibrium) return {rounded(r.value), "none", "none", "none", "none"};
    return {rounded(r.value), cell(r.tau_noc), cell(r.tau_suff), cell(r.tau_c), cell(r.period, "none")};
}

[[nodiscard]] inline Table run_chart(const json& cfg)
{
    const auto sweep = cfg["sweep"].get<std::string>();
    const double from = num(cfg, "from");
    const double to = num(cfg, "to");
    const auto steps = cfg["steps"].get<std::size_t>();
    const double eta = num(cfg, "eta");
    Table t;
    if (generic(cfg) && sweep == "a") {
        t.columns = {"a", "b_noc", "b_suff", "b_c"};
        for (const auto& r : generic_chart_over_a(num(cfg, "tau"), from, to, steps, eta)) {
            t.rows.push_back({rounded(r.a), rounded(r.b_noc), rounded(r.b_suff), rounded(r.b_c)});
        }
        return t;
    }
    t.columns = {sweep, "tau_noc", "tau_suff", "tau_c", "period"};
    std::vector<ChartRow> rows;
    if (generic(cfg)) {
        rows = generic_chart_over_b(num(cfg, "a"), from, to, steps, eta);
    } else {
        ModelChartSpec spec;
        spec.kind = model_of(cfg);
        spec.fixed = ModelParameters{num(cfg, "beta"), num(cfg, "gamma"), num(cfg, "n"), 0.0, eta};
        spec.sweep = parse_sweep_parameter(sweep);
        spec.from = from;
        spec.to = to;
        spec.resolution = steps;
        rows = stability_chart(spec);
    }
    for (const auto& r : rows) t.rows.push_back(chart_cells(r));
    return t;
}

[[nodiscard]] inline Table run_roc(const json& cfg)
{
    LinearCoefficients lin;
    if (generic(cfg)) {
        lin = generic_lin(cfg);
    } else {
        const auto kind = model_of(cfg);
        const auto p = params_of(cfg);
        lin = linearize(kind, p, largest_equilibrium(kind, p));
    }
    Table t{{"tau", "sigma", "branch"}, {}};
    for (const auto& r : roc_curve(lin, num(cfg, "from"), num(cfg, "to"), cfg["steps"].get<std::size_t>())) {
        t.rows.push_back({rounded(r.tau), rounded(r.result.sigma), to_string(r.result.branch)});
    }
    return t;
}

[[nodiscard]] inline IntervalParameters intervals_of(const json& cfg)
{
    return {{num(cfg, "beta_lo"), num(cfg, "beta_hi")},
            {num(cfg, "gamma_lo"), num(cfg, "gamma_hi")},
            {num(cfg, "n_lo"), num(cfg, "n_hi")}};
}

inline void set_interval_field(IntervalParameters& iv, const std::string& key, double v)
{
    if (key == "beta_lo") iv.beta.lo = v;
    else if (key == "beta_hi") iv.beta.hi = v;
    else if (key == "gamma_lo") iv.gamma.lo = v;
    else if (key == "gamma_hi") iv.gamma.hi = v;
    else if (key == "n_lo") iv.n.lo = v;
    else iv.n.hi = v;
}

[[nodiscard]] inline Table run_robust(const json& cfg)
{
    const auto kind = model_of(cfg);
    const auto base = intervals_of(cfg);
    auto cells = [&](const IntervalParameters& iv) {
        const auto wc = robust_delay_bound(kind, iv);
        const auto nom = robust_delay_bound_nominal(kind, iv);
        return std::vector<json>{rounded(wc.tau), rounded(wc.worst_case_b), cell(wc.x_star, "none"),
                                 rounded(nom.tau), cell(nom.x_star, "none")};
    };
    const std::vector<std::string> cols{"tau_rob", "b_wc", "x_star_wc", "tau_rob_nominal", "x_star_nominal"};
    Table t;
    if (!cfg.contains("sweep")) {
        t.columns = cols;
        t.rows.push_back(cells(base));
        return t;
    }
    const auto key = cfg["sweep"].get<std::string>();
    t.columns = {key};
    t.columns.insert(t.columns.end(), cols.begin(), cols.end());
    const auto grid = numeric::linspace(num(cfg, "from"), num(cfg, "to"), cfg["steps"].get<std::size_t>());
    auto rows = numeric::parallel_map(grid.size(), [&](std::size_t i) {
        IntervalParameters iv = base;
        set_interval_field(iv, key, grid[i]);
        std::vector<json> r{rounded(grid[i])};
        for (auto& c : cells(iv)) r.push_back(std::move(c));
        return r;
    });
    t.rows = std::move(rows);
    return t;
}

[[nodiscard]] inline json complex_json(const cplx& z) { return json::array({rounded(z.real()), rounded(z.imag())}); }

[[nodiscard]] inline Output run_hopf(const json& cfg)
{
    const auto kind = model_of(cfg);
    const auto p = params_of(cfg);
    const auto eq = largest_equilibrium(kind, p);
    const auto r = normal_form(kind, p, eq);
    Output out;
    std::vector<std::pair<std::string, json>> scalars{
        {"x_star", rounded(eq.x_star)},
        {"tau", rounded(r.tau)},
        {"eta", rounded(r.eta)},
        {"eta_c", rounded(r.eta_c)},
        {"omega0", rounded(r.omega0)},
        {"period", rounded(r.period)},
        {"alpha_prime", rounded(r.alpha_prime)},
        {"mu2", rounded(r.mu2)},
        {"beta2", rounded(r.beta2)},
        {"bifurcation_type", to_string(r.bifurcation_type)},
        {"orbit_stable", r.orbit_stable},
        {"mu2_at_eta_c", rounded(r.critical.mu2)},
        {"beta2_at_eta_c", rounded(r.critical.beta2)},
    };
    const std::vector<std::pair<std::string, cplx>> complexes{
        {"c1_0", r.c1_0},       {"D", r.D},
        {"g20", r.g20},         {"g11", r.g11},
        {"g02", r.g02},         {"g21", r.g21},
        {"E1", r.E1},           {"E2", r.E2},
        {"w20_at_0", r.w20_at_0}, {"w20_at_minus_tau", r.w20_at_minus_tau},
        {"w11_at_0", r.w11_at_0}, {"w11_at_minus_tau", r.w11_at_minus_tau},
        {"c1_0_at_eta_c", r.critical.c1_0},
    };
    json report = json::object();
    std::vector<json> row;
    for (const auto& [k, v] : scalars) {
        out.table.columns.push_back(k);
        row.push_back(v);
        report[k] = v;
    }
    for (const auto& [k, z] : complexes) {
        out.table.columns.push_back(k + "_re");
        out.table.columns.push_back(k + "_im");
        row.push_back(rounded(z.real()));
        row.push_back(rounded(z.imag()));
        report[k] = complex_json(z);
    }
    out.table.rows.push_back(std::move(row));
    out.report = std::move(report);
    return out;
}

[[nodiscard]] inline Trajectory run_trajectory(const json& cfg)
{
    const auto kind = model_of(cfg);
    const auto p = params_of(cfg);
    return integrate(kind, p, num(cfg, "x0"), num(cfg, "t_end"), num(cfg, "h"));
}

[[nodiscard]] inline Table run_simulate(const json& cfg)
{
    const auto tr = run_trajectory(cfg);
    const auto stride = cfg["stride"].get<std::size_t>();
    Table t{{"t", "x"}, {}};
    for (std::size_t i = 0; i < tr.size(); i += stride) t.rows.push_back({rounded(tr.t[i]), rounded(tr.x[i])});
    return t;
}

[[nodiscard]] inline Table run_phase(const json& cfg)
{
    const auto tr = run_trajectory(cfg);
    const auto stride = cfg["stride"].get<std::size_t>();
    const auto pts = phase_portrait(tr);
    Table t{{"x_t", "x_t_minus_tau"}, {}};
    for (std::size_t i = 0; i < pts.size(); i += stride) {
        t.rows.push_back({rounded(pts[i].x_t), rounded(pts[i].x_t_minus_tau)});
    }
    return t;
}

[[nodiscard]] inline Table run_bifurcate(const json& cfg)
{
    const auto kind = model_of(cfg);
    const auto p = params_of(cfg);
    const auto etas = numeric::linspace(num(cfg, "eta_from"), num(cfg, "eta_to"), cfg["steps"].get<std::size_t>());
    SweepOptions opt;
    opt.h = num(cfg, "h");
    opt.transient_fraction = num(cfg, "transient");
    Table t{{"eta", "x_min", "x_max"}, {}};
    for (const auto& r : bifurcation_sweep(kind, p, etas, opt)) {
        t.rows.push_back({rounded(r.eta), rounded(r.x_min), rounded(r.x_max)});
    }
    return t;
}

/// Cross-checks of the closed forms against the characteristic-root oracle.
[[nodiscard]] inline Table run_verify(const json& cfg)
{
    const double eta = num(cfg, "eta");
    LinearCoefficients lin;
    std::optional<ModelKind> kind;
    ModelParameters p;
    if (generic(cfg)) {
        lin = generic_lin(cfg);
    } else {
        kind = model_of(cfg);
        p = params_of(cfg);
        p.eta = eta;
        lin = linearize(*kind, p, largest_equilibrium(*kind, p));
    }
    Table t{{"check", "value", "reference", "error", "pass"}, {}};
    auto add = [&](const std::string& name, double value, double ref, double tol) {
        const double err = std::fabs(value - ref);
        t.rows.push_back({name, rounded(value), rounded(ref), rounded(err), err <= tol});
    };
    if (!lin.supports_hopf()) {
        // No crossing: the rightmost root stays in the left half-plane at every delay.
        for (double tau : {0.5, 5.0, 50.0}) {
            const double re = rightmost_root(lin, tau, eta).re;
            t.rows.push_back({"stable_at_tau_" + format_number(tau), rounded(re), 0.0, rounded(0.0), re < 0.0});
        }
        return t;
    }
    const auto crit = tau_critical(lin, eta);
    const auto at_c = rightmost_root(lin, crit.tau_c, eta);
    add("re_lambda_at_tau_c", at_c.re, 0.0, 1e-8);
    add("im_lambda_at_tau_c", at_c.im, crit.omega0, 1e-8 * std::max(1.0, crit.omega0));
    const double below = rightmost_root(lin, 0.99 * crit.tau_c, eta).re;
    const double above = rightmost_root(lin, 1.01 * crit.tau_c, eta).re;
    t.rows.push_back({"sign_flip_at_tau_c", rounded(below), rounded(above), rounded(above - below),
                      below < 0.0 && above > 0.0});
    if (eta == 1.0) {
        for (double f : {0.1, 0.25, 0.5, 0.75, 0.9}) {
            const double tau = f * crit.tau_c;
            add("sigma_vs_spectral_at_" + format_number(f) + "_tau_c", rate_of_convergence(lin, tau).sigma,
                -rightmost_root(lin, tau, 1.0).re, 1e-6);
        }
    }
    const double ap = alpha_prime(lin, crit.tau_c, eta, crit.omega0);
    const double de = 1e-6 * eta;
    const double fd = (rightmost_root(lin, crit.tau_c, eta + de).re - rightmost_root(lin, crit.tau_c, eta - de).re) /
                      (2.0 * de);
    add("alpha_prime_vs_finite_difference", ap, fd, 1e-5 * std::max(1.0, std::fabs(fd)));
    if (kind) {
        const auto eq = largest_equilibrium(*kind, p);
        double tc_cf = 0.0;
        double suff_cf = 0.0;
        if (*kind == ModelKind::MackeyGlass) {
            tc_cf = closed_form::mackey_glass_tau_c(p.beta, p.gamma, p.n) / eta;
            suff_cf = closed_form::mackey_glass_tau_suff(p.beta, p.gamma, p.n) / eta;
        } else {
            tc_cf = closed_form::lasota_tau_c(p.gamma, p.n, eq.x_star) / eta;
            suff_cf = closed_form::lasota_tau_suff(p.gamma, p.n, eq.x_star) / eta;
        }
        add("tau_c_closed_form", tc_cf, crit.tau_c, 1e-9 * crit.tau_c);
        add("tau_suff_closed_form", suff_cf, tau_sufficient(lin, eta), 1e-9 * suff_cf);
        add("period_closed_form", model_period(*kind, p, eq), crit.period, 1e-9 * crit.period);
    }
    return t;
}

}  // namespace detail

/// verify output with at least one failed check.
[[nodiscard]] inline bool has_failed_check(const Output& out)
{
    const auto& cols = out.table.columns;
    const auto it = std::find(cols.begin(), cols.end(), "pass");
    if (it == cols.end()) return false;
    const auto idx = static_cast<std::size_t>(it - cols.begin());
    return std::any_of(out.table.rows.begin(), out.table.rows.end(),
                       [&](const auto& r) { return r[idx] == false; });
}

/// Runs a resolved configuration.
[[nodiscard]] inline Output execute(const json& cfg)
{
    const auto cmd = cfg["command"].get<std::string>();
    if (cmd == "hopf") return detail::run_hopf(cfg);
    Output out;
    if (cmd == "equilibrium") out.table = detail::run_equilibrium(cfg);
    else if (cmd == "thresholds") out.table = detail::run_thresholds(cfg);
    else if (cmd == "chart") out.table = detail::run_chart(cfg);
    else if (cmd == "roc") out.table = detail::run_roc(cfg);
    else if (cmd == "robust") out.table = detail::run_robust(cfg);
    else if (cmd == "simulate") out.table = detail::run_simulate(cfg);
    else if (cmd == "phase") out.table = detail::run_phase(cfg);
    else if (cmd == "bifurcate") out.table = detail::run_bifurcate(cfg);
    else if (cmd == "verify") out.table = detail::run_verify(cfg);
    else throw UsageError("unknown command '" + cmd + "'");
    return out;
}

[[nodiscard]] inline std::string csv_cell(const json& v)
{
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    return format_number(v.get<double>());
}

inline void write(const json& cfg, const Output& out, std::ostream& os)
{
    if (cfg["format"] == "json") {
        json doc;
        doc["config"] = cfg;
        if (out.report) {
            doc["report"] = *out.report;
        } else {
            doc["columns"] = out.table.columns;
            doc["rows"] = out.table.rows;
        }
        os << doc.dump(2) << '\n';
        return;
    }
    os << "# config: " << cfg.dump() << '\n';
    for (std::size_t i = 0; i < out.table.columns.size(); ++i) {
        os << (i ? "," : "") << out.table.columns[i];
    }
    os << '\n';
    for (const auto& row : out.table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
        os << '\n';
    }
}

/// Recovers the config echoed by a previous CSV or JSON run.
[[nodiscard]] inline json config_from_output(std::istream& in)
{
    std::string first;
    std::getline(in, first);
    const std::string tag = "# config: ";
    if (first.rfind(tag, 0) == 0) return json::parse(first.substr(tag.size()));
    std::stringstream rest;
    rest << first << '\n' << in.rdbuf();
    json doc;
    try {
        doc = json::parse(rest.str());
    } catch (const json::parse_error&) {
        throw UsageError("replay file has neither a config header nor a JSON body");
    }
    if (!doc.is_object() || !doc.contains("config")) throw UsageError("replay file has no config");
    return doc["config"];
}

[[nodiscard]] inline json config_from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path + "'");
    return config_from_output(in);
}

/// Parameter sets of the published figures.
[[nodiscard]] inline const std::map<std::string, json>& presets()
{
    static const std::map<std::string, json> table = [] {
        const json mg = {{"model", "mackey-glass"}, {"beta", 0.8}, {"gamma", 0.3}, {"n", 10.0}};
        const json ls = {{"model", "lasota"}, {"beta", 0.9}, {"gamma", 0.1}, {"n", 0.1}};
        auto with = [](json base, const json& extra) {
            base.update(extra);
            return base;
        };
        std::map<std::string, json> m;
        m["fig1"] = {{"command", "chart"}, {"generic", true}, {"sweep", "a"}, {"tau", 1.0},
                     {"from", 0.0}, {"to", 3.0}, {"steps", 301}};
        m["fig2a"] = with(mg, {{"command", "chart"}, {"sweep", "beta"}, {"from", 0.5}, {"to", 1.0}});
        m["fig2b"] = with(ls, {{"command", "chart"}, {"sweep", "beta"}, {"from", 0.5}, {"to", 1.0}});
        m["fig2c"] = with(mg, {{"command", "chart"}, {"sweep", "n"}, {"from", 10.0}, {"to", 100.0}});
        m["fig2d"] = with(ls, {{"command", "chart"}, {"sweep", "n"}, {"from", 0.001}, {"to", 1.0}});
        m["fig3a"] = with(mg, {{"command", "simulate"}, {"tau", 1.3}, {"x0", 0.5}, {"t_end", 200.0}});
        m["fig3a-noc"] = with(mg, {{"command", "simulate"}, {"tau", 0.1}, {"x0", 0.5}, {"t_end", 200.0}});
        m["fig3a-damped"] = with(mg, {{"command", "simulate"}, {"tau", 0.6}, {"x0", 0.5}, {"t_end", 200.0}});
        m["fig3b"] = with(ls, {{"command", "simulate"}, {"tau", 21.69}, {"x0", 0.5}, {"t_end", 3000.0},
                               {"h", 0.1}});
        m["fig3b-noc"] = with(ls, {{"command", "simulate"}, {"tau", 1.0}, {"x0", 0.5}, {"t_end", 3000.0},
                                   {"h", 0.1}});
        m["fig3b-damped"] = with(ls, {{"command", "simulate"}, {"tau", 8.0}, {"x0", 0.5}, {"t_end", 3000.0},
                                      {"h", 0.1}});
        m["period-a"] = with(mg, {{"command", "chart"}, {"sweep", "beta"}, {"from", 0.5}, {"to", 1.0}});
        m["period-b"] = with(mg, {{"command", "chart"}, {"sweep", "gamma"}, {"from", 0.05}, {"to", 0.6}});
        m["period-c"] = with(ls, {{"command", "chart"}, {"sweep", "beta"}, {"from", 0.5}, {"to", 1.0}});
        m["period-d"] = with(ls, {{"command", "chart"}, {"sweep", "gamma"}, {"from", 0.05}, {"to", 0.3}});
        m["fig4a"] = with(mg, {{"command", "roc"}, {"from", 0.0}, {"to", 0.5}, {"steps", 200}});
        m["fig4b"] = {{"command", "roc"}, {"model", "lasota"}, {"beta", 0.4}, {"gamma", 0.3}, {"n", 0.1},
                      {"from", 0.0}, {"to", 5.0}, {"steps", 200}};
        m["fig5a"] = {{"command", "robust"}, {"model", "mackey-glass"}, {"beta_lo", 0.1}, {"beta_hi", 2.0},
                      {"gamma_lo", 0.1}, {"gamma_hi", 2.0}, {"n_lo", 7.0}, {"n_hi", 7.0},
                      {"sweep", "n_hi"}, {"from", 7.0}, {"to", 20.0}, {"steps", 131}};
        m["fig5b"] = {{"command", "robust"}, {"model", "lasota"}, {"beta_lo", 0.1}, {"beta_hi", 2.0},
                      {"gamma_lo", 0.1}, {"gamma_hi", 2.0}, {"n_lo", 0.1}, {"n_hi", 0.9},
                      {"sweep", "n_lo"}, {"from", 0.1}, {"to", 0.9}, {"steps", 81}};
        m["fig6"] = with(mg, {{"command", "bifurcate"}, {"eta_from", 0.9}, {"eta_to", 1.2}, {"steps", 31}});
        m["fig7a"] = with(mg, {{"command", "phase"}, {"tau", 1.0}, {"x0", 0.5}, {"t_end", 200.0}});
        m["fig7b"] = with(mg, {{"command", "phase"}, {"tau", 1.3}, {"x0", 0.5}, {"t_end", 200.0}});
        m["fig9"] = with(ls, {{"command", "bifurcate"}, {"eta_from", 0.9}, {"eta_to", 1.2}, {"steps", 31}});
        m["fig10a"] = with(ls, {{"command", "phase"}, {"tau", 13.69}, {"x0", 0.5}, {"t_end", 3000.0},
                                {"h", 0.1}});
        m["fig10b"] = with(ls, {{"command", "phase"}, {"tau", 21.69}, {"x0", 0.5}, {"t_end", 3000.0},
                                {"h", 0.1}});
        return m;
    }();
    return table;
}

[[nodiscard]] inline json preset(const std::string& name)
{
    const auto& all = presets();
    const auto it = all.find(name);
    if (it == all.end()) throw UsageError("unknown preset '" + name + "'");
    return it->second;
}

}  // namespace hemostab::cli
