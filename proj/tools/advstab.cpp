#include <advstab/dynamics.hpp>
#include <advstab/eigensolver.hpp>
#include <advstab/error.hpp>
#include <advstab/outputs.hpp>
#include <advstab/parallel.hpp>
#include <advstab/report.hpp>
#include <advstab/scenario.hpp>
#include <advstab/stability.hpp>
#include <advstab/steady.hpp>
#include <advstab/thresholds.hpp>
#include <advstab/validation.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <thread>

using namespace advstab;
namespace fs = std::filesystem;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_input = 1;
constexpr int exit_validation = 2;

/// Flags shared by every subcommand. Unset optionals fall back to the scenario.
struct Common {
    std::string scenario;
    std::optional<int> grid_n;
    std::string out;
    std::string format = "csv";
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::optional<std::string> r, K;
    std::optional<double> b, gamma, mu, nu, q;
    std::optional<double> T, dt;
};

void add_common(CLI::App* sub, Common& c, bool jobs) {
    sub->add_option("--scenario", c.scenario, "Scenario file ([profiles], [rates], [ranges])");
    sub->add_option("--grid-n", c.grid_n, "Number of grid cells (>= 16)");
    sub->add_option("--out", c.out, "Output directory; stdout when absent");
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--r", c.r, "Growth rate profile r(x): expression or CSV path");
    sub->add_option("--K", c.K, "Carrying capacity profile K(x): expression or CSV path");
    sub->add_option("--b", c.b, "Conversion rate b");
    sub->add_option("--gamma", c.gamma, "Predator death rate γ");
    sub->add_option("--mu", c.mu, "Prey diffusion μ");
    sub->add_option("--nu", c.nu, "Predator diffusion ν");
    sub->add_option("--q", c.q, "Advection rate q");
    if (jobs) sub->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

Scenario resolve(const Common& c) {
    Scenario s = c.scenario.empty() ? Scenario{} : load_scenario(c.scenario);
    if (c.grid_n) s.grid_n = *c.grid_n;
    if (c.r) {
        s.r_source = *c.r;
        s.r = load_profile(*c.r, fs::current_path());
    }
    if (c.K) {
        s.k_source = *c.K;
        s.K = load_profile(*c.K, fs::current_path());
    }
    if (c.b) s.b = *c.b;
    if (c.gamma) s.gamma = *c.gamma;
    if (c.mu) s.mu = c.mu;
    if (c.nu) s.nu = c.nu;
    if (c.q) s.q = c.q;
    if (c.T) s.T = *c.T;
    if (c.dt) s.dt = c.dt;
    s.validate();
    return s;
}

double require(const std::optional<double>& v, const char* name) {
    if (!v) throw InputError("cli", std::string("--") + name + " is required (flag or scenario)");
    return *v;
}

void describe(Report& rep, const Scenario& s) {
    auto& m = rep.meta();
    m["r"] = s.r_source;
    m["K"] = s.k_source;
    m["grid_n"] = s.grid_n;
}

void emit(const Report& rep, const std::string& command, const Common& c) {
    const Format f = parse_format(c.format);
    const std::string text = rep.render(f);
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::error_code ec;
    fs::create_directories(c.out, ec);
    if (ec) throw InputError("cli", "cannot create output directory " + c.out + ": " + ec.message());
    const fs::path path = fs::path(c.out) / (command + "." + format_extension(f));
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InputError("cli", "cannot write " + path.string());
    os << text;
}

std::vector<double> node_list(const Grid& g) { return {g.nodes().begin(), g.nodes().end()}; }

int cmd_eigen(const Common& c, std::optional<std::string> h_src) {
    const Scenario s = resolve(c);
    const Grid g(s.grid_n);
    const double d = require(s.mu, "mu");
    const double q = s.q.value_or(0.0);
    const Profile h = h_src ? load_profile(*h_src, fs::current_path()) : s.r;
    const auto pair = principal_eigen(assemble(d, q, h, g));
    Report rep("eigen");
    describe(rep, s);
    auto& m = rep.meta();
    m["h"] = h_src ? *h_src : s.r_source;
    m["d"] = d;
    m["q"] = q;
    m["sigma1"] = pair.sigma1;
    m["method"] = method_name(pair.method);
    m["iterations"] = pair.iterations;
    m["residual"] = pair.residual;
    rep.add_column("x", node_list(g));
    rep.add_column("phi1", pair.phi1);
    emit(rep, "eigen", c);
    return exit_ok;
}

int cmd_steady(const Common& c) {
    const Scenario s = resolve(c);
    const Habitat hab = s.habitat();
    const double mu = require(s.mu, "mu");
    const double q = s.q.value_or(0.0);
    const double qs = find_qstar(mu, hab.r_nodes, hab.grid).qstar;
    const auto eta = solve_eta(mu, hab);
    const auto theta = solve_theta(mu, q, hab, qs);
    Report rep("steady");
    describe(rep, s);
    auto& m = rep.meta();
    m["mu"] = mu;
    m["q"] = q;
    m["qstar"] = qs;
    m["theta_max"] = sup_norm(theta.field);
    m["theta_integral"] = hab.grid.integrate(theta.field);
    m["eta_integral"] = hab.grid.integrate(eta.field);
    m["residual"] = theta.residual;
    m["flux_identity_residual"] = flux_identity_residual(theta, hab);
    m["newton_iters"] = theta.newton_iters;
    m["continuation_steps"] = theta.continuation_steps;
    rep.add_column("x", node_list(hab.grid));
    rep.add_column("r", hab.r_nodes);
    rep.add_column("K", hab.k_nodes);
    rep.add_column("eta", eta.field);
    rep.add_column("theta", theta.field);
    emit(rep, "steady", c);
    return exit_ok;
}

int cmd_qstar(const Common& c) {
    const Scenario s = resolve(c);
    const Habitat hab = s.habitat();
    const auto mus = s.mu ? std::vector<double>{*s.mu} : s.mu_samples();
    std::vector<double> qs(mus.size()), width(mus.size()), sig(mus.size());
    parallel_for(mus.size(), c.jobs, [&](std::size_t i) {
        const auto w = find_qstar(mus[i], hab.r_nodes, hab.grid);
        qs[i] = w.qstar;
        width[i] = w.bracket_width;
        sig[i] = w.sigma_at_qstar;
    });
    Report rep("qstar");
    describe(rep, s);
    rep.add_column("mu", mus);
    rep.add_column("qstar", qs);
    rep.add_column("bracket_width", width);
    rep.add_column("sigma_at_qstar", sig);
    emit(rep, "qstar", c);
    return exit_ok;
}

int cmd_thresholds(const Common& c) {
    const Scenario s = resolve(c);
    const Habitat hab = s.habitat();
    const auto t = gamma_thresholds(s.b, hab, default_mu_range(), c.jobs);
    Report rep("thresholds");
    describe(rep, s);
    auto& m = rep.meta();
    m["b"] = s.b;
    m["gamma"] = s.gamma;
    m["regime"] = regime_name(gamma_regime(s.gamma, t));
    m["gamma1"] = t.gamma1;
    m["gamma2"] = t.gamma2;
    m["gamma3"] = t.gamma3;
    m["gamma4"] = t.gamma4;
    m["gamma3_mu"] = t.gamma3_mu;
    m["gamma3_from_limit"] = t.gamma3_from_limit;
    std::vector<double> mu, integral, maximum;
    for (const auto& e : t.mu_grid_used) {
        mu.push_back(e.mu);
        integral.push_back(e.integral);
        maximum.push_back(e.maximum);
    }
    rep.add_column("mu", mu);
    rep.add_column("eta_integral", integral);
    rep.add_column("eta_max", maximum);
    emit(rep, "thresholds", c);
    return exit_ok;
}

nlohmann::ordered_json certificate(const RootCertificate& r) {
    if (!r.found) return nullptr;
    return {{"value", r.value}, {"lo", r.lo}, {"hi", r.hi}, {"f_lo", r.f_lo}, {"f_hi", r.f_hi}};
}

int cmd_lambda_star(const Common& c) {
    const Scenario s = resolve(c);
    const Habitat hab = s.habitat();
    Report rep("lambda-star");
    describe(rep, s);
    auto& m = rep.meta();
    m["b"] = s.b;
    m["gamma"] = s.gamma;
    if (s.mu) {
        const auto l = lambda_star(*s.mu, s.b, s.gamma, hab);
        m["mu"] = *s.mu;
        m["defined"] = l.defined;
        if (l.defined) {
            m["lambda_star"] = l.value;
            m["residual"] = l.residual;
        }
        m["weight_integral"] = l.weight_integral;
        if (l.defined && !l.psi.empty()) {
            rep.add_column("x", node_list(hab.grid));
            rep.add_column("psi", l.psi);
        }
        emit(rep, "lambda-star", c);
        return exit_ok;
    }
    RootOptions ro;
    ro.jobs = c.jobs;
    const auto roots = structural_roots(s.b, s.gamma, hab, s.mu_samples(), ro);
    m["mu_star"] = certificate(roots.mu_star);
    m["mu_hat"] = certificate(roots.mu_hat);
    m["nu_star"] = roots.nu_star ? nlohmann::ordered_json(*roots.nu_star) : nullptr;
    m["nu_hat"] = roots.nu_hat ? nlohmann::ordered_json(*roots.nu_hat) : nullptr;
    std::vector<double> mu, value;
    std::vector<std::string> defined;
    for (const auto& l : roots.lambda_table) {
        mu.push_back(l.mu);
        defined.push_back(l.defined ? "true" : "false");
        value.push_back(l.defined ? l.value : std::numeric_limits<double>::quiet_NaN());
    }
    rep.add_column("mu", mu);
    rep.add_column("defined", defined);
    rep.add_column("lambda_star", value);
    emit(rep, "lambda-star", c);
    return exit_ok;
}

int cmd_classify(const Common& c) {
    const Scenario s = resolve(c);
    const Habitat hab = s.habitat();
    const double mu = require(s.mu, "mu");
    const double q = require(s.q, "q");
    require(s.nu, "nu");
    const auto v = classify(mu, q, s.predator(), hab);
    Report rep("classify");
    describe(rep, s);
    auto& m = rep.meta();
    m["mu"] = v.mu;
    m["nu"] = v.nu;
    m["q"] = v.q;
    m["b"] = s.b;
    m["gamma"] = s.gamma;
    m["qstar"] = v.qstar;
    m["sigma"] = v.sigma;
    m["verdict"] = verdict_name(v.verdict);
    m["margin"] = v.margin;
    emit(rep, "classify", c);
    return exit_ok;
}

int cmd_critical_q(const Common& c) {
    const Scenario s = resolve(c);
    const Habitat hab = s.habitat();
    const auto mus = s.mu ? std::vector<double>{*s.mu} : s.mu_samples();
    const Predator p = s.predator();
    std::vector<CriticalQ> out(mus.size());
    parallel_for(mus.size(), c.jobs, [&](std::size_t i) { out[i] = critical_q(mus[i], p, hab); });
    std::vector<double> qs, sig0, value, lo, hi;
    std::vector<std::string> exists;
    for (const auto& r : out) {
        qs.push_back(r.qstar);
        sig0.push_back(r.sigma_at_zero);
        exists.push_back(r.exists ? "true" : "false");
        value.push_back(r.exists ? r.value : std::numeric_limits<double>::quiet_NaN());
        lo.push_back(r.exists ? r.lo : std::numeric_limits<double>::quiet_NaN());
        hi.push_back(r.exists ? r.hi : std::numeric_limits<double>::quiet_NaN());
    }
    Report rep("critical-q");
    describe(rep, s);
    auto& m = rep.meta();
    m["nu"] = p.nu;
    m["b"] = p.b;
    m["gamma"] = p.gamma;
    rep.add_column("mu", mus);
    rep.add_column("qstar", qs);
    rep.add_column("sigma_at_zero", sig0);
    rep.add_column("exists", exists);
    rep.add_column("q_tilde", value);
    rep.add_column("q_lo", lo);
    rep.add_column("q_hi", hi);
    emit(rep, "critical-q", c);
    return exit_ok;
}

int cmd_sweep(const Common& c, const std::string& layout) {
    const Scenario s = resolve(c);
    const Habitat hab = s.habitat();
    const RegionLayout l = parse_layout(layout);
    SweepOptions so;
    so.jobs = c.jobs;
    so.q_resolution = s.q_resolution;
    so.q_low_fraction = s.q_low_fraction;
    so.q_high_fraction = s.q_high_fraction;
    const auto map = sweep_region(s.mu_samples(), s.predator(), hab, so);
    const auto t = gamma_thresholds(s.b, hab, default_mu_range(), c.jobs);
    Report rep = sweep_report(map, t, l);
    describe(rep, s);
    emit(rep, "sweep", c);
    return exit_ok;
}

int cmd_simulate(const Common& c, bool invasion, double v0) {
    const Scenario s = resolve(c);
    const Habitat hab = s.habitat();
    const double mu = require(s.mu, "mu");
    const double q = s.q.value_or(0.0);
    Report rep("simulate");
    describe(rep, s);
    auto& m = rep.meta();
    m["mu"] = mu;
    m["q"] = q;
    if (invasion) {
        require(s.nu, "nu");
        InvasionOptions io;
        io.T = s.T;
        const auto r = invasion_test(mu, q, s.predator(), hab, io);
        const auto v = classify(mu, q, s.predator(), hab);
        m["nu"] = s.predator().nu;
        m["b"] = s.b;
        m["gamma"] = s.gamma;
        m["rate"] = r.rate;
        m["rate_dt"] = r.rate_dt;
        m["rate_half_dt"] = r.rate_half_dt;
        m["sigma"] = v.sigma;
        m["fit_start"] = r.fit_start;
        m["fit_end"] = r.fit_end;
        m["fit_points"] = r.fit_points;
        m["eps"] = r.eps;
        m["dt"] = r.dt;
        m["retried"] = r.retried;
        emit(rep, "simulate", c);
        return exit_ok;
    }
    TimeOptions to;
    to.T = s.T;
    to.dt = s.dt.value_or(0.0);
    const Trajectory tr = s.nu ? integrate_system(mu, q, s.predator(), hab, hab.k_nodes,
                                                  std::vector<double>(hab.k_nodes.size(), v0), to)
                               : integrate_single(mu, q, hab, hab.k_nodes, to);
    m["T"] = s.T;
    m["dt"] = tr.dt_used;
    m["steps"] = tr.steps;
    m["u_mass_final"] = tr.u_mass.back();
    if (tr.has_predator()) {
        m["nu"] = s.predator().nu;
        m["v0"] = v0;
        m["v_mass_final"] = tr.v_mass.back();
        m["final_rate"] = tr.final_rate;
    }
    std::vector<double> t, x, u, v;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        for (int i = 0; i < hab.grid.size(); ++i) {
            const auto j = static_cast<std::size_t>(i);
            t.push_back(tr.times[k]);
            x.push_back(hab.grid.node(i));
            u.push_back(tr.u_fields[k][j]);
            v.push_back(tr.has_predator() ? tr.v_fields[k][j] : 0.0);
        }
    }
    rep.add_column("t", t);
    rep.add_column("x", x);
    rep.add_column("u", u);
    rep.add_column("v", v);
    emit(rep, "simulate", c);
    return exit_ok;
}

int cmd_validate(const Common& c, bool quick, const std::vector<int>& only) {
    ValidationOptions vo;
    vo.grid_n = quick ? 128 : c.grid_n.value_or(256);
    vo.jobs = c.jobs;
    vo.only = only;
    vo.on_result = [](const CriterionResult& r) { std::cout << format_result(r) << std::endl; };
    const auto results = run_validation(vo);
    std::vector<double> id;
    std::vector<std::string> name, status, detail;
    int passed = 0;
    for (const auto& r : results) {
        id.push_back(r.id);
        name.push_back(r.name);
        status.push_back(r.passed ? "PASS" : "FAIL");
        detail.push_back(r.detail);
        passed += r.passed ? 1 : 0;
    }
    std::cout << passed << "/" << results.size() << " criteria passed\n";
    if (!c.out.empty()) {
        Report rep("validate");
        rep.meta()["grid_n"] = vo.grid_n;
        rep.meta()["passed"] = passed;
        rep.meta()["total"] = results.size();
        rep.add_column("id", id);
        rep.add_column("name", name);
        rep.add_column("status", status);
        rep.add_column("detail", detail);
        emit(rep, "validate", c);
    }
    return passed == static_cast<int>(results.size()) ? exit_ok : exit_validation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stability of the prey-only state in an advective habitat"};
    app.require_subcommand(1);
    Common c;

    auto* eigen = app.add_subcommand("eigen", "Principal eigenpair of d φ'' - q φ' + h φ (d = --mu, h = --potential or r)");
    add_common(eigen, c, false);
    std::optional<std::string> h_src;
    eigen->add_option("--potential", h_src, "Potential h(x): expression or CSV path");

    auto* steady = app.add_subcommand("steady", "Steady states η (q = 0) and θ(μ, q)");
    add_common(steady, c, false);
    auto* qstar = app.add_subcommand("qstar", "Washout threshold q*(μ) at --mu or over the μ range");
    add_common(qstar, c, true);
    auto* thresholds = app.add_subcommand("thresholds", "γ₁..γ₄ and the γ regime");
    add_common(thresholds, c, true);
    auto* lstar = app.add_subcommand("lambda-star", "λ*(μ) at --mu, or the scan with ν*, ν̂, μ*, μ̂");
    add_common(lstar, c, true);
    auto* classify_cmd = app.add_subcommand("classify", "Stability of (θ, 0) at one (μ, ν, q)");
    add_common(classify_cmd, c, false);
    auto* crit = app.add_subcommand("critical-q", "Critical advection q̃(μ) where the verdict flips");
    add_common(crit, c, true);
    auto* sweep = app.add_subcommand("sweep", "Stability region over (μ, q)");
    add_common(sweep, c, true);
    std::string layout = "long";
    sweep->add_option("--layout", layout, "long or matrix")->check(CLI::IsMember({"long", "matrix"}));
    auto* simulate = app.add_subcommand("simulate", "Time integration from (K, v0), or the invasion test");
    add_common(simulate, c, false);
    bool invasion = false;
    double v0 = 0.01;
    simulate->add_flag("--invasion", invasion, "Fit the predator growth rate near (θ, 0)");
    simulate->add_option("--T", c.T, "Final time");
    simulate->add_option("--dt", c.dt, "Time step (default min(0.1, 0.5 / reaction slope))");
    simulate->add_option("--v0", v0, "Initial predator density when --nu is set");
    auto* validate = app.add_subcommand("validate", "Run the acceptance criteria");
    add_common(validate, c, true);
    bool quick = false;
    std::vector<int> only;
    validate->add_flag("--quick", quick, "Use n = 128 grids");
    validate->add_option("--only", only, "Criterion ids to run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }

    try {
        if (*eigen) return cmd_eigen(c, h_src);
        if (*steady) return cmd_steady(c);
        if (*qstar) return cmd_qstar(c);
        if (*thresholds) return cmd_thresholds(c);
        if (*lstar) return cmd_lambda_star(c);
        if (*classify_cmd) return cmd_classify(c);
        if (*crit) return cmd_critical_q(c);
        if (*sweep) return cmd_sweep(c, layout);
        if (*simulate) return cmd_simulate(c, invasion, v0);
        if (*validate) return cmd_validate(c, quick, only);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_input;
    }
    return exit_input;
}
