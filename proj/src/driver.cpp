#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qnls/blowup.hpp"
#include "qnls/config.hpp"
#include "qnls/dynamics.hpp"
#include "qnls/snapshot.hpp"

namespace qnls {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Report {
    std::ofstream os;
    bool ok = true;

    Report(const RunConfig& cfg, const std::string& name) {
        std::filesystem::create_directories(cfg.out_dir);
        os.open(cfg.out_dir + "/" + name);
        if (!os) throw Error("cannot open report file in " + cfg.out_dir);
        char hash[20];
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cfg.hash));
        os << "experiment = " << cfg.kind << "\n";
        os << "config_hash = " << hash << "\n";
        for (const auto& [k, v] : cfg.kv)
            if (k.rfind("grid.", 0) == 0 || k.rfind("radial.", 0) == 0)
                os << k << " = " << v << "\n";
        os << "\n";
    }

    void line(const std::string& key, double v) { os << key << " = " << fmt17(v) << "\n"; }
    void line(const std::string& key, const std::string& v) { os << key << " = " << v << "\n"; }
    void check(const std::string& name, bool pass) {
        os << "check " << name << " : " << (pass ? "pass" : "FAIL") << "\n";
        ok = ok && pass;
    }
};

Grid tensor_grid(const RunConfig& cfg) {
    return Grid(cfg.integer("grid.dim"), cfg.integer("grid.n"), cfg.num("grid.length"));
}

RadialGrid radial_grid(const RunConfig& cfg) {
    return RadialGrid(cfg.integer("radial.dim", 4), cfg.integer("radial.nr"),
                      cfg.num("radial.r_max"));
}

PhysicalParams params_of(const RunConfig& cfg) {
    return PhysicalParams(cfg.num("params.kappa"));
}

EvolveConfig evolve_config(const RunConfig& cfg) {
    EvolveConfig ec;
    ec.dt = cfg.num("evolve.dt");
    ec.t_end = cfg.num("evolve.t_end");
    ec.diag_stride = cfg.integer("evolve.diag_stride", 10);
    ec.blowup_K_factor = cfg.num("evolve.blowup_K_factor", 1e4);
    ec.dt_floor = cfg.num("evolve.dt_floor", 1e-8);
    ec.track_variance = cfg.integer("evolve.track_variance", 0) != 0;
    ec.ball_radius = cfg.num("evolve.ball_radius", 0.0);
    return ec;
}

void write_csv(const RunConfig& cfg, const std::string& name,
               const std::vector<DiagnosticsRecord>& diags) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream os(cfg.out_dir + "/" + name);
    os << "t,M,E,K,P,variance,virial_first,ball_mass\n";
    auto opt = [](const std::optional<double>& v) { return v ? fmt17(*v) : std::string(); };
    for (const auto& d : diags)
        os << fmt17(d.t) << ',' << fmt17(d.M) << ',' << fmt17(d.E) << ',' << fmt17(d.K) << ','
           << fmt17(d.P) << ',' << opt(d.variance) << ',' << opt(d.virial_first) << ','
           << opt(d.ball_mass) << "\n";
}

FieldPair initial_data(const RunConfig& cfg, const GridVar& gv) {
    const std::string kind = cfg.str("init.kind", "gaussian");
    if (kind == "file") return load_snapshot(cfg.str("init.file"));
    if (kind != "gaussian") throw ConfigError("init.kind must be gaussian or file");
    const double au = cfg.num("init.amp_u", 1.0);
    const double av = cfg.num("init.amp_v", 1.0);
    const double w = cfg.num("init.width", 1.0);
    if (std::holds_alternative<RadialGrid>(gv)) {
        const RadialGrid& rg = std::get<RadialGrid>(gv);
        ComplexField u(rg), v(rg);
        for (int j = 0; j < rg.nr; ++j) {
            const double q = rg.node(j) / w;
            u.val[j] = au * std::exp(-q * q);
            v.val[j] = av * std::exp(-q * q);
        }
        return FieldPair(std::move(u), std::move(v));
    }
    const Grid& g = std::get<Grid>(gv);
    ComplexField u(g), v(g);
    const int n = g.n;
    const std::size_t nn = static_cast<std::size_t>(n);
    auto set = [&](std::size_t p, double r2) {
        u.val[p] = au * std::exp(-r2 / (w * w));
        v.val[p] = av * std::exp(-r2 / (w * w));
    };
    if (g.dim == 1) {
        for (int i = 0; i < n; ++i) set(i, g.coord(i) * g.coord(i));
    } else if (g.dim == 2) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                set(i * nn + j, g.coord(i) * g.coord(i) + g.coord(j) * g.coord(j));
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int l = 0; l < n; ++l)
                    set((i * nn + j) * nn + l, g.coord(i) * g.coord(i) +
                                                   g.coord(j) * g.coord(j) +
                                                   g.coord(l) * g.coord(l));
    }
    return FieldPair(std::move(u), std::move(v));
}

void report_ground_state(Report& rep, const GroundStateResult& gs) {
    rep.line("energy_value", gs.energy_value);
    rep.line("omega1", gs.omega1);
    rep.line("omega2", gs.omega2);
    rep.line("mass", gs.functionals.M);
    rep.line("kinetic", gs.functionals.K);
    rep.line("interaction", gs.functionals.P);
    rep.line("residual_inf", gs.residual_inf);
    rep.line("pohozaev_defect_1", gs.pohozaev_defects[0]);
    rep.line("pohozaev_defect_2", gs.pohozaev_defects[1]);
    rep.line("pohozaev_defect_3", gs.pohozaev_defects[2]);
    rep.line("iterations", static_cast<double>(gs.iterations));
    rep.line("boundary_decay", boundary_decay_ratio(gs.fields));
}

int cmd_ground_state(const RunConfig& cfg) {
    Report rep(cfg, "report.txt");
    const Grid g = tensor_grid(cfg);
    const PhysicalParams pp = params_of(cfg);
    GroundStateResult gs;
    bool total = cfg.has("constraint.c");
    if (total)
        gs = minimize_J(cfg.num("constraint.c"), g, pp);
    else
        gs = minimize_I(cfg.num("constraint.a"), cfg.num("constraint.b"), g, pp);
    report_ground_state(rep, gs);
    save_snapshot(cfg.out_dir + "/ground.qnls", gs.fields, {pp.kappa, 0.0});
    rep.check("energy_negative", gs.energy_value < 0);
    if (total) {
        rep.check("multiplier_ratio", std::abs(gs.omega2 - 2.0 * gs.omega1) < 1e-6 * gs.omega1 &&
                                          gs.omega1 > 0);
        rep.check("pohozaev", gs.pohozaev_defects[0] < 1e-6 && gs.pohozaev_defects[1] < 1e-6 &&
                                  gs.pohozaev_defects[2] < 1e-6);
    }
    return rep.ok ? 0 : 1;
}

int cmd_gn_constant(const RunConfig& cfg) {
    Report rep(cfg, "report.txt");
    const RadialGrid rg = radial_grid(cfg);
    const PhysicalParams pp = params_of(cfg);
    GNReport gn = gn_constant(rg, pp);
    const double J = weinstein(gn.ground_pair, pp);
    rep.line("M_gs", gn.M_gs);
    rep.line("M_gs_minus_quarter", gn.M_gs - 0.25);
    rep.line("C_opt", gn.C_opt);
    rep.line("weinstein_ground", J);
    const double rel = std::abs(J * gn.C_opt - 1.0);
    rep.line("sharpness_rel_error", rel);
    rep.line("boundary_decay", boundary_decay_ratio(gn.ground_pair));
    save_snapshot(cfg.out_dir + "/ground.qnls", gn.ground_pair, {pp.kappa, 0.0});
    rep.check("sharp_constant", rel < 1e-6);
    return rep.ok ? 0 : 1;
}

int cmd_evolve(const RunConfig& cfg) {
    Report rep(cfg, "report.txt");
    const PhysicalParams pp = params_of(cfg);
    GridVar gv = cfg.has("grid.n") ? GridVar(tensor_grid(cfg)) : GridVar(radial_grid(cfg));
    FieldPair fp0 = initial_data(cfg, gv);
    rep.line("boundary_decay_initial", boundary_decay_ratio(fp0));
    EvolveResult ev = evolve(fp0, pp, evolve_config(cfg));
    write_csv(cfg, "diagnostics.csv", ev.diags);
    save_snapshot(cfg.out_dir + "/final.qnls", ev.final, {pp.kappa, ev.t_stop});
    const double M0 = ev.diags.front().M, E0 = ev.diags.front().E;
    double dM = 0, dE = 0;
    for (const auto& d : ev.diags) {
        dM = std::max(dM, std::abs(d.M - M0) / M0);
        dE = std::max(dE, std::abs(d.E - E0) / std::max(1.0, std::abs(E0)));
    }
    rep.line("t_stop", ev.t_stop);
    rep.line("status", ev.status == EvolveStatus::Completed      ? "completed"
                       : ev.status == EvolveStatus::BlowupDetected ? "blowup-detected"
                                                                   : "step-floor-reached");
    rep.line("mass_drift_rel", dM);
    rep.line("energy_drift_rel", dE);
    if (ev.status == EvolveStatus::Completed) {
        rep.check("mass_conservation", dM < cfg.num("evolve.mass_tol", 1e-10));
        rep.check("energy_conservation", dE < cfg.num("evolve.energy_tol", 1e-8));
    }
    return rep.ok ? 0 : 1;
}

int cmd_stability(const RunConfig& cfg) {
    Report rep(cfg, "report.txt");
    const Grid g = tensor_grid(cfg);
    const PhysicalParams pp = params_of(cfg);
    GroundStateResult gs = minimize_J(cfg.num("constraint.c"), g, pp);
    report_ground_state(rep, gs);
    const double eps = cfg.num("stability.eps");
    StabilityResult sr = stability_experiment(gs, eps, pp, evolve_config(cfg));
    rep.line("eps", eps);
    rep.line("initial_distance", sr.initial_dist);
    rep.line("max_distance", sr.max_dist);
    if (eps == 0.0)
        rep.check("orbit_stationary", sr.max_dist < 1e-6);
    else
        rep.check("orbital_stability", sr.max_dist < 10.0 * sr.initial_dist);
    return rep.ok ? 0 : 1;
}

int cmd_blowup_demo(const RunConfig& cfg) {
    Report rep(cfg, "report.txt");
    const RadialGrid rg = radial_grid(cfg);
    const PhysicalParams pp = params_of(cfg);
    FieldPair seed = negative_energy_seed(rg, pp, cfg.num("seed.margin", 0.1));
    FunctionalReport fr = energy(seed, pp);
    rep.line("seed_mass", fr.M);
    rep.line("seed_energy", fr.E);
    EvolveResult ev = evolve(seed, pp, evolve_config(cfg));
    write_csv(cfg, "diagnostics.csv", ev.diags);
    rep.line("t_stop", ev.t_stop);
    rep.check("blowup_flagged", ev.status == EvolveStatus::BlowupDetected);
    if (auto fit = blowup_detect(ev.diags)) {
        rep.line("T_est", fit->T_est);
        rep.line("rate_exponent", fit->rate_exponent);
    }
    return rep.ok ? 0 : 1;
}

int cmd_minimal_mass(const RunConfig& cfg) {
    Report rep(cfg, "report.txt");
    const RadialGrid rg = radial_grid(cfg);
    const PhysicalParams pp = params_of(cfg);
    GNReport gn = gn_constant(rg, pp);
    MinimalMassReport mm = minimal_mass_experiment(gn, cfg.num("family.T", 1.0),
                                                   evolve_config(cfg), pp,
                                                   cfg.num("family.ball_radius", 0.1));
    rep.line("M_gs", gn.M_gs);
    rep.line("status", mm.status == EvolveStatus::Completed      ? "completed"
                       : mm.status == EvolveStatus::BlowupDetected ? "blowup-detected"
                                                                   : "step-floor-reached");
    rep.line("mass_error", mm.mass_error);
    rep.line("T_est", mm.T_est);
    rep.line("rate_exponent", mm.rate_exponent);
    for (int k = 0; k < 3; ++k)
        rep.line("variance_identity_resid_" + std::to_string(k + 1),
                 mm.variance_identity_resid[k]);
    rep.line("peak_ball_fraction", mm.peak_ball_fraction);
    auto dump_curve = [&](const std::string& name,
                          const std::vector<std::pair<double, double>>& curve) {
        std::ofstream os(cfg.out_dir + "/" + name);
        os << "t,ball_mass\n";
        for (const auto& [t, b] : curve) os << fmt17(t) << ',' << fmt17(b) << "\n";
    };
    dump_curve("ball_mass_numeric.csv", mm.ball_curve_numeric);
    dump_curve("ball_mass_analytic.csv", mm.ball_curve_analytic);
    rep.check("mass_constant", mm.mass_error < 1e-8 * gn.M_gs);
    rep.check("rate_exponent", std::abs(mm.rate_exponent + 2.0) < 0.1);
    rep.check("variance_identity",
              mm.variance_identity_resid[0] < 0.01 && mm.variance_identity_resid[1] < 0.01 &&
                  mm.variance_identity_resid[2] < 0.01);
    rep.check("ball_concentration", mm.peak_ball_fraction >= 0.95);
    return rep.ok ? 0 : 1;
}

int cmd_scan_subadditivity(const RunConfig& cfg) {
    Report rep(cfg, "report.txt");
    const Grid g = tensor_grid(cfg);
    const PhysicalParams pp = params_of(cfg);
    std::vector<std::pair<double, double>> pairs;
    std::istringstream ps(cfg.str("scan.pairs"));
    std::string tok;
    while (std::getline(ps, tok, ';')) {
        const auto comma = tok.find(',');
        if (comma == std::string::npos) throw ConfigError("scan.pairs: expected a,b;a,b;...");
        pairs.emplace_back(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
    }
    GroundStateOpts opts;
    auto table = subadditivity_scan(pairs, g, pp, opts);
    bool all_negative = true;
    for (const auto& row : table) {
        std::ostringstream key;
        key << "gap_" << row.i << "_" << row.j;
        rep.line(key.str(), row.gap);
        all_negative = all_negative && row.gap < -10.0 * opts.tol_residual;
    }
    rep.check("strict_subadditivity", all_negative);
    return rep.ok ? 0 : 1;
}

int cmd_check_virial(const RunConfig& cfg) {
    Report rep(cfg, "report.txt");
    const RadialGrid rg = radial_grid(cfg);
    const PhysicalParams pp = params_of(cfg);
    FieldPair fp0 = initial_data(cfg, GridVar(rg));
    const ChiProfile chi = quadratic_chi(rg);
    const double E16 = 16.0 * energy(fp0, pp).E;
    const double rhs0 = virial_second_rhs(fp0, chi, pp);
    rep.line("sixteen_E", E16);
    rep.line("virial_second_rhs", rhs0);
    const double resid = std::abs(rhs0 - E16) / std::max(1.0, std::abs(E16));
    rep.line("identity_resid", resid);

    EvolveConfig ec = evolve_config(cfg);
    ec.track_variance = true;
    EvolveResult ev = evolve(fp0, pp, ec);
    write_csv(cfg, "diagnostics.csv", ev.diags);
    // second divided differences of the tracked variance against 16E
    double worst = 0;
    for (std::size_t i = 1; i + 1 < ev.diags.size(); ++i) {
        const double h = ev.diags[i + 1].t - ev.diags[i].t;
        const double dd = (*ev.diags[i + 1].variance - 2.0 * *ev.diags[i].variance +
                           *ev.diags[i - 1].variance) /
                          (h * h);
        worst = std::max(worst, std::abs(dd - E16) / std::max(1.0, std::abs(E16)));
    }
    rep.line("variance_dd_resid", worst);
    rep.check("virial_16E", resid < 0.01);
    rep.check("variance_second_difference", worst < 0.01);
    return rep.ok ? 0 : 1;
}

int cmd_check_cutoffs(const RunConfig& cfg) {
    Report rep(cfg, "report.txt");
    const RadialGrid rg = radial_grid(cfg);
    CutoffSpec spec;
    spec.R = cfg.num("cutoff.R", 1.0);
    spec.C_const = cfg.num("cutoff.C", 1.0);
    bool inequalities_ok = true;
    for (auto kind : {CutoffSpec::Kind::Theta2Cap, CutoffSpec::Kind::ExplicitVartheta}) {
        spec.kind = kind;
        CutoffProfiles p = make_cutoffs(spec, rg);
        double m1 = 1e300, m2 = 1e300, m3 = 1e300;
        for (int j = 0; j < rg.nr; ++j) {
            m1 = std::min(m1, 2.0 - p.chi.d2chi[j]);
            m2 = std::min(m2, 2.0 - p.chi.dchi[j] / rg.node(j));
            m3 = std::min(m3, 8.0 - p.chi.lap[j]);
        }
        const char* name = kind == CutoffSpec::Kind::Theta2Cap ? "cap" : "explicit";
        rep.line(std::string("min_two_minus_chipp_") + name, m1);
        rep.line(std::string("min_two_minus_chip_over_r_") + name, m2);
        rep.line(std::string("min_eight_minus_lap_") + name, m3);
        inequalities_ok = inequalities_ok && m1 >= -1e-12 && m2 >= -1e-12 && m3 >= -1e-12;
    }
    rep.check("profile_inequalities", inequalities_ok);

    // largest epsilon passing the positivity condition, found by bisection
    spec.kind = CutoffSpec::Kind::ExplicitVartheta;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        spec.epsilon = 0.5 * (lo + hi);
        (positivity_check(spec, rg).holds ? lo : hi) = spec.epsilon;
    }
    const double eps_max = lo;
    rep.line("C", spec.C_const);
    rep.line("eps_max", eps_max);
    spec.epsilon = 0.5 * eps_max;
    PositivityResult pr = positivity_check(spec, rg);
    rep.line("eps_used", spec.epsilon);
    rep.line("margin", pr.margin);
    rep.check("positivity_at_half_eps_max", pr.holds);
    spec.epsilon = 10.0;
    rep.check("positivity_fails_at_eps_10", !positivity_check(spec, rg).holds);
    return rep.ok ? 0 : 1;
}

} // namespace

int run_subcommand(const RunConfig& cfg) {
    if (cfg.kind == "ground-state") return cmd_ground_state(cfg);
    if (cfg.kind == "gn-constant") return cmd_gn_constant(cfg);
    if (cfg.kind == "evolve") return cmd_evolve(cfg);
    if (cfg.kind == "stability") return cmd_stability(cfg);
    if (cfg.kind == "blowup-demo") return cmd_blowup_demo(cfg);
    if (cfg.kind == "minimal-mass") return cmd_minimal_mass(cfg);
    if (cfg.kind == "scan-subadditivity") return cmd_scan_subadditivity(cfg);
    if (cfg.kind == "check-virial") return cmd_check_virial(cfg);
    if (cfg.kind == "check-cutoffs") return cmd_check_cutoffs(cfg);
    throw ConfigError("unknown experiment kind: " + cfg.kind);
}

} // namespace qnls
