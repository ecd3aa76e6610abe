#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dsmooth/config.hpp"
#include "dsmooth/infr.hpp"
#include "dsmooth/multilinear.hpp"
#include "dsmooth/serialize.hpp"
#include "dsmooth/smoothing.hpp"

#ifndef DSMOOTH_VERSION
#define DSMOOTH_VERSION "unversioned"
#endif

namespace dsmooth {

namespace fs = std::filesystem;

inline const char* code_version() { return DSMOOTH_VERSION; }

// Output root: the config value, else $DSMOOTH_OUTPUT_ROOT, else ./runs.
inline fs::path output_root(const ExperimentConfig& cfg)
{
    if (!cfg.output.empty()) return cfg.output;
    if (const char* env = std::getenv("DSMOOTH_OUTPUT_ROOT"); env && *env) return env;
    return "runs";
}

inline std::string run_name(const ExperimentConfig& cfg) { return cfg.kind + "-" + cfg.hash().substr(0, 12); }

class RunExists : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Stamp carried by every file of a run.
inline json run_stamp(const ExperimentConfig& cfg)
{
    json st{{"config_hash", cfg.hash()}, {"code_version", code_version()}, {"kind", cfg.kind}};
    const EquationSpec eq = cfg.equation_spec();
    if (cfg.kind == "simulate" || cfg.kind == "smoothing")
        st["grid"] = grid_to_json(SpectralGrid(eq.dim(), cfg.grid.L, cfg.grid.n, cfg.grid.dealias));
    else if (cfg.kind == "bounds")
        st["grid"] = json{{"lattice_dim", eq.dim()}, {"m", cfg.bounds.m}, {"K", cfg.bounds.K}};
    else if (cfg.kind == "infr")
        st["grid"] = json{{"lattice_dim", eq.dim()}, {"m", cfg.infr.m}, {"K", cfg.infr.K}};
    return st;
}

// A CSV table whose first line is "# " plus the run stamp.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> r) { rows.push_back(std::move(r)); }
    std::string text(const json& stamp) const
    {
        std::ostringstream os;
        os << "# " << stamp.dump() << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
        os << "\n";
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
            os << "\n";
        }
        return os.str();
    }
};

inline std::string num(double v) { return format_double(v); }

// In-memory result of one run. Nothing here depends on the worker count.
struct RunArtifacts {
    json report;                                // report.json
    std::vector<std::pair<std::string, CsvTable>> tables;
    std::vector<std::pair<std::string, FourierField>> checkpoints;
};

inline SpectralGrid config_grid(const ExperimentConfig& c)
{
    return SpectralGrid(c.dim(), c.grid.L, c.grid.n, c.grid.dealias);
}

inline StepperConfig config_stepper(const ExperimentConfig& c)
{
    StepperConfig st;
    st.dt = c.stepper.dt;
    st.t_end = c.stepper.t_end;
    st.cfl_guard = c.stepper.cfl_guard;
    st.samples = c.stepper.samples;
    return st;
}

inline GainConfig gain_config(const ExperimentConfig& c)
{
    GainConfig g;
    g.grid = config_grid(c);
    g.data.amplitude = c.data.amplitude;
    g.data.margin = c.data.margin;
    g.stepper = config_stepper(c);
    g.phase_resolution = c.smoothing.phase_resolution;
    g.weighted = c.data.weighted;
    g.weight_r = c.data.weight_r;
    g.fit_lo = c.smoothing.fit_lo;
    g.fit_hi = c.smoothing.fit_hi;
    g.shells_per_octave = c.smoothing.shells_per_octave;
    g.exclude_deg = c.smoothing.exclude_deg;
    g.min_shells = c.smoothing.min_shells;
    g.eps_step = c.smoothing.eps_step;
    g.seeds.clear();
    for (int i = 0; i < c.seed_count; ++i) g.seeds.push_back(c.seed_first + std::uint64_t(i));
    g.workers = c.workers;
    return g;
}

inline BoundProbe bound_template(const ExperimentConfig& c)
{
    BoundProbe p;
    p.eq = c.equation_spec();
    p.order = c.bounds.order;
    p.s = c.bounds.s;
    p.eps = c.bounds.eps;
    p.sigma = c.bounds.sigma;
    p.M = c.bounds.M;
    p.alpha = c.bounds.alpha;
    p.lattice = {p.eq.dim(), c.bounds.m, c.bounds.K};
    p.trials = c.bounds.trials;
    p.iterations = c.bounds.iterations;
    p.seed = c.seed_first;
    p.exclude_resonant = c.bounds.exclude_resonant;
    return p;
}

inline json fit_json(const LineFit& f)
{
    return json{{"slope", f.slope}, {"stderr", f.stderr_slope}, {"r2", f.r2}, {"points", f.points}};
}

inline json estimate_json(const NormEstimate& e) { return json{{"lower", e.lower}, {"upper", e.upper}}; }

// simulate: one trajectory from rough data; reports the largest profile change,
// which is zero up to rounding for the linear flow.
inline RunArtifacts run_simulate(const ExperimentConfig& c)
{
    const EquationSpec eq = c.equation_spec();
    const SpectralGrid g = config_grid(c);
    RoughDataSpec d;
    d.s = c.data.s;
    d.amplitude = c.data.amplitude;
    d.margin = c.data.margin;
    d.seed = c.seed_first;
    d.real = eq.real();
    FourierField u0 = c.data.weighted ? generate_weighted(d, g, c.data.weight_r < 0.0 ? 0.5 * d.s : c.data.weight_r)
                                      : generate(d, g);
    Trajectory traj = evolve(u0, eq, config_stepper(c));

    RunArtifacts a;
    CsvTable t{{"time", "l2", "hs", "max_profile_change"}, {}};
    double worst = 0.0;
    for (const auto& smp : traj.samples) {
        double diff = 0.0;
        for (std::size_t i = 0; i < u0.size(); ++i) diff = std::max(diff, std::abs(smp.profile[i] - u0[i]));
        worst = std::max(worst, diff);
        t.add({num(smp.time), num(sobolev_norm(smp.profile, 0.0)), num(sobolev_norm(smp.profile, d.s)), num(diff)});
    }
    a.tables.emplace_back("trajectory.csv", t);
    a.checkpoints.emplace_back("initial_profile.csv", u0);
    a.checkpoints.emplace_back("final_profile.csv", traj.final().profile);
    a.report = json{{"equation", to_string(eq.name)},
                    {"s", d.s},
                    {"dt", traj.dt},
                    {"steps", traj.steps},
                    {"t_end", traj.final().time},
                    {"max_profile_change", worst},
                    {"linear", eq.options.coupling == 0.0},
                    {"l2_initial", sobolev_norm(u0, 0.0)},
                    {"l2_final", sobolev_norm(traj.final().profile, 0.0)}};
    return a;
}

inline json smoothing_json(const SmoothingReport& r)
{
    json seeds = json::array();
    for (const auto& s : r.per_seed) {
        json j{{"seed", s.seed}, {"ok", s.ok}};
        if (!s.ok) {
            j["error"] = s.error;
        } else {
            j["flagged"] = s.flagged;
            j["no_duhamel"] = s.no_duhamel;
            j["u0_slope"] = s.u0_fit.slope;
            j["u0_r2"] = s.u0_fit.r2;
            if (!s.no_duhamel) {
                j["w_slope"] = s.w_fit.slope;
                j["w_r2"] = s.w_fit.r2;
                j["gain"] = s.gain;
            }
            if (s.persistence_ratio > 0.0) j["persistence_ratio"] = s.persistence_ratio;
        }
        seeds.push_back(j);
    }
    json j{{"equation", r.equation}, {"s", r.s},         {"eps_th", r.eps_th},   {"seeds_used", r.seeds_used},
           {"dt", r.dt},             {"t_end", r.t_end}, {"xi_lo", r.xi_lo},     {"xi_hi", r.xi_hi},
           {"eps_grid", r.eps_grid}, {"times", r.times}, {"per_seed", seeds},    {"notes", r.notes}};
    // NaN has no JSON form: an undefined estimate is written as null
    j["eps_hat"] = std::isnan(r.eps_hat) ? json(nullptr) : json(r.eps_hat);
    j["eps_hat_std"] = std::isnan(r.eps_hat_std) ? json(nullptr) : json(r.eps_hat_std);
    return j;
}

inline RunArtifacts run_smoothing(const ExperimentConfig& c)
{
    const EquationSpec eq = c.equation_spec();
    const GainConfig gc = gain_config(c);
    SmoothingReport rep = estimate_gain(eq, c.data.s, gc);
    RunArtifacts a;
    a.report = smoothing_json(rep);
    CsvTable ladder{{"seed", "eps", "time", "norm"}, {}};
    for (const auto& s : rep.per_seed)
        for (const auto& l : s.ladder) ladder.add({std::to_string(l.seed), num(l.eps), num(l.time), num(l.norm)});
    a.tables.emplace_back("ladder.csv", ladder);
    CsvTable seeds{{"seed", "ok", "u0_slope", "w_slope", "gain", "persistence_ratio"}, {}};
    for (const auto& s : rep.per_seed)
        seeds.add({std::to_string(s.seed), s.ok ? "1" : "0", num(s.u0_fit.slope), num(s.w_fit.slope), num(s.gain),
                   num(s.persistence_ratio)});
    a.tables.emplace_back("seeds.csv", seeds);
    if (!c.smoothing.refine.empty()) {
        auto rows = refinement_diagnostic(eq, c.data.s, c.smoothing.refine_eps, c.smoothing.refine, gc, c.seed_first);
        CsvTable rt{{"eps", "n", "norm", "ratio_to_previous"}, {}};
        json jr = json::array();
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.norms.size(); ++i)
                rt.add({num(r.eps), std::to_string(c.smoothing.refine[i]), num(r.norms[i]),
                        i == 0 ? "" : num(r.ratios[i - 1])});
            jr.push_back(json{{"eps", r.eps}, {"norms", r.norms}, {"ratios", r.ratios}});
        }
        a.tables.emplace_back("refinement.csv", rt);
        a.report["refinement"] = json{{"resolutions", c.smoothing.refine}, {"rows", jr}};
    }
    return a;
}

inline RunArtifacts run_bounds(const ExperimentConfig& c)
{
    const BoundProbe tmpl = bound_template(c);
    RunArtifacts a;
    a.report = json{{"equation", c.equation.name}, {"mode", c.bounds.mode}, {"order", tmpl.effective_order()}};
    if (c.bounds.mode == "scaling") {
        ScalingResult r = sweep_M_scaling(tmpl, c.bounds.M_list, c.bounds.alpha_list, c.workers);
        CsvTable t{{"sweep", "alpha", "M", "lower", "upper"}, {}};
        for (const auto& row : r.m_rows) t.add({"M", num(row.alpha), num(row.M), num(row.norm.lower), num(row.norm.upper)});
        for (const auto& row : r.alpha_rows)
            t.add({"alpha", num(row.alpha), num(row.M), num(row.norm.lower), num(row.norm.upper)});
        a.tables.emplace_back("scaling.csv", t);
        a.report["s"] = tmpl.s;
        a.report["beta_hat"] = fit_json(r.beta_fit);
        a.report["gamma_hat"] = fit_json(r.gamma_fit);
        a.report["degenerate"] = r.degenerate;
    } else {
        FeasibilityTable tab = sweep_sigma_bound(tmpl, c.bounds.s_grid, c.bounds.eps_grid, c.bounds.sigma_grid,
                                                 c.workers, c.bounds.growth_threshold);
        CsvTable t{{"s", "eps", "sigma", "coarse_lower", "fine_lower", "coarse_upper", "fine_upper", "growth"}, {}};
        for (const auto& p : tab.probes)
            t.add({num(p.s), num(p.eps), num(p.sigma), num(p.coarse.lower), num(p.fine.lower), num(p.coarse.upper),
                   num(p.fine.upper), num(p.growth)});
        a.tables.emplace_back("feasibility.csv", t);
        json cells = json::array();
        const EquationSpec eq = c.equation_spec();
        for (const auto& cell : tab.cells)
            cells.push_back(json{{"s", cell.s},
                                 {"eps", cell.eps},
                                 {"eps_th", eq.smoothing_law(cell.s)},
                                 {"bounded", cell.bounded},
                                 {"best_sigma", cell.best_sigma},
                                 {"best_growth", cell.best_growth}});
        a.report["growth_threshold"] = tab.growth_threshold;
        a.report["cells"] = cells;
    }
    return a;
}

inline RunArtifacts run_infr(const ExperimentConfig& c)
{
    const EquationSpec eq = c.equation_spec();
    InfrScalingConfig ic;
    ic.lattice = {eq.dim(), c.infr.m, c.infr.K};
    ic.ensemble = c.infr.ensemble;
    ic.seed = c.seed_first;
    ic.time = c.infr.time;
    ic.order = c.infr.order;
    ic.workers = c.workers;
    InfrScalingResult r = verify_scalings(eq, c.infr.s, c.infr.eps, c.infr.sigma, c.infr.N, ic);
    CsvTable t{{"N", "term", "norm", "fit"}, {}};
    for (const auto& row : r.rows) {
        t.add({num(row.N), "near_resonant", num(row.near_norm), num(r.near_fit.slope)});
        t.add({num(row.N), "boundary", num(row.boundary_norm), num(r.boundary_fit.slope)});
    }
    RunArtifacts a;
    a.tables.emplace_back("infr.csv", t);
    a.report = json{{"equation", c.equation.name},
                    {"s", c.infr.s},
                    {"eps", c.infr.eps},
                    {"sigma", c.infr.sigma},
                    {"delta", c.infr.sigma},
                    {"near_fit", fit_json(r.near_fit)},
                    {"boundary_fit", fit_json(r.boundary_fit)},
                    {"boundary_theory", -(1.0 - c.infr.sigma)},
                    {"degenerate", r.degenerate}};
    return a;
}

inline RunArtifacts compute_run(const ExperimentConfig& c)
{
    c.validate();
    if (c.kind == "simulate") return run_simulate(c);
    if (c.kind == "smoothing") return run_smoothing(c);
    if (c.kind == "bounds") return run_bounds(c);
    if (c.kind == "infr") return run_infr(c);
    throw ValidationError("kind '" + c.kind + "' does not produce a run");
}

inline void write_text(const fs::path& p, const std::string& text)
{
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << text;
}

// Executes the experiment and writes report.json, its CSV tables, field
// checkpoints and the resolved config under <root>/<kind>-<hash12>. An
// existing run directory is an error unless `force` is set.
inline fs::path run_experiment(const ExperimentConfig& c, bool force)
{
    c.validate();
    const fs::path dir = output_root(c) / run_name(c);
    if (fs::exists(dir) && !force) throw RunExists("run directory " + dir.string() + " exists (use --force)");
    RunArtifacts a = compute_run(c);
    fs::create_directories(dir);
    const json stamp = run_stamp(c);
    json report = stamp;
    report["result"] = a.report;
    write_text(dir / "report.json", report.dump(2) + "\n");
    json cfg = c.to_json();
    cfg.erase("workers");
    cfg.erase("output");
    write_text(dir / "config.json", cfg.dump(2) + "\n");
    for (const auto& [name, table] : a.tables) write_text(dir / name, table.text(stamp));
    for (const auto& [name, field] : a.checkpoints) {
        std::ostringstream os;
        write_field_csv(os, field, stamp);
        write_text(dir / name, os.str());
    }
    return dir;
}

} // namespace dsmooth
