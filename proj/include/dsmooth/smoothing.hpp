#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "dsmooth/evolution.hpp"
#include "dsmooth/norms.hpp"
#include "dsmooth/parallel.hpp"
#include "dsmooth/rough_data.hpp"
#include "dsmooth/stats.hpp"

namespace dsmooth {

struct Shell {
    int index = 0;       // shell [2^{m/p}, 2^{(m+1)/p})
    double center = 0.0; // geometric midpoint
    double rms = 0.0;
    int count = 0;
};

// True when the direction of xi (2D) lies within `margin_deg` degrees of a
// coordinate axis or a diagonal. On the torus these directions carry whole
// lines of exactly resonant lattice interactions that have no continuum
// counterpart, so the tail estimator can leave them out.
inline bool near_lattice_direction(const Freq& xi, double margin_deg)
{
    if (margin_deg <= 0.0) return false;
    const double a = std::atan2(std::abs(xi[1]), std::abs(xi[0])) * 180.0 / pi; // [0, 90]
    return a < margin_deg || a > 90.0 - margin_deg || std::abs(a - 45.0) < margin_deg;
}

// Root mean square of |f(xi)| over logarithmic shells with `per_octave`
// shells per factor of two. Only non-empty shells are returned, in order.
// In 2D, `exclude_deg` > 0 drops modes near the axes and diagonals.
inline std::vector<Shell> shell_spectrum(const FourierField& f, int per_octave = 2, double exclude_deg = 0.0)
{
    require(per_octave >= 1, "need at least one shell per octave");
    require(exclude_deg >= 0.0 && exclude_deg < 22.5, "angular exclusion must lie in [0, 22.5) degrees");
    const bool sectors = f.grid.dim == 2 && exclude_deg > 0.0;
    std::map<int, std::pair<double, int>> acc;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double r = f.grid.abs_xi(i);
        if (r == 0.0) continue;
        if (sectors && near_lattice_direction(f.grid.xi(i), exclude_deg)) continue;
        int m = int(std::floor(per_octave * std::log2(r)));
        // guard the floor against rounding at shell edges
        if (std::pow(2.0, double(m + 1) / per_octave) <= r) ++m;
        if (std::pow(2.0, double(m) / per_octave) > r) --m;
        auto& a = acc[m];
        a.first += std::norm(f[i]);
        a.second += 1;
    }
    std::vector<Shell> out;
    for (const auto& [m, a] : acc)
        out.push_back({m, std::pow(2.0, (m + 0.5) / per_octave), std::sqrt(a.first / a.second), a.second});
    return out;
}

struct SlopeFit {
    double xi_lo = 0.0, xi_hi = 0.0;
    double slope = 0.0;
    double stderr_slope = 0.0;
    double r2 = 0.0;
    int shells = 0;
};

// Least-squares slope of log rms against log center over shells whose center
// lies in [lo, hi].
inline SlopeFit fit_decay(const std::vector<Shell>& spectrum, double lo, double hi, int min_shells = 8)
{
    require(lo > 0.0 && lo < hi, "fit window must satisfy 0 < lo < hi");
    std::vector<double> x, y;
    for (const auto& s : spectrum) {
        if (s.center < lo || s.center > hi || s.rms <= 0.0) continue;
        x.push_back(std::log(s.center));
        y.push_back(std::log(s.rms));
    }
    require(!x.empty(), "empty fit window");
    require(int(x.size()) >= min_shells, "fit window holds " + std::to_string(x.size()) +
                                              " shells, need " + std::to_string(min_shells));
    LineFit lf = fit_line(x, y);
    return {lo, hi, lf.slope, lf.stderr_slope, lf.r2, lf.points};
}

// Extra decay of the Duhamel tail relative to the data tail.
inline double slope_gain(const SlopeFit& u0_fit, const SlopeFit& w_fit) { return u0_fit.slope - w_fit.slope; }

inline double measure_gain(const FourierField& u0, const FourierField& w, double lo, double hi, int per_octave = 2,
                           int min_shells = 8, double exclude_deg = 0.0)
{
    return slope_gain(fit_decay(shell_spectrum(u0, per_octave, exclude_deg), lo, hi, min_shells),
                      fit_decay(shell_spectrum(w, per_octave, exclude_deg), lo, hi, min_shells));
}

struct GainConfig {
    SpectralGrid grid{1, 128.0, 4096};
    RoughDataSpec data;          // s, seed are overwritten per run
    StepperConfig stepper;
    double phase_resolution = 0.0; // > 0: cap dt by this / max |grad L| on the fit window
    bool weighted = false;         // localized data (the KdV class)
    double weight_r = -1.0;        // weight exponent; < 0 means s/2
    double fit_lo = 8.0;
    double fit_hi = 0.0;           // 0 means half the dealias cutoff
    int shells_per_octave = 2;
    double exclude_deg = 0.0;      // 2D only: angular band dropped around axes and diagonals
    int min_shells = 8;
    double eps_step = 0.1;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7};
    int workers = 1;

    double window_hi() const { return fit_hi > 0.0 ? fit_hi : 0.5 * grid.xi_cut(); }

    StepperConfig effective_stepper(const EquationSpec& eq) const
    {
        StepperConfig st = stepper;
        if (phase_resolution > 0.0)
            st.dt = std::min(st.dt, phase_resolution / eq.max_group_speed(window_hi()));
        return st;
    }
};

struct LadderEntry {
    std::uint64_t seed;
    double eps;
    double time;
    double norm;
};

struct SeedResult {
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    bool flagged = false; // u0 fit r2 < 0.95
    bool no_duhamel = false;
    SlopeFit u0_fit, w_fit;
    double gain = std::numeric_limits<double>::quiet_NaN();
    double persistence_ratio = std::numeric_limits<double>::quiet_NaN();
    std::vector<LadderEntry> ladder;
};

struct SmoothingReport {
    std::string equation;
    double s = 0.0;
    double eps_th = 0.0;
    double eps_hat = std::numeric_limits<double>::quiet_NaN();
    double eps_hat_std = 0.0;
    int seeds_used = 0;
    double dt = 0.0;
    double t_end = 0.0;
    double xi_lo = 0.0, xi_hi = 0.0;
    std::vector<double> eps_grid;
    std::vector<double> times;
    std::vector<SeedResult> per_seed;
    std::vector<std::string> notes;
};

inline std::vector<double> eps_ladder(double eps_th, double step)
{
    require(step > 0.0 && step <= 0.1 + 1e-12, "epsilon ladder step must lie in (0, 0.1]");
    std::vector<double> g;
    const double top = eps_th + 0.4;
    const int n = int(std::ceil(top / step - 1e-9));
    for (int i = 0; i <= n; ++i) g.push_back(std::min(i * step, top));
    return g;
}

inline FourierField initial_data(const EquationSpec& eq, double s, std::uint64_t seed, const GainConfig& cfg)
{
    RoughDataSpec d = cfg.data;
    d.s = s;
    d.seed = seed;
    d.real = eq.real();
    if (cfg.weighted) return generate_weighted(d, cfg.grid, cfg.weight_r < 0.0 ? 0.5 * s : cfg.weight_r);
    return generate(d, cfg.grid);
}

inline SeedResult run_seed(const EquationSpec& eq, double s, std::uint64_t seed, const GainConfig& cfg,
                           const std::vector<double>& eps_grid)
{
    SeedResult r;
    r.seed = seed;
    try {
        const double lo = cfg.fit_lo, hi = cfg.window_hi();
        FourierField u0 = initial_data(eq, s, seed, cfg);
        r.u0_fit = fit_decay(shell_spectrum(u0, cfg.shells_per_octave, cfg.exclude_deg), lo, hi, cfg.min_shells);
        r.flagged = r.u0_fit.r2 < 0.95;
        Trajectory traj = evolve(u0, eq, cfg.effective_stepper(eq));
        const double t_end = traj.final().time;
        FourierField w = duhamel_term(traj, t_end);
        if (w.max_abs() == 0.0) {
            r.no_duhamel = true;
        } else {
            r.w_fit = fit_decay(shell_spectrum(w, cfg.shells_per_octave, cfg.exclude_deg), lo, hi, cfg.min_shells);
            r.gain = slope_gain(r.u0_fit, r.w_fit);
        }
        for (const auto& smp : traj.samples) {
            FourierField wt = duhamel_term(traj, smp.time);
            for (double e : eps_grid) r.ladder.push_back({seed, e, smp.time, sobolev_norm(wt, s + e)});
        }
        if (cfg.weighted) {
            const double rw = cfg.weight_r < 0.0 ? 0.5 * s : cfg.weight_r;
            const double w0 = weighted_norm(u0, rw);
            double worst = 0.0;
            for (const auto& smp : traj.samples)
                worst = std::max(worst, weighted_norm(solution(traj, smp.time), rw) / w0);
            r.persistence_ratio = worst;
        }
        r.ok = true;
    } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
    }
    return r;
}

// Ensemble estimate of the smoothing exponent as the difference of the fitted
// tail slopes of u0 and of the Duhamel term at t_end.
inline SmoothingReport estimate_gain(const EquationSpec& eq, double s, const GainConfig& cfg)
{
    require(cfg.grid.dim == eq.dim(), "grid dimension does not match " + to_string(eq.name));
    require(!cfg.seeds.empty(), "need at least one seed");
    const double hi = cfg.window_hi();
    require(hi <= 0.8 * cfg.grid.xi_cut() + 1e-12, "fit window must end below 0.8 of the dealias cutoff");
    require(!cfg.weighted || eq.dim() == 1, "weighted data is 1D only");

    SmoothingReport rep;
    rep.equation = to_string(eq.name);
    rep.s = s;
    rep.eps_th = eq.smoothing_law(s);
    rep.eps_grid = eps_ladder(rep.eps_th, cfg.eps_step);
    const StepperConfig st = cfg.effective_stepper(eq);
    rep.dt = st.effective_dt();
    rep.t_end = st.t_end;
    rep.xi_lo = cfg.fit_lo;
    rep.xi_hi = hi;

    rep.per_seed = parallel_map(cfg.seeds.size(), cfg.workers, [&](std::size_t i) {
        return run_seed(eq, s, cfg.seeds[i], cfg, rep.eps_grid);
    });

    std::vector<double> gains;
    bool any_no_duhamel = false;
    for (const auto& r : rep.per_seed) {
        if (!r.ok) {
            rep.notes.push_back("seed " + std::to_string(r.seed) + " excluded: " + r.error);
            continue;
        }
        if (r.flagged) rep.notes.push_back("seed " + std::to_string(r.seed) + " has u0 fit r2 < 0.95");
        if (r.no_duhamel) {
            any_no_duhamel = true;
            continue;
        }
        gains.push_back(r.gain);
    }
    if (any_no_duhamel) rep.notes.push_back("no Duhamel term");
    for (const auto& r : rep.per_seed)
        if (r.ok) {
            for (const auto& l : r.ladder)
                if (l.seed == r.seed && l.eps == 0.0) rep.times.push_back(l.time);
            break;
        }
    rep.seeds_used = int(gains.size());
    if (!gains.empty()) {
        rep.eps_hat = mean(gains);
        rep.eps_hat_std = sample_std(gains);
    }
    return rep;
}

struct RefinementRow {
    double eps;
    std::vector<double> norms; // one per resolution
    std::vector<double> ratios; // norms[i+1] / norms[i]
};

// ||w(t_end)||_{H^{s+eps}} across resolutions sharing the box and the data
// (coefficients are attached to wavenumbers, so finer data extends coarser).
inline std::vector<RefinementRow> refinement_diagnostic(const EquationSpec& eq, double s,
                                                        const std::vector<double>& eps_list,
                                                        const std::vector<int>& resolutions,
                                                        const GainConfig& cfg, std::uint64_t seed)
{
    require(resolutions.size() >= 2, "refinement needs at least two resolutions");
    auto norms = parallel_map(resolutions.size(), cfg.workers, [&](std::size_t i) {
        GainConfig c = cfg;
        c.grid = SpectralGrid(cfg.grid.dim, cfg.grid.box_length, resolutions[i], cfg.grid.dealias_fraction);
        FourierField u0 = initial_data(eq, s, seed, c);
        Trajectory traj = evolve(u0, eq, cfg.effective_stepper(eq));
        FourierField w = duhamel_term(traj, traj.final().time);
        std::vector<double> out;
        for (double e : eps_list) out.push_back(sobolev_norm(w, s + e));
        return out;
    });
    std::vector<RefinementRow> rows;
    for (std::size_t k = 0; k < eps_list.size(); ++k) {
        RefinementRow row{eps_list[k], {}, {}};
        for (std::size_t i = 0; i < resolutions.size(); ++i) row.norms.push_back(norms[i][k]);
        for (std::size_t i = 0; i + 1 < resolutions.size(); ++i)
            row.ratios.push_back(row.norms[i] > 0.0 ? row.norms[i + 1] / row.norms[i] : 0.0);
        rows.push_back(row);
    }
    return rows;
}

struct LipschitzResult {
    double ratio = 0.0;
    bool degenerate = false;
};

// ||w_u(t) - w_v(t)||_{H^{s+eps}} / ||u0 - v0||_{H^s} at t_end.
inline LipschitzResult lipschitz_probe(const EquationSpec& eq, double s, double eps, const FourierField& u0,
                                       const FourierField& v0, const StepperConfig& st)
{
    require(u0.grid == v0.grid, "data must share a grid");
    const double den = sobolev_norm(u0 - v0, s);
    if (den == 0.0) return {0.0, true};
    Trajectory tu = evolve(u0, eq, st), tv = evolve(v0, eq, st);
    const double t = tu.final().time;
    FourierField d = duhamel_term(tu, t) - duhamel_term(tv, t);
    return {sobolev_norm(d, s + eps) / den, false};
}

} // namespace dsmooth
