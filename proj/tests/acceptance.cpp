// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Settings come from the same config presets the command line tool uses.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <fstream>
#include <unistd.h>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dsmooth/experiment.hpp"
#include "dsmooth/gauge.hpp"
#include "dsmooth/report.hpp"
#include "oracles.hpp"

using namespace dsmooth;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> lines;

    void check(bool ok, const std::string& what)
    {
        pass = pass && ok;
        lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
    }
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

class Stopwatch {
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();

public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }
};

int g_workers = 1;

ExperimentConfig preset(const std::string& kind, const std::string& eq, json extra = json::object())
{
    json o{{"kind", kind}, {"equation", {{"name", eq}}}, {"workers", g_workers}};
    o.merge_patch(extra);
    return resolve_config(json::object(), o);
}

const EquationName all_eqs[] = {EquationName::mkdv, EquationName::kdv, EquationName::nls, EquationName::mzk,
                                EquationName::dnls};

// 1. Linear flow leaves the profile unchanged.
Outcome linear_exactness()
{
    Outcome out;
    for (EquationName e : all_eqs) {
        Stopwatch sw;
        auto cfg = preset("simulate", to_string(e), json{{"equation", {{"coupling", 0.0}}}, {"stepper", {{"t_end", 1.0}}}});
        RunArtifacts a = compute_run(cfg);
        const double d = a.report["max_profile_change"].get<double>();
        const double sec = sw.seconds();
        out.check(d < 1e-12 && sec < 10.0,
                  fmt("%-4s n=%d: max |v(t)-v(0)| = %.3g (< 1e-12), %.1f s (< 10 s)", to_string(e).c_str(), cfg.grid.n,
                      d, sec));
    }
    return out;
}

// 2. Fourth order on the focusing soliton.
FourierField soliton(const SpectralGrid& g, double t)
{
    std::vector<cplx> v(g.size());
    for (int j = 0; j < g.n; ++j)
        v[std::size_t(j)] = std::sqrt(2.0) / std::cosh(centered_x(g, j)) * std::polar(1.0, t);
    return transform_forward(g, v);
}

Outcome integrator_order()
{
    Outcome out;
    Stopwatch sw;
    // box wide enough that the sech tail (~e^{-L/2}) stays below the time error at dt = 5e-4
    const SpectralGrid g(1, 80.0, 1024);
    const EquationSpec eq(EquationName::nls);
    const FourierField exact = soliton(g, 1.0);
    std::vector<double> x, y;
    double err_1e3 = 0.0;
    for (double dt : {4e-3, 2e-3, 1e-3, 5e-4}) {
        StepperConfig st;
        st.dt = dt;
        st.t_end = 1.0;
        st.samples = 1;
        auto traj = evolve(soliton(g, 0.0), eq, st);
        const double err = sobolev_norm(solution(traj, 1.0) - exact, 0.0) / sobolev_norm(exact, 0.0);
        out.lines.push_back(fmt("     dt=%.1e  relative L2 error %.3e", dt, err));
        x.push_back(std::log(dt));
        y.push_back(std::log(err));
        if (dt == 1e-3) err_1e3 = err;
    }
    const LineFit f = fit_line(x, y);
    out.check(std::abs(f.slope - 4.0) <= 0.3, fmt("error slope %.3f (4.0 +- 0.3)", f.slope));
    out.check(err_1e3 < 1e-6, fmt("error at dt=1e-3: %.3e (< 1e-6)", err_1e3));
    out.check(sw.seconds() < 60.0, fmt("%.1f s (< 60 s)", sw.seconds()));
    return out;
}

// 3. Closed-form phases against the dispersion combination.
FrequencyTuple random_tuple(const EquationSpec& eq, int order, std::mt19937_64& eng)
{
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    FrequencyTuple t;
    for (int s : eq.term(order).signature) {
        Freq f{u(eng), eq.dim() == 2 ? u(eng) : 0.0};
        t.inputs.push_back(f);
        t.xi[0] += s * f[0];
        t.xi[1] += s * f[1];
    }
    return t;
}

Outcome phase_identities()
{
    Outcome out;
    Stopwatch sw;
    std::mt19937_64 eng(2024);
    for (EquationName e : all_eqs) {
        const EquationSpec eq(e);
        for (const auto& term : eq.terms()) {
            double worst = 0.0;
            for (int i = 0; i < 10000; ++i) {
                const auto t = random_tuple(eq, term.order, eng);
                const double closed = eq.phase(t), comb = eq.phase_constant() * eq.dispersion_combination(t);
                worst = std::max(worst, std::abs(closed - comb) / std::max(1.0, std::abs(closed)));
            }
            out.check(worst <= 1e-9, fmt("%-4s order %d: worst relative mismatch %.2e over 1e4 tuples",
                                         to_string(e).c_str(), term.order, worst));
        }
    }
    const EquationSpec dn(EquationName::dnls);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const auto t = random_tuple(dn, 3, eng);
        const double a = 2.0 * (t.xi[0] - t.inputs[0][0]) * (t.xi[0] - t.inputs[2][0]);
        const double b = 2.0 * (t.inputs[1][0] - t.inputs[0][0]) * (t.inputs[1][0] - t.inputs[2][0]);
        worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
    out.check(worst <= 1e-9, fmt("dnls dual factorization: worst relative mismatch %.2e", worst));
    out.check(sw.seconds() < 5.0, fmt("%.2f s (< 5 s)", sw.seconds()));
    return out;
}

// 4. Gauge transform and its inverse.
Outcome gauge_round_trip()
{
    Outcome out;
    Stopwatch sw;
    const SpectralGrid g(1, 64.0, 1024);
    std::mt19937_64 eng(3);
    std::normal_distribution<double> nd;
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<cplx> u(g.size());
        for (int j = 0; j < g.n; ++j) {
            const double x = centered_x(g, j);
            u[std::size_t(j)] = std::exp(-x * x / 20.0) * cplx(nd(eng), nd(eng));
        }
        const auto back = gauge_inverse(g, gauge_forward(g, u));
        for (std::size_t j = 0; j < u.size(); ++j) worst = std::max(worst, std::abs(back[j] - u[j]));
    }
    out.check(worst < 1e-10, fmt("max |G^-1 G u - u| = %.2e (< 1e-10)", worst));
    out.check(sw.seconds() < 1.0, fmt("%.3f s (< 1 s)", sw.seconds()));
    return out;
}

// 5 and 11. Ensemble smoothing exponents.
std::map<std::string, SmoothingReport> g_smoothing;

SmoothingReport smoothing_run(const std::string& eq, double s, double& seconds)
{
    auto cfg = preset("smoothing", eq, json{{"data", {{"s", s}}}});
    Stopwatch sw;
    SmoothingReport r = estimate_gain(cfg.equation_spec(), s, gain_config(cfg));
    seconds = sw.seconds();
    g_smoothing[eq + fmt("%.2f", s)] = r;
    return r;
}

Outcome smoothing_gains()
{
    struct Case {
        const char* eq;
        double s, target, limit;
    };
    const Case cases[] = {{"nls", 0.3, 0.40, 300.0},   {"mkdv", 0.5, 0.33, 600.0}, {"mkdv", 0.75, 0.60, 600.0},
                          {"kdv", 0.5, 0.33, 300.0},   {"dnls", 0.75, 0.30, 600.0}, {"mzk", 1.75, 0.25, 1800.0}};
    Outcome out;
    for (const auto& c : cases) {
        double sec = 0.0;
        const SmoothingReport r = smoothing_run(c.eq, c.s, sec);
        const bool ok = r.seeds_used == 8 && r.eps_hat >= c.target && sec < c.limit;
        out.check(ok, fmt("%-4s s=%.2f: eps_hat %.3f +- %.3f over %d seeds (>= %.2f; eps_th %.2f), %.0f s (< %.0f s)",
                          c.eq, c.s, r.eps_hat, r.eps_hat_std, r.seeds_used, c.target, r.eps_th, sec, c.limit));
        for (const auto& n : r.notes) out.lines.push_back("     note: " + n);
    }
    return out;
}

// 6. Norm ratios of the Duhamel term under grid doubling.
Outcome refinement()
{
    Outcome out;
    Stopwatch sw;
    auto cfg = preset("smoothing", "nls");
    const auto rows = refinement_diagnostic(cfg.equation_spec(), 0.3, {0.3, 0.9}, {2048, 4096}, gain_config(cfg),
                                            cfg.seed_first);
    const double r3 = rows[0].ratios[0], r9 = rows[1].ratios[0];
    out.check(r3 >= 0.9 && r3 <= 1.1, fmt("R(0.3) = %.4f (in [0.9, 1.1])", r3));
    out.check(r9 >= 1.2, fmt("R(0.9) = %.4f (>= 1.2)", r9));
    out.check(sw.seconds() < 600.0, fmt("%.1f s (< 600 s)", sw.seconds()));
    return out;
}

// 7. Slab operator exponents.
Outcome slab_scaling()
{
    Outcome out;
    Stopwatch sw;
    auto nls = preset("bounds", "nls");
    ScalingResult a = sweep_M_scaling(bound_template(nls), nls.bounds.M_list, nls.bounds.alpha_list, g_workers);
    out.check(a.beta_fit.slope <= 0.65 && !a.degenerate,
              fmt("nls s=0: beta_hat %.3f +- %.3f (<= 0.65)", a.beta_fit.slope, a.beta_fit.stderr_slope));
    out.check(a.gamma_fit.slope <= 0.15,
              fmt("nls s=0, M=%g: gamma_hat %.3f +- %.3f (<= 0.15)", nls.bounds.M, a.gamma_fit.slope,
                  a.gamma_fit.stderr_slope));
    auto dn = preset("bounds", "dnls");
    ScalingResult b = sweep_M_scaling(bound_template(dn), dn.bounds.M_list, dn.bounds.alpha_list, g_workers);
    out.check(b.gamma_fit.slope <= 0.35 && !b.degenerate,
              fmt("dnls s=%.1f: gamma_hat %.3f +- %.3f (<= 0.35), beta_hat %.3f", dn.bounds.s, b.gamma_fit.slope,
                  b.gamma_fit.stderr_slope, b.beta_fit.slope));
    out.check(sw.seconds() < 900.0, fmt("%.1f s (< 900 s)", sw.seconds()));
    return out;
}

// 8. Bounded and unbounded cells of the T_sigma sweep.
Outcome feasibility()
{
    Outcome out;
    Stopwatch sw;
    for (const char* name : {"nls", "mkdv"}) {
        auto cfg = preset("bounds", name, json{{"bounds", {{"mode", "feasibility"}}}});
        const EquationSpec eq = cfg.equation_spec();
        FeasibilityTable tab = sweep_sigma_bound(bound_template(cfg), cfg.bounds.s_grid, cfg.bounds.eps_grid,
                                                 cfg.bounds.sigma_grid, g_workers, cfg.bounds.growth_threshold);
        for (const auto& c : tab.cells) {
            const double th = eq.smoothing_law(c.s);
            const std::string cell = fmt("%-4s s=%.2f eps=%.2f (eps_th %.2f): growth %.3f", name, c.s, c.eps, th,
                                         c.best_growth);
            if (c.eps < th) out.check(c.bounded, cell + " -> bounded");
            else if (c.eps >= th + 0.3 - 1e-12) out.check(!c.bounded, cell + " -> unbounded");
            else out.lines.push_back("     " + cell + " (not classified)");
        }
    }
    out.check(sw.seconds() < 1200.0, fmt("%.1f s (< 1200 s)", sw.seconds()));
    return out;
}

// 9. First normal form step.
Outcome infr_scalings()
{
    Outcome out;
    Stopwatch sw;
    auto cfg = preset("infr", "nls");
    RunArtifacts a = compute_run(cfg);
    const double b = a.report["boundary_fit"]["slope"].get<double>(), n = a.report["near_fit"]["slope"].get<double>();
    const double sigma = cfg.infr.sigma;
    out.check(std::abs(b + (1.0 - sigma)) <= 0.15, fmt("boundary slope %.3f (%.2f +- 0.15)", b, -(1.0 - sigma)));
    out.check(n <= sigma + 0.15, fmt("near-resonant slope %.3f (<= %.2f)", n, sigma + 0.15));
    out.check(sw.seconds() < 600.0, fmt("%.1f s (< 600 s)", sw.seconds()));
    return out;
}

// 10. Library operators against direct sums with hand-written phases.
std::vector<FourierField> fields(const SpectralGrid& g, int k, unsigned seed, bool real = false)
{
    std::vector<FourierField> v;
    for (int j = 0; j < k; ++j) v.push_back(oracle::random_field(g, seed + unsigned(j), real, 0.5));
    return oracle::without_nyquist(v);
}

FourierField masked(FourierField f)
{
    for (std::size_t i = 0; i < f.size(); ++i)
        if (!f.grid.retained(i)) f[i] = 0.0;
    return f;
}

Outcome oracle_equivalences()
{
    Outcome out;
    Stopwatch sw;
    auto report = [&](const std::string& what, double d) { out.check(d < 1e-10, fmt("%-44s rel. diff %.2e", what.c_str(), d)); };

    {
        const SpectralGrid g(1, 20.0, 64);
        auto in = fields(g, 3, 1);
        auto ref = masked(oracle::direct_sum(in, {1, -1, 1}, [](const Freq&, const std::vector<Freq>&) { return cplx(1.0); }));
        report("dealiased_product, cubic, n=64", oracle::rel_diff(dealiased_product(in, {1, -1, 1}), ref));
        const SpectralGrid q(1, 20.0, 32);
        auto in5 = fields(q, 5, 2);
        const std::vector<int> s5{1, -1, 1, -1, 1};
        auto ref5 = masked(oracle::direct_sum(in5, s5, [](const Freq&, const std::vector<Freq>&) { return cplx(1.0); }));
        report("dealiased_product, quintic, n=32", oracle::rel_diff(dealiased_product(in5, s5), ref5));
    }
    {
        BoundProbe p;
        p.eq = EquationSpec(EquationName::mkdv);
        p.lattice = {1, 64, 8.0};
        p.sigma = 0.6;
        auto in = fields(p.lattice.grid(), 3, 10, true);
        auto ref = oracle::direct_sum(in, {1, 1, 1}, [](const Freq& x, const std::vector<Freq>& xs) -> cplx {
            const double phi = 3.0 * (x[0] - xs[0][0]) * (x[0] - xs[1][0]) * (x[0] - xs[2][0]);
            return x[0] * std::pow(1.0 + phi * phi, -0.3);
        });
        report("apply_T_sigma, mkdv sigma=0.6, m_f=64", oracle::rel_diff(apply_T_sigma(p, in), ref));
    }
    {
        BoundProbe p;
        p.eq = EquationSpec(EquationName::dnls);
        p.order = 5;
        p.lattice = {1, 24, 6.0};
        p.sigma = 0.7;
        auto in = fields(p.lattice.grid(), 5, 20);
        auto ref = oracle::direct_sum(in, {1, -1, 1, -1, 1}, [](const Freq& x, const std::vector<Freq>& xs) -> cplx {
            double phi = x[0] * x[0];
            for (std::size_t j = 0; j < 5; ++j) phi += (j % 2 ? 1.0 : -1.0) * xs[j][0] * xs[j][0];
            return std::pow(1.0 + phi * phi, -0.35);
        });
        report("apply_T_sigma, dnls quintic, m_f=24", oracle::rel_diff(apply_T_sigma(p, in), ref));
    }
    {
        BoundProbe p;
        p.eq = EquationSpec(EquationName::nls);
        p.lattice = {1, 64, 16.0};
        p.alpha = 0.0;
        p.M = 4.0;
        auto in = fields(p.lattice.grid(), 3, 30);
        auto ref = oracle::direct_sum(in, {1, -1, 1}, [](const Freq& x, const std::vector<Freq>& xs) -> cplx {
            return std::abs((x[0] - xs[0][0]) * (x[0] - xs[2][0])) < 4.0 ? 1.0 : 0.0;
        });
        report("apply_T_alpha_M, nls alpha=0 M=4, m_f=64", oracle::rel_diff(apply_T_alpha_M(p, in), ref));
    }
    {
        const EquationSpec eq(EquationName::nls);
        const SpectralGrid g = Lattice{1, 48, 6.0}.grid();
        auto in = fields(g, 3, 40);
        const double N = 4.0, t = 0.5;
        auto ref = oracle::direct_sum(in, {1, -1, 1}, [&](const Freq& x, const std::vector<Freq>& xs) -> cplx {
            const double phi = (x[0] - xs[0][0]) * (x[0] - xs[2][0]);
            return std::abs(phi) > N ? std::exp(cplx(0.0, t * phi)) / cplx(0.0, phi) : cplx(0.0);
        });
        report("boundary_term, nls N=4 t=0.5, m_f=48", oracle::rel_diff(boundary_term(eq, in, N, t), ref));
    }
    out.check(sw.seconds() < 300.0, fmt("%.1f s (< 300 s)", sw.seconds()));
    return out;
}

// 11. Weighted norm of the KdV solution stays comparable to the initial one.
Outcome kdv_persistence()
{
    Outcome out;
    auto it = g_smoothing.find("kdv" + fmt("%.2f", 0.5));
    if (it == g_smoothing.end()) {
        double sec = 0.0;
        smoothing_run("kdv", 0.5, sec);
        it = g_smoothing.find("kdv" + fmt("%.2f", 0.5));
    }
    int seen = 0;
    for (const auto& r : it->second.per_seed) {
        if (!r.ok) continue;
        ++seen;
        out.check(r.persistence_ratio <= 5.0,
                  fmt("seed %d: max_t weighted norm / initial = %.3f (<= 5)", int(r.seed), r.persistence_ratio));
    }
    out.check(seen > 0, fmt("%d seeds with a trajectory", seen));
    return out;
}

// 12. Run payloads with 1 and 8 workers.
std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

Outcome determinism()
{
    Outcome out;
    const fs::path root = fs::temp_directory_path() / ("dsmooth-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(root);
    const std::pair<const char*, const char*> runs[] = {{"smoothing", "nls"}, {"bounds", "nls"}, {"infr", "nls"}};
    for (const auto& [kind, eq] : runs) {
        std::map<std::string, std::string> files[2];
        int i = 0;
        for (int w : {1, 8}) {
            auto cfg = preset(kind, eq, json{{"workers", w}, {"output", (root / std::to_string(w)).string()}});
            const fs::path dir = run_experiment(cfg, true);
            for (const auto& e : fs::directory_iterator(dir)) files[i][e.path().filename().string()] = slurp(e.path());
            ++i;
        }
        const bool same = files[0] == files[1] && !files[0].empty();
        out.check(same, fmt("%-9s %s: %zu files identical with 1 and 8 workers", kind, eq, files[0].size()));
    }
    fs::remove_all(root);
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance criteria"};
    std::vector<int> only;
    app.add_option("--workers", g_workers, "worker threads for the sweeps")->check(CLI::PositiveNumber);
    app.add_option("--only", only, "criterion numbers to run")->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"linear exactness", linear_exactness},
        {"integrator order", integrator_order},
        {"phase identities", phase_identities},
        {"gauge round trip", gauge_round_trip},
        {"smoothing exponents", smoothing_gains},
        {"refinement diagnostic", refinement},
        {"slab operator scaling", slab_scaling},
        {"sigma bound feasibility", feasibility},
        {"normal form scalings", infr_scalings},
        {"oracle equivalences", oracle_equivalences},
        {"kdv weighted persistence", kdv_persistence},
        {"worker determinism", determinism},
    };
    const std::set<int> chosen(only.begin(), only.end());
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = int(i) + 1;
        if (!chosen.empty() && !chosen.count(id)) continue;
        Stopwatch sw;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.check(false, std::string("exception: ") + e.what());
        }
        if (!o.pass) ++failed;
        std::printf("%s %2d %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), sw.seconds());
        for (const auto& l : o.lines) std::printf("       %s\n", l.c_str());
        std::fflush(stdout);
    }
    std::printf("%d criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
