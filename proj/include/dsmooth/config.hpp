#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dsmooth/digest.hpp"
#include "dsmooth/equation.hpp"
#include "dsmooth/error.hpp"

namespace dsmooth {

using json = nlohmann::json;

struct EquationSection {
    std::string name = "nls";
    double sign = 1.0;
    double coupling = 1.0;
    bool renormalize = true;
};

struct GridSection {
    double L = 128.0;
    int n = 4096;
    double dealias = 2.0 / 3.0;
};

struct DataSection {
    double s = 0.5;
    double amplitude = 0.1;
    double margin = 0.01;
    bool weighted = false;
    double weight_r = -1.0; // < 0: s/2
};

struct StepperSection {
    double dt = 1e-3;
    double t_end = 1.0;
    double cfl_guard = 1.5;
    int samples = 4;
};

struct SmoothingSection {
    double fit_lo = 8.0;
    double fit_hi = 32.0;
    int shells_per_octave = 4;
    int min_shells = 8;
    double phase_resolution = 0.2; // gains move by < 0.005 against 0.1 at half the cost
    double exclude_deg = 0.0;
    double eps_step = 0.1;
    std::vector<int> refine;         // resolutions for the refinement diagnostic; empty skips it
    std::vector<double> refine_eps;  // eps values probed by that diagnostic
};

struct BoundsSection {
    std::string mode = "scaling"; // scaling | feasibility
    int order = 0;
    double s = 0.0, eps = 0.0, sigma = 0.5;
    double M = 4.0;     // slab width of the alpha sweep
    double alpha = 0.0; // slab centre of the M sweep
    std::vector<double> M_list{1, 2, 4, 8, 16, 32, 64};
    std::vector<double> alpha_list{0, 2, 4, 8, 16, 32, 64};
    std::vector<double> s_grid, eps_grid, sigma_grid;
    int m = 128;
    double K = 64.0;
    int trials = 4;
    int iterations = 40;
    bool exclude_resonant = false;
    double growth_threshold = 1.3;
};

struct InfrSection {
    double s = 0.3, eps = 0.55, sigma = 0.6;
    double time = 0.0;
    std::vector<double> N{16, 32, 64, 128, 256, 512, 1024};
    int m = 512;
    double K = 2048.0; // spacing 8: the fitted N range must stay below the extent
    int ensemble = 8;
    int order = 0;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EquationSection, name, sign, coupling, renormalize)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(GridSection, L, n, dealias)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DataSection, s, amplitude, margin, weighted, weight_r)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(StepperSection, dt, t_end, cfl_guard, samples)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SmoothingSection, fit_lo, fit_hi, shells_per_octave, min_shells,
                                                phase_resolution, exclude_deg, eps_step, refine, refine_eps)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(BoundsSection, mode, order, s, eps, sigma, M, alpha, M_list, alpha_list,
                                                s_grid, eps_grid, sigma_grid, m, K, trials, iterations,
                                                exclude_resonant, growth_threshold)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(InfrSection, s, eps, sigma, time, N, m, K, ensemble, order)

inline const std::vector<std::string>& experiment_kinds()
{
    static const std::vector<std::string> k{"simulate", "smoothing", "bounds", "infr", "report"};
    return k;
}

// One experiment. Keys outside the hash (workers, output) never change a payload.
struct ExperimentConfig {
    std::string kind = "smoothing";
    EquationSection equation;
    GridSection grid;
    DataSection data;
    StepperSection stepper;
    SmoothingSection smoothing;
    BoundsSection bounds;
    InfrSection infr;
    std::uint64_t seed_first = 0;
    int seed_count = 8;
    int workers = 1;
    std::string output; // run directory root; empty means the environment default

    json to_json() const
    {
        return json{{"kind", kind},         {"equation", equation},   {"grid", grid},
                    {"data", data},         {"stepper", stepper},     {"smoothing", smoothing},
                    {"bounds", bounds},     {"infr", infr},           {"seed_first", seed_first},
                    {"seed_count", seed_count}, {"workers", workers}, {"output", output}};
    }

    static ExperimentConfig from_json(const json& j)
    {
        ExperimentConfig c;
        c.kind = j.value("kind", c.kind);
        c.equation = j.value("equation", c.equation);
        c.grid = j.value("grid", c.grid);
        c.data = j.value("data", c.data);
        c.stepper = j.value("stepper", c.stepper);
        c.smoothing = j.value("smoothing", c.smoothing);
        c.bounds = j.value("bounds", c.bounds);
        c.infr = j.value("infr", c.infr);
        c.seed_first = j.value("seed_first", c.seed_first);
        c.seed_count = j.value("seed_count", c.seed_count);
        c.workers = j.value("workers", c.workers);
        c.output = j.value("output", c.output);
        return c;
    }

    // Canonical text: keys sorted, execution-only keys removed.
    std::string canonical() const
    {
        json j = to_json();
        j.erase("workers");
        j.erase("output");
        return j.dump();
    }
    std::string hash() const { return sha256_hex(canonical()); }

    EquationSpec equation_spec() const
    {
        return EquationSpec(equation_from_string(equation.name),
                            {equation.sign, equation.coupling, equation.renormalize});
    }
    int dim() const { return equation_spec().dim(); }

    // Every problem found, so one failed run reports them all.
    std::vector<std::string> errors() const;

    void validate() const
    {
        auto e = errors();
        if (e.empty()) return;
        std::string msg = "invalid configuration:";
        for (const auto& x : e) msg += "\n  - " + x;
        throw ValidationError(msg);
    }
};

namespace detail {
// Keys of `j` that have no counterpart in `ref`, as dotted paths.
inline void unknown_keys(const json& j, const json& ref, const std::string& path, std::vector<std::string>& out)
{
    if (!j.is_object() || !ref.is_object()) return;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string p = path.empty() ? it.key() : path + "." + it.key();
        if (!ref.contains(it.key()))
            out.push_back("unknown key '" + p + "'");
        else
            unknown_keys(it.value(), ref.at(it.key()), p, out);
    }
}
} // namespace detail

inline std::vector<std::string> ExperimentConfig::errors() const
{
    std::vector<std::string> e;
    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) e.push_back(msg);
    };
    bool kind_ok = false;
    for (const auto& k : experiment_kinds()) kind_ok = kind_ok || k == kind;
    check(kind_ok, "kind '" + kind + "' is not one of simulate, smoothing, bounds, infr, report");
    check(workers >= 1, "workers must be at least 1");
    if (kind == "report") return e;

    bool eq_ok = true;
    try {
        equation_from_string(equation.name);
    } catch (const std::exception&) {
        eq_ok = false;
        e.push_back("unknown equation '" + equation.name + "'");
    }
    check(equation.sign == 1.0 || equation.sign == -1.0, "equation.sign must be +1 or -1");
    check(std::isfinite(equation.coupling), "equation.coupling must be finite");

    if (kind == "simulate" || kind == "smoothing") {
        check(grid.L > 0.0, "grid.L must be positive");
        check(grid.n >= 8 && (grid.n & (grid.n - 1)) == 0, "grid.n must be a power of two >= 8");
        check(grid.dealias > 0.0 && grid.dealias <= 1.0, "grid.dealias must lie in (0, 1]");
        check(data.amplitude >= 0.0, "data.amplitude must be nonnegative");
        check(data.margin >= 0.0, "data.margin must be nonnegative");
        check(stepper.dt > 0.0, "stepper.dt must be positive");
        check(stepper.t_end > 0.0, "stepper.t_end must be positive");
        check(stepper.cfl_guard > 1.0, "stepper.cfl_guard must exceed 1");
        check(stepper.samples >= 1, "stepper.samples must be at least 1");
        check(seed_count >= 1, "seed_count must be at least 1");
        if (eq_ok) {
            const auto eq = equation_spec();
            check(!data.weighted || eq.dim() == 1, "weighted data is 1D only");
        }
    }
    if (kind == "smoothing") {
        const auto& sm = smoothing;
        check(sm.fit_lo > 0.0 && sm.fit_lo < sm.fit_hi, "smoothing window needs 0 < fit_lo < fit_hi");
        check(sm.shells_per_octave >= 1, "smoothing.shells_per_octave must be at least 1");
        check(sm.min_shells >= 2, "smoothing.min_shells must be at least 2");
        check(sm.phase_resolution >= 0.0, "smoothing.phase_resolution must be nonnegative");
        check(sm.exclude_deg >= 0.0 && sm.exclude_deg < 22.5, "smoothing.exclude_deg must lie in [0, 22.5)");
        check(sm.eps_step > 0.0, "smoothing.eps_step must be positive");
        check(sm.refine.empty() || sm.refine.size() >= 2, "smoothing.refine needs at least two resolutions");
        check(sm.refine.empty() || !sm.refine_eps.empty(), "smoothing.refine_eps must list eps values");
        if (eq_ok) {
            const auto eq = equation_spec();
            check(eq.s_admissible(data.s), "data.s is outside the admissible range of " + equation.name);
        }
    }
    if (kind == "bounds") {
        const auto& b = bounds;
        check(b.mode == "scaling" || b.mode == "feasibility", "bounds.mode must be scaling or feasibility");
        check(b.m >= 32 && b.m % 2 == 0, "bounds.m must be even and at least 32");
        check(b.K > 0.0, "bounds.K must be positive");
        check(b.trials >= 1 && b.iterations >= 1, "bounds.trials and bounds.iterations must be positive");
        check(b.sigma >= 0.0 && b.sigma < 1.0, "bounds.sigma must lie in [0, 1)");
        if (b.mode == "scaling") {
            check(b.M_list.size() >= 5 && b.alpha_list.size() >= 5, "bounds sweeps need at least 5 values each");
            check(b.M > 0.0, "bounds.M must be positive");
            for (double m : b.M_list) check(m > 0.0, "bounds.M_list entries must be positive");
        } else {
            check(!b.s_grid.empty() && !b.eps_grid.empty() && !b.sigma_grid.empty(),
                  "feasibility needs s_grid, eps_grid and sigma_grid");
            for (double sg : b.sigma_grid) check(sg > 0.0 && sg < 1.0, "bounds.sigma_grid entries must lie in (0, 1)");
            check(b.growth_threshold > 1.0, "bounds.growth_threshold must exceed 1");
        }
        if (eq_ok && b.order > 0) {
            try {
                equation_spec().term(b.order);
            } catch (const std::exception& x) {
                e.push_back(std::string("bounds.order: ") + x.what());
            }
        }
    }
    if (kind == "infr") {
        const auto& in = infr;
        check(in.sigma > 0.0 && in.sigma < 1.0, "infr.sigma must lie in (0, 1)");
        check(in.N.size() >= 5, "infr.N needs at least 5 thresholds");
        for (double n : in.N) check(n > 1.0, "infr.N entries must exceed 1");
        check(in.m >= 4 && in.m % 2 == 0, "infr.m must be even and at least 4");
        check(in.K > 0.0, "infr.K must be positive");
        check(in.ensemble >= 1, "infr.ensemble must be at least 1");
    }
    return e;
}

// Defaults of one experiment family for one equation. The smoothing family
// carries the per-equation settings used for the recorded runs; bound sweeps
// also depend on the mode.
inline json default_config(const std::string& kind, const std::string& eq_name, const std::string& mode = "scaling")
{
    ExperimentConfig c;
    c.kind = kind;
    c.equation.name = eq_name;
    const EquationName eq = equation_from_string(eq_name);
    const bool two_d = eq == EquationName::mzk;
    if (kind == "simulate") {
        c.grid = two_d ? GridSection{64.0, 128, 2.0 / 3.0} : GridSection{128.0, 1024, 2.0 / 3.0};
        c.data.s = two_d ? 1.75 : 0.75;
        c.seed_count = 1;
    }
    if (kind == "smoothing") {
        switch (eq) {
        case EquationName::nls: c.data.s = 0.3; break;
        case EquationName::mkdv: c.data.s = 0.5; break;
        case EquationName::kdv:
            c.data.s = 0.5;
            c.data.weighted = true;
            break;
        case EquationName::dnls:
            c.data.s = 0.75;
            c.data.amplitude = 0.05;
            break;
        case EquationName::mzk:
            c.data.s = 1.75;
            c.grid = {8.0, 256, 2.0 / 3.0};
            c.stepper.t_end = 0.25;
            c.smoothing.phase_resolution = 0.3;
            c.smoothing.exclude_deg = 10.0;
            break;
        }
    }
    if (kind == "bounds") {
        c.bounds.mode = mode;
        if (eq == EquationName::dnls) c.bounds.s = 0.6;
        // pair-cancelling resonances of the cubic KdV-type phase carry no smoothing at all
        if (eq == EquationName::mkdv) c.bounds.exclude_resonant = true;
        if (mode == "feasibility") {
            // every probe is repeated on the doubled lattice, so start one size down
            c.bounds.m = 64;
            c.bounds.K = 32.0;
            c.bounds.sigma_grid = {0.5, 0.9};
            switch (eq) {
            case EquationName::nls:
                c.bounds.s_grid = {0.15, 0.25, 0.35, 0.45};
                c.bounds.eps_grid = {0.2, 0.5, 0.9, 1.5};
                break;
            case EquationName::mkdv:
                // below s = 0.6 the lattice probe cannot resolve eps_th + 0.3 (see README)
                c.bounds.s_grid = {0.6, 0.7, 0.8, 0.9};
                c.bounds.eps_grid = {0.2, 0.5, 0.9, 1.5};
                break;
            default: break;
            }
        }
    }
    if (kind == "infr" && eq == EquationName::mkdv) {
        c.infr.s = 0.5;
        c.infr.eps = 0.4;
        c.infr.sigma = 0.75;
        // cubic phases need a finer spacing than the quadratic ones to resolve N <= 1024
        c.infr.K = 128.0;
    }
    return c.to_json();
}

// Parses a config file: JSON text, with unknown keys rejected.
inline json read_config_file(const std::string& path)
{
    std::ifstream is(path);
    require(bool(is), "cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(is, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ValidationError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    require(j.is_object(), "config file '" + path + "' must hold a JSON object");
    return j;
}

// defaults(kind, equation) <- file <- overrides, then typed and validated.
inline ExperimentConfig resolve_config(const json& file, const json& overrides)
{
    std::vector<std::string> unknown;
    const json ref = ExperimentConfig().to_json();
    detail::unknown_keys(file, ref, "", unknown);
    detail::unknown_keys(overrides, ref, "", unknown);
    auto pick = [&](const char* key, const char* sub, const std::string& fallback) {
        for (const json* j : {&overrides, &file}) {
            if (sub == nullptr) {
                if (j->contains(key) && (*j)[key].is_string()) return (*j)[key].get<std::string>();
            } else if (j->contains(key) && (*j)[key].is_object() && (*j)[key].contains(sub) &&
                       (*j)[key][sub].is_string()) {
                return (*j)[key][sub].get<std::string>();
            }
        }
        return fallback;
    };
    const std::string kind = pick("kind", nullptr, "smoothing");
    const std::string eq = pick("equation", "name", "nls");
    const std::string mode = pick("bounds", "mode", "scaling");
    json merged;
    try {
        merged = default_config(kind, eq, mode);
    } catch (const std::exception&) {
        merged = ExperimentConfig().to_json();
    }
    merged.merge_patch(file);
    merged.merge_patch(overrides);
    ExperimentConfig c;
    try {
        c = ExperimentConfig::from_json(merged);
        for (const auto& x : c.errors()) unknown.push_back(x);
    } catch (const json::exception& e) {
        unknown.push_back(std::string("type error: ") + e.what());
    }
    if (!unknown.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& x : unknown) msg += "\n  - " + x;
        throw ValidationError(msg);
    }
    return c;
}

} // namespace dsmooth
