// Command line front end: one subcommand per experiment family plus report.
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dsmooth/experiment.hpp"
#include "dsmooth/report.hpp"

using namespace dsmooth;

namespace {

enum Exit { ok = 0, validation = 1, runtime = 2, warn = 3 };

struct Common {
    std::string config_file;
    std::string eq;
    double s = std::nan("");
    int seeds = 0;
    long long seed_first = -1;
    int workers = 0;
    std::string out;
    bool force = false;
    std::vector<std::string> sets;
};

// "a.b.c=value": value parsed as JSON when possible, else taken as a string.
void apply_set(json& o, const std::string& item)
{
    const auto eqpos = item.find('=');
    require(eqpos != std::string::npos && eqpos > 0, "--set expects key=value, got '" + item + "'");
    const std::string path = item.substr(0, eqpos), raw = item.substr(eqpos + 1);
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }
    json* node = &o;
    std::size_t start = 0;
    for (;;) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        require(!key.empty(), "bad key path '" + path + "'");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            break;
        }
        if (!node->contains(key) || !(*node)[key].is_object()) (*node)[key] = json::object();
        node = &(*node)[key];
        start = dot + 1;
    }
}

void add_common(CLI::App* app, Common& c)
{
    app->add_option("-c,--config", c.config_file, "JSON config file");
    app->add_option("--eq", c.eq, "equation: mkdv, kdv, nls, mzk, dnls");
    app->add_option("--s", c.s, "regularity index s");
    app->add_option("--seeds", c.seeds, "number of seeds");
    app->add_option("--seed-first", c.seed_first, "first seed");
    app->add_option("--workers", c.workers, "worker threads");
    app->add_option("-o,--out", c.out, "output root (default $DSMOOTH_OUTPUT_ROOT or ./runs)");
    app->add_flag("--force", c.force, "overwrite an existing run directory");
    app->add_option("--set", c.sets, "override any config key: section.key=value");
}

json overrides_from(const std::string& kind, const Common& c)
{
    json o{{"kind", kind}};
    if (!c.eq.empty()) o["equation"]["name"] = c.eq;
    if (!std::isnan(c.s)) {
        const char* section = kind == "bounds" ? "bounds" : (kind == "infr" ? "infr" : "data");
        o[section]["s"] = c.s;
    }
    if (c.seeds > 0) o["seed_count"] = c.seeds;
    if (c.seed_first >= 0) o["seed_first"] = c.seed_first;
    if (c.workers > 0) o["workers"] = c.workers;
    if (!c.out.empty()) o["output"] = c.out;
    for (const auto& s : c.sets) apply_set(o, s);
    return o;
}

int execute(const std::string& kind, const Common& c, const json& extra)
{
    json file = c.config_file.empty() ? json::object() : read_config_file(c.config_file);
    json o = overrides_from(kind, c);
    o.merge_patch(extra);
    ExperimentConfig cfg = resolve_config(file, o);
    std::cerr << "running " << cfg.kind << " (" << cfg.equation.name << "), config " << cfg.hash().substr(0, 12)
              << ", " << cfg.workers << " worker(s)\n";
    const fs::path dir = run_experiment(cfg, c.force);
    std::cout << dir.string() << "\n";
    std::ifstream is(dir / "report.json");
    json rep = json::parse(is);
    const json& r = rep["result"];
    if (cfg.kind == "smoothing") {
        std::cout << "eps_hat " << r["eps_hat"].dump() << " +- " << r["eps_hat_std"].dump() << " (eps_th "
                  << r["eps_th"].dump() << ", seeds " << r["seeds_used"].dump() << ")\n";
        for (const auto& n : r["notes"]) std::cout << "note: " << n.get<std::string>() << "\n";
        bool any_ok = false;
        for (const auto& s : r["per_seed"]) any_ok = any_ok || s["ok"].get<bool>();
        if (!any_ok) return runtime;
    } else if (cfg.kind == "bounds" && cfg.bounds.mode == "scaling") {
        std::cout << "beta_hat " << r["beta_hat"]["slope"].dump() << ", gamma_hat " << r["gamma_hat"]["slope"].dump()
                  << "\n";
    } else if (cfg.kind == "infr") {
        std::cout << "near-resonant slope " << r["near_fit"]["slope"].dump() << ", boundary slope "
                  << r["boundary_fit"]["slope"].dump() << "\n";
    } else if (cfg.kind == "simulate") {
        std::cout << "max profile change " << r["max_profile_change"].dump() << "\n";
    }
    return ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical experiments on nonlinear smoothing for dispersive equations"};
    app.require_subcommand(1);

    Common csim, csmooth, cbounds, cinfr;
    double sim_t_end = 0.0;
    bool sim_linear = false;
    auto* sim = app.add_subcommand("simulate", "evolve one rough datum and record the trajectory");
    add_common(sim, csim);
    sim->add_option("--t-end", sim_t_end, "final time");
    sim->add_flag("--linear", sim_linear, "switch the nonlinearity off");

    auto* smooth = app.add_subcommand("smoothing", "ensemble estimate of the smoothing exponent");
    add_common(smooth, csmooth);

    std::string mode, bound_kind;
    std::vector<double> sigmas, alphas, Ms, epss;
    auto* bounds = app.add_subcommand("bounds", "operator norm sweeps on a frequency lattice");
    add_common(bounds, cbounds);
    bounds->add_option("--mode", mode, "scaling or feasibility");
    bounds->add_option("--kind", bound_kind, "alphaM (slab operator, scaling) or sigma (feasibility)")
        ->check(CLI::IsMember({"alphaM", "sigma"}));
    bounds->add_option("--sigma", sigmas, "sigma (scaling) or sigma grid (feasibility)")->delimiter(',');
    bounds->add_option("--alpha", alphas, "alpha list to sweep, or the fixed alpha of the M sweep")->delimiter(',');
    bounds->add_option("--M", Ms, "M list to sweep, or the fixed M of the alpha sweep")->delimiter(',');
    bounds->add_option("--eps", epss, "eps grid (feasibility)")->delimiter(',');

    std::vector<double> Ns;
    double infr_sigma = 0.0, infr_eps = -1.0;
    auto* infr = app.add_subcommand("infr", "N-scalings of the first normal form step");
    add_common(infr, cinfr);
    infr->add_option("--sigma", infr_sigma, "sigma (also the step exponent delta)");
    infr->add_option("--eps", infr_eps, "smoothing exponent of the target norm");
    infr->add_option("--N", Ns, "thresholds, comma separated")->delimiter(',');

    std::string report_dir, report_csv;
    auto* rep = app.add_subcommand("report", "summarize run directories against the acceptance targets");
    rep->add_option("dir", report_dir, "directory holding runs")->required();
    rep->add_option("--csv", report_csv, "also write the table as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : validation;
    }

    try {
        if (*sim) {
            json extra = json::object();
            if (sim_t_end > 0.0) extra["stepper"]["t_end"] = sim_t_end;
            if (sim_linear) extra["equation"]["coupling"] = 0.0;
            return execute("simulate", csim, extra);
        }
        if (*smooth) return execute("smoothing", csmooth, json::object());
        if (*bounds) {
            json extra = json::object();
            if (!bound_kind.empty()) {
                const std::string implied = bound_kind == "alphaM" ? "scaling" : "feasibility";
                if (!mode.empty() && mode != implied)
                    throw ValidationError("--kind " + bound_kind + " conflicts with --mode " + mode);
                mode = implied;
            }
            if (!mode.empty()) extra["bounds"]["mode"] = mode;
            if (!sigmas.empty()) {
                if (mode == "feasibility") extra["bounds"]["sigma_grid"] = sigmas;
                else extra["bounds"]["sigma"] = sigmas.front();
            }
            // a single value fixes the parameter of the other sweep; a list is swept
            if (alphas.size() == 1) extra["bounds"]["alpha"] = alphas.front();
            else if (!alphas.empty()) extra["bounds"]["alpha_list"] = alphas;
            if (Ms.size() == 1) extra["bounds"]["M"] = Ms.front();
            else if (!Ms.empty()) extra["bounds"]["M_list"] = Ms;
            if (!epss.empty()) extra["bounds"]["eps_grid"] = epss;
            return execute("bounds", cbounds, extra);
        }
        if (*infr) {
            json extra = json::object();
            if (infr_sigma > 0.0) extra["infr"]["sigma"] = infr_sigma;
            if (infr_eps >= 0.0) extra["infr"]["eps"] = infr_eps;
            if (!Ns.empty()) extra["infr"]["N"] = Ns;
            return execute("infr", cinfr, extra);
        }
        if (*rep) {
            Summary s = summarize_runs(report_dir);
            std::cout << s.text();
            if (!report_csv.empty()) {
                std::ofstream os(report_csv);
                if (!os) throw std::runtime_error("cannot write " + report_csv);
                os << s.csv();
            }
            return s.all_pass() ? ok : warn;
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return validation;
    } catch (const RunExists& e) {
        std::cerr << "error: " << e.what() << "\n";
        return validation;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return runtime;
    }
    return ok;
}
