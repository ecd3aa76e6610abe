#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dsmooth/equation.hpp"
#include "dsmooth/error.hpp"

namespace dsmooth {

using json = nlohmann::json;

// Lower targets for eps-hat in the recorded smoothing runs, keyed by (equation, s).
// Other cases are held to half the threshold law.
inline double smoothing_target(const std::string& eq, double s, double eps_th)
{
    static const std::map<std::pair<std::string, double>, double> table{
        {{"nls", 0.3}, 0.40},  {{"mkdv", 0.5}, 0.33}, {{"mkdv", 0.75}, 0.60},
        {{"kdv", 0.5}, 0.33},  {{"dnls", 0.75}, 0.30}, {{"mzk", 1.75}, 0.25}};
    for (const auto& [key, v] : table)
        if (key.first == eq && std::abs(key.second - s) < 1e-9) return v;
    return 0.5 * eps_th;
}

struct SummaryRow {
    std::string run, kind, equation, quantity;
    double value = 0.0, target = 0.0;
    std::string relation; // ">=", "<=", "within"
    bool pass = false;
};

struct Summary {
    std::vector<SummaryRow> rows;
    bool all_pass() const
    {
        return std::all_of(rows.begin(), rows.end(), [](const SummaryRow& r) { return r.pass; });
    }
    std::string text() const;
    std::string csv() const;
};

namespace detail {
inline double num_or_nan(const json& j, const char* key)
{
    return j.contains(key) && j[key].is_number() ? j[key].get<double>() : std::nan("");
}

inline void summarize_one(const std::string& run, const json& rep, std::vector<SummaryRow>& out)
{
    const std::string kind = rep.value("kind", "");
    const json& r = rep.at("result");
    const std::string eq = r.value("equation", "");
    auto add = [&](std::string q, double v, std::string rel, double target, bool pass) {
        out.push_back({run, kind, eq, std::move(q), v, target, std::move(rel), pass});
    };
    if (kind == "smoothing") {
        const double s = r.at("s").get<double>(), th = r.at("eps_th").get<double>();
        const double e = num_or_nan(r, "eps_hat");
        const double target = smoothing_target(eq, s, th);
        add("eps_hat(s=" + std::to_string(s).substr(0, 4) + ")", e, ">=", target, !std::isnan(e) && e >= target);
    } else if (kind == "bounds") {
        if (r.value("mode", "") == "scaling") {
            const double b = num_or_nan(r.at("beta_hat"), "slope"), g = num_or_nan(r.at("gamma_hat"), "slope");
            const double gt = eq == "dnls" ? 0.35 : 0.15;
            add("beta_hat", b, "<=", 0.65, b <= 0.65);
            add("gamma_hat", g, "<=", gt, g <= gt);
        } else {
            for (const auto& c : r.at("cells")) {
                const double s = c.at("s").get<double>(), e = c.at("eps").get<double>();
                const double th = c.at("eps_th").get<double>();
                const bool bounded = c.at("bounded").get<bool>();
                const std::string q = "cell(s=" + std::to_string(s).substr(0, 4) + ",eps=" + std::to_string(e).substr(0, 4) + ")";
                if (e < th) add(q + " bounded", bounded ? 1.0 : 0.0, ">=", 1.0, bounded);
                else if (e >= th + 0.3 - 1e-12) add(q + " unbounded", bounded ? 0.0 : 1.0, ">=", 1.0, !bounded);
            }
        }
    } else if (kind == "infr") {
        const double sigma = r.at("sigma").get<double>();
        const double b = num_or_nan(r.at("boundary_fit"), "slope"), n = num_or_nan(r.at("near_fit"), "slope");
        add("boundary_slope", b, "within 0.15 of", -(1.0 - sigma), std::abs(b + (1.0 - sigma)) <= 0.15);
        add("near_resonant_slope", n, "<=", sigma + 0.15, n <= sigma + 0.15);
    } else if (kind == "simulate") {
        if (r.value("linear", false)) {
            const double d = num_or_nan(r, "max_profile_change");
            add("max_profile_change", d, "<", 1e-12, d < 1e-12);
        }
    }
}
} // namespace detail

// Collects report.json in `dir` and in its immediate subdirectories.
inline Summary summarize_runs(const std::filesystem::path& dir)
{
    namespace fs = std::filesystem;
    require(fs::is_directory(dir), "not a directory: " + dir.string());
    std::vector<fs::path> files;
    if (fs::exists(dir / "report.json")) files.push_back(dir / "report.json");
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_directory() && fs::exists(e.path() / "report.json")) files.push_back(e.path() / "report.json");
    require(!files.empty(), "no reports found in " + dir.string());
    std::sort(files.begin(), files.end());
    Summary s;
    for (const auto& f : files) {
        std::ifstream is(f);
        json rep;
        try {
            rep = json::parse(is);
        } catch (const json::parse_error& e) {
            throw ValidationError("unreadable report " + f.string() + ": " + e.what());
        }
        detail::summarize_one(f.parent_path().filename().string(), rep, s.rows);
    }
    return s;
}

inline std::string Summary::text() const
{
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-28s %-10s %-6s %-34s %12s %-15s %9s  %s\n", "run", "kind", "eq", "quantity",
                  "value", "relation", "target", "status");
    os << buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-28s %-10s %-6s %-34s %12.5g %-15s %9.4g  %s\n", r.run.c_str(), r.kind.c_str(),
                      r.equation.c_str(), r.quantity.c_str(), r.value, r.relation.c_str(), r.target,
                      r.pass ? "pass" : "WARN");
        os << buf;
    }
    return os.str();
}

inline std::string Summary::csv() const
{
    std::ostringstream os;
    os << "run,kind,equation,quantity,value,relation,target,status\n";
    for (const auto& r : rows) {
        char v[32], t[32];
        std::snprintf(v, sizeof v, "%.17g", r.value);
        std::snprintf(t, sizeof t, "%.17g", r.target);
        os << r.run << ',' << r.kind << ',' << r.equation << ",\"" << r.quantity << "\"," << v << ",\"" << r.relation
           << "\"," << t << ',' << (r.pass ? "pass" : "warn") << '\n';
    }
    return os.str();
}

} // namespace dsmooth
