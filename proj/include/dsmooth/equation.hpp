#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <vector>

#include "dsmooth/grid.hpp"

namespace dsmooth {

enum class EquationName { mkdv, kdv, nls, mzk, dnls };

inline std::string to_string(EquationName e)
{
    switch (e) {
    case EquationName::mkdv: return "mkdv";
    case EquationName::kdv: return "kdv";
    case EquationName::nls: return "nls";
    case EquationName::mzk: return "mzk";
    case EquationName::dnls: return "dnls";
    }
    return "?";
}

inline EquationName equation_from_string(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    if (s == "mkdv") return EquationName::mkdv;
    if (s == "kdv") return EquationName::kdv;
    if (s == "nls") return EquationName::nls;
    if (s == "mzk") return EquationName::mzk;
    if (s == "dnls" || s == "dnls_gauged" || s == "dnls*") return EquationName::dnls;
    throw ValidationError("unknown equation '" + s + "'");
}

// An interaction xi = sum s_j xi_j.
struct FrequencyTuple {
    Freq xi{0.0, 0.0};
    std::vector<Freq> inputs;
};

struct NonlinearTerm {
    int order;
    std::vector<int> signature;
};

// The displayed sign of the nonlinearity, an overall coupling (0 switches the
// nonlinearity off), and Wick ordering of the monomials.
struct NonlinearityOptions {
    double sign = 1.0;
    double coupling = 1.0;
    bool renormalize = false;
};

class EquationSpec {
public:
    EquationName name = EquationName::nls;
    NonlinearityOptions options;

    EquationSpec() = default;
    explicit EquationSpec(EquationName n, NonlinearityOptions o = {}) : name(n), options(o)
    {
        require(o.sign == 1.0 || o.sign == -1.0, "nonlinearity sign must be +1 or -1");
        require(std::isfinite(o.coupling), "coupling must be finite");
    }

    int dim() const { return name == EquationName::mzk ? 2 : 1; }

    // Real-valued flows: the state is a real field.
    bool real() const
    {
        return name == EquationName::mkdv || name == EquationName::kdv || name == EquationName::mzk;
    }

    // L(xi) with linear group e^{-itL(xi)}.
    double dispersion(const Freq& f) const
    {
        switch (name) {
        case EquationName::mkdv:
        case EquationName::kdv: return -f[0] * f[0] * f[0];
        case EquationName::nls:
        case EquationName::dnls: return f[0] * f[0];
        case EquationName::mzk: return -(f[0] * f[0] * f[0] + f[1] * f[1] * f[1]);
        }
        return 0.0;
    }
    double dispersion(double xi) const { return dispersion(Freq{xi, 0.0}); }

    // max |grad L| over the ball |xi| <= rho.
    double max_group_speed(double rho) const
    {
        switch (name) {
        case EquationName::nls:
        case EquationName::dnls: return 2.0 * rho;
        default: return 3.0 * rho * rho;
        }
    }

    std::vector<NonlinearTerm> terms() const
    {
        switch (name) {
        case EquationName::mkdv:
        case EquationName::mzk: return {{3, {1, 1, 1}}};
        case EquationName::kdv: return {{2, {1, 1}}};
        case EquationName::nls: return {{3, {1, -1, 1}}};
        case EquationName::dnls: return {{3, {1, -1, 1}}, {5, {1, -1, 1, -1, 1}}};
        }
        return {};
    }

    NonlinearTerm term(int order) const
    {
        for (auto& t : terms())
            if (t.order == order) return t;
        throw ValidationError(to_string(name) + " has no term of order " + std::to_string(order));
    }

    // Highest nonlinearity degree; sets the padding of the products.
    int max_order() const { return name == EquationName::dnls ? 5 : (name == EquationName::kdv ? 2 : 3); }

    void check_constraint(const FrequencyTuple& t) const
    {
        const auto sig = term(int(t.inputs.size())).signature;
        Freq sum{0.0, 0.0};
        double scale = std::abs(t.xi[0]) + std::abs(t.xi[1]);
        for (std::size_t j = 0; j < sig.size(); ++j) {
            sum[0] += sig[j] * t.inputs[j][0];
            sum[1] += sig[j] * t.inputs[j][1];
            scale += std::abs(t.inputs[j][0]) + std::abs(t.inputs[j][1]);
        }
        const double tol = 1e-12 * std::max(1.0, scale);
        require(std::abs(sum[0] - t.xi[0]) <= tol && std::abs(sum[1] - t.xi[1]) <= tol,
                "frequency tuple violates the signed-sum constraint");
        require(dim() == 2 || (t.xi[1] == 0.0), "1D equation given a 2D tuple");
    }

    // Closed-form resonance function.
    double phase(const FrequencyTuple& t) const
    {
        check_constraint(t);
        return phase_unchecked(t);
    }

    double phase_unchecked(const FrequencyTuple& t) const
    {
        const auto& x = t.xi;
        const auto& in = t.inputs;
        switch (name) {
        case EquationName::mkdv:
            return 3.0 * (x[0] - in[0][0]) * (x[0] - in[1][0]) * (x[0] - in[2][0]);
        case EquationName::kdv: return 3.0 * x[0] * in[0][0] * in[1][0];
        case EquationName::nls: return (x[0] - in[0][0]) * (x[0] - in[2][0]);
        case EquationName::mzk:
            return (x[0] - in[0][0]) * (x[0] - in[1][0]) * (x[0] - in[2][0]) +
                   (x[1] - in[0][1]) * (x[1] - in[1][1]) * (x[1] - in[2][1]);
        case EquationName::dnls:
            if (in.size() == 3) return 2.0 * (x[0] - in[0][0]) * (x[0] - in[2][0]);
            {
                double p = x[0] * x[0];
                for (std::size_t j = 0; j < in.size(); ++j)
                    p += (j % 2 == 0 ? -1.0 : 1.0) * in[j][0] * in[j][0];
                return p;
            }
        }
        return 0.0;
    }

    // -L(xi) + sum s_j L(xi_j).
    double dispersion_combination(const FrequencyTuple& t) const
    {
        const auto sig = term(int(t.inputs.size())).signature;
        double c = -dispersion(t.xi);
        for (std::size_t j = 0; j < sig.size(); ++j) c += sig[j] * dispersion(t.inputs[j]);
        return c;
    }

    // phase = phase_constant * dispersion_combination. The sign depends on the
    // family; only |phase| enters any bound.
    double phase_constant() const
    {
        switch (name) {
        case EquationName::mkdv:
        case EquationName::kdv: return 1.0;
        case EquationName::nls: return -0.5;
        case EquationName::mzk: return 1.0 / 3.0;
        case EquationName::dnls: return -1.0;
        }
        return 0.0;
    }

    // Symbol multiplying the product in the profile equation, constants dropped.
    cplx multiplier(const FrequencyTuple& t) const
    {
        switch (name) {
        case EquationName::mkdv:
        case EquationName::kdv: return t.xi[0];
        case EquationName::nls: return 1.0;
        case EquationName::mzk: return t.xi[0] + t.xi[1];
        case EquationName::dnls: return t.inputs.size() == 3 ? t.inputs[1][0] : 1.0;
        }
        return 0.0;
    }

    double s_min() const
    {
        switch (name) {
        case EquationName::mkdv: return 0.25;
        case EquationName::kdv:
        case EquationName::nls: return 0.0;
        case EquationName::mzk: return 1.5;
        case EquationName::dnls: return 0.5;
        }
        return 0.0;
    }

    bool s_min_inclusive() const { return name == EquationName::kdv || name == EquationName::nls; }

    bool s_admissible(double s) const { return s_min_inclusive() ? s >= s_min() : s > s_min(); }

    // Predicted smoothing exponent.
    double smoothing_law(double s) const
    {
        require(s_admissible(s), "s=" + std::to_string(s) + " is below the validity range for " +
                                     to_string(name));
        switch (name) {
        case EquationName::mkdv: return std::min((4.0 * s - 1.0) / 2.0, 1.0);
        case EquationName::kdv: return std::min(s, 1.0);
        case EquationName::nls: return std::min(2.0 * s, 1.0);
        case EquationName::mzk: return std::min(2.0 * s - 3.0, 1.0);
        case EquationName::dnls: return std::min(2.0 * s - 1.0, 0.5);
        }
        return 0.0;
    }
};

} // namespace dsmooth
