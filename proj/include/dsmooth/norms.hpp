#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "dsmooth/field.hpp"

namespace dsmooth {

struct NormSpec {
    enum class Kind { sobolev, weighted_physical, lambda_window };
    Kind kind = Kind::sobolev;
    double s = 0.0;      // Sobolev exponent
    double r = 0.0;      // physical weight exponent
    double lambda = 2.0; // integrability exponent on |xi| < 1

    void validate() const
    {
        require(kind != Kind::lambda_window || lambda > 1.0, "lambda must exceed 1");
        require(r >= 0.0, "weight exponent must be nonnegative");
    }
};

// (sum <xi>^{2s} |f(xi)|^2 dxi^d)^{1/2}
inline double sobolev_norm(const FourierField& f, double s)
{
    const auto& g = f.grid;
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double a2 = std::norm(f[i]);
        if (a2 == 0.0) continue;
        acc += std::pow(bracket(g.xi(i)), 2.0 * s) * a2;
    }
    return std::sqrt(acc * std::pow(g.dxi(), g.dim));
}

// Plain L2 norm of physical samples over the box, by the rectangle rule
// (exact for trigonometric polynomials).
template <class T>
double physical_l2_norm(const SpectralGrid& g, const std::vector<T>& values)
{
    require(values.size() == g.size(), "physical sample count does not match grid");
    double acc = 0.0;
    for (const auto& v : values) acc += std::norm(v);
    return std::sqrt(acc * std::pow(g.dx(), g.dim));
}

// Signed distance of sample j to the box center.
inline double centered_x(const SpectralGrid& g, int j) { return g.x(j) - 0.5 * g.box_length; }

// (int <x_c>^{2r} |f(x)|^2 dx)^{1/2} with x_c measured from the box center.
template <class T>
double weighted_norm(const SpectralGrid& g, const std::vector<T>& values, double r)
{
    require(g.dim == 1, "weighted norm is defined on 1D grids");
    require(values.size() == g.size(), "physical sample count does not match grid");
    require(r >= 0.0, "weight exponent must be nonnegative");
    double acc = 0.0;
    for (int j = 0; j < g.n; ++j)
        acc += std::pow(bracket(centered_x(g, j)), 2.0 * r) * std::norm(values[std::size_t(j)]);
    return std::sqrt(acc * g.dx());
}

inline double weighted_norm(const FourierField& f, double r)
{
    return weighted_norm(f.grid, transform_inverse(f), r);
}

// Riemann-sum L^lambda norm of the coefficients on |xi| < 1.
inline double lambda_window_norm(const FourierField& f, double lambda)
{
    require(f.grid.dim == 1, "lambda window norm is defined on 1D grids");
    require(lambda > 1.0, "lambda must exceed 1");
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f.grid.abs_xi(i) < 1.0) acc += std::pow(std::abs(f[i]), lambda);
    return std::pow(acc * f.grid.dxi(), 1.0 / lambda);
}

// Sobolev plus window part: the adapted norm used for KdV data.
inline double adapted_norm(const FourierField& f, double s, double lambda)
{
    return sobolev_norm(f, s) + lambda_window_norm(f, lambda);
}

inline double norm(const FourierField& f, const NormSpec& spec)
{
    spec.validate();
    switch (spec.kind) {
    case NormSpec::Kind::sobolev: return sobolev_norm(f, spec.s);
    case NormSpec::Kind::weighted_physical: return weighted_norm(f, spec.r);
    case NormSpec::Kind::lambda_window: return lambda_window_norm(f, spec.lambda);
    }
    return 0.0;
}

// KdV exponent bookkeeping: 1 - sigma = 1/rho + 1/lambda, rho(2 sigma - 1 - eps) > 1,
// lambda <= 2/(1-s)^+. Returns rho from the identity and checks the rest.
struct KdvExponents {
    double sigma, lambda, rho;
    bool identity_ok, rho_ok, lambda_ok;
    bool valid() const { return identity_ok && rho_ok && lambda_ok; }
};

inline double kdv_lambda_cap(double s)
{
    double pos = std::max(0.0, 1.0 - s);
    return pos == 0.0 ? INFINITY : 2.0 / pos;
}

inline KdvExponents kdv_exponents(double s, double eps, double sigma, double lambda)
{
    KdvExponents e{sigma, lambda, 0.0, false, false, false};
    double inv_rho = 1.0 - sigma - 1.0 / lambda;
    // rho = infinity (1/rho = 0) is the endpoint case and is accepted
    e.identity_ok = inv_rho >= -1e-12 && lambda > 1.0;
    e.rho = inv_rho > 1e-12 ? 1.0 / inv_rho : INFINITY;
    const double slack = 2.0 * sigma - 1.0 - eps;
    e.rho_ok = e.identity_ok && slack > 0.0 && (std::isinf(e.rho) || e.rho * slack > 1.0);
    e.lambda_ok = lambda <= kdv_lambda_cap(s) * (1.0 + 1e-12);
    return e;
}

} // namespace dsmooth
