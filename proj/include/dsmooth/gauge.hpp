#pragma once

#include <cmath>
#include <vector>

#include "dsmooth/grid.hpp"

namespace dsmooth {

// Cumulative trapezoid integral of |u|^2 from the left box edge.
inline std::vector<double> cumulative_mass(const SpectralGrid& g, const std::vector<cplx>& u)
{
    require(g.dim == 1 && u.size() == g.size(), "gauge transform needs 1D samples on the grid");
    std::vector<double> acc(u.size(), 0.0);
    const double h = 0.5 * g.dx();
    for (std::size_t j = 1; j < u.size(); ++j)
        acc[j] = acc[j - 1] + h * (std::norm(u[j - 1]) + std::norm(u[j]));
    return acc;
}

// w = exp(-i int_{left}^x |u|^2) u. The phase only depends on |u|, which the
// map preserves, so the inverse applies the opposite phase.
inline std::vector<cplx> gauge_forward(const SpectralGrid& g, const std::vector<cplx>& u)
{
    auto phase = cumulative_mass(g, u);
    std::vector<cplx> w(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) w[j] = std::polar(1.0, -phase[j]) * u[j];
    return w;
}

inline std::vector<cplx> gauge_inverse(const SpectralGrid& g, const std::vector<cplx>& w)
{
    auto phase = cumulative_mass(g, w);
    std::vector<cplx> u(w.size());
    for (std::size_t j = 0; j < w.size(); ++j) u[j] = std::polar(1.0, phase[j]) * w[j];
    return u;
}

} // namespace dsmooth
