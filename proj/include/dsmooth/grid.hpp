#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "dsmooth/error.hpp"

namespace dsmooth {

using cplx = std::complex<double>;
using Freq = std::array<double, 2>; // (x, y); y stays 0 in 1D

inline constexpr double pi = std::numbers::pi;

// Japanese bracket <x> = sqrt(1 + |x|^2).
inline double bracket(double x) { return std::sqrt(1.0 + x * x); }
inline double bracket(const Freq& f) { return std::sqrt(1.0 + f[0] * f[0] + f[1] * f[1]); }

// Periodic box [0, L)^dim sampled with n points per axis. Coefficients are
// stored in FFT order, index j <-> wavenumber j for j < n/2 and j - n above;
// 2D arrays are row-major with x as the slow axis.
struct SpectralGrid {
    int dim = 1;
    double box_length = 2.0 * pi;
    int n = 64;
    double dealias_fraction = 2.0 / 3.0;
    bool any_even = false; // frequency lattices only need an even point count

    SpectralGrid() = default;
    SpectralGrid(int dim_, double L, int n_, double frac = 2.0 / 3.0)
        : dim(dim_), box_length(L), n(n_), dealias_fraction(frac)
    {
        validate();
    }

    // Lattice for direct sums: every mode kept, n any even number >= 4.
    static SpectralGrid frequency_lattice(int dim_, double L, int n_)
    {
        SpectralGrid g;
        g.dim = dim_;
        g.box_length = L;
        g.n = n_;
        g.dealias_fraction = 1.0;
        g.any_even = true;
        g.validate();
        return g;
    }

    void validate() const
    {
        require(dim == 1 || dim == 2, "grid dim must be 1 or 2");
        require(box_length > 0.0 && std::isfinite(box_length), "box length must be positive");
        if (any_even) require(n >= 4 && n % 2 == 0, "lattice size must be even and at least 4");
        else require(n >= 4 && (n & (n - 1)) == 0, "modes per dimension must be a power of two >= 4");
        require(dealias_fraction > 0.0 && dealias_fraction <= 1.0,
                "dealias fraction must lie in (0, 1]");
    }

    std::size_t size() const { return dim == 1 ? std::size_t(n) : std::size_t(n) * n; }
    double dxi() const { return 2.0 * pi / box_length; }
    double dx() const { return box_length / n; }
    double xi_max() const { return 0.5 * n * dxi(); }
    double xi_cut() const { return dealias_fraction * xi_max(); }

    int wavenumber(int j) const { return j < n / 2 ? j : j - n; }
    int index_of(int k) const { return k >= 0 ? k : k + n; }

    std::array<int, 2> wavenumbers(std::size_t idx) const
    {
        if (dim == 1) return {wavenumber(int(idx)), 0};
        return {wavenumber(int(idx / n)), wavenumber(int(idx % n))};
    }

    Freq xi(std::size_t idx) const
    {
        auto k = wavenumbers(idx);
        return {k[0] * dxi(), k[1] * dxi()};
    }

    double abs_xi(std::size_t idx) const
    {
        auto f = xi(idx);
        return std::hypot(f[0], f[1]);
    }

    // Index of the lattice point -xi (wavenumber -n/2 maps to itself).
    std::size_t mirror(std::size_t idx) const
    {
        auto k = wavenumbers(idx);
        if (dim == 1) return std::size_t(index_of(-k[0] == n / 2 ? -n / 2 : -k[0]));
        int kx = -k[0] == n / 2 ? -n / 2 : -k[0];
        int ky = -k[1] == n / 2 ? -n / 2 : -k[1];
        return std::size_t(index_of(kx)) * n + std::size_t(index_of(ky));
    }

    // Radial dealias mask, evaluated in integer arithmetic.
    bool retained(std::size_t idx) const
    {
        auto k = wavenumbers(idx);
        double kc = dealias_fraction * 0.5 * n;
        double k2 = double(k[0]) * k[0] + double(k[1]) * k[1];
        return k2 <= kc * kc * (1.0 + 1e-12);
    }

    // Physical sample position along one axis.
    double x(int j) const { return j * dx(); }

    bool operator==(const SpectralGrid& o) const
    {
        return dim == o.dim && box_length == o.box_length && n == o.n &&
               dealias_fraction == o.dealias_fraction;
    }
    bool operator!=(const SpectralGrid& o) const { return !(*this == o); }
};

// Indices of retained modes, in storage order.
inline std::vector<std::size_t> retained_indices(const SpectralGrid& g)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.retained(i)) out.push_back(i);
    return out;
}

} // namespace dsmooth
