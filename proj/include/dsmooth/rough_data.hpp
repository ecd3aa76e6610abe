#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "dsmooth/field.hpp"
#include "dsmooth/norms.hpp"

namespace dsmooth {

struct Envelope {
    enum class Kind { none, centered_bump };
    Kind kind = Kind::none;
    double width = 0.0;
};

struct RoughDataSpec {
    double s = 0.5;
    double margin = 0.01; // regularity margin delta_reg
    double amplitude = 0.1;
    std::uint64_t seed = 0;
    bool real = false;
    Envelope envelope;

    void validate(const SpectralGrid& g) const
    {
        require(amplitude >= 0.0 && std::isfinite(amplitude), "amplitude must be nonnegative");
        require(margin >= 0.0, "regularity margin must be nonnegative");
        if (envelope.kind == Envelope::Kind::centered_bump) {
            require(g.dim == 1, "envelopes are only supported in 1D");
            require(envelope.width > 0.0 && envelope.width < 0.25 * g.box_length,
                    "envelope width must lie in (0, L/4)");
        }
    }

    double decay_exponent(int dim) const { return s + 0.5 * dim + margin; }
};

// Standard complex Gaussian attached to one wavenumber. Each lattice point
// seeds its own engine from (seed, kx, ky), so a field drawn on a finer grid
// with the same box extends the coarse one mode by mode.
inline cplx mode_gaussian(std::uint64_t seed, int kx, int ky)
{
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(kx),
                      std::uint32_t(ky), 0x9e3779b9u};
    std::mt19937_64 eng(seq);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    double re = normal(eng);
    double im = normal(eng);
    return {re, im};
}

inline double centered_bump(const SpectralGrid& g, int j, double width)
{
    double x = centered_x(g, j) / width;
    return std::exp(-0.5 * x * x);
}

// Multiply the physical field by a centered Gaussian bump and re-truncate.
inline FourierField apply_envelope(const FourierField& f, double width)
{
    const SpectralGrid& g = f.grid;
    auto values = transform_inverse(f);
    for (int j = 0; j < g.n; ++j) values[std::size_t(j)] *= centered_bump(g, j, width);
    FourierField out;
    if (f.real_symmetric) {
        std::vector<double> r(values.size());
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = values[i].real();
        out = transform_forward(g, r);
    } else {
        out = transform_forward(g, values);
    }
    out.truncate();
    return out;
}

// u0(xi) = amplitude <xi>^{-(s + d/2 + margin)} g_xi on the retained band,
// Hermitian-paired for real data.
inline FourierField generate(const RoughDataSpec& spec, const SpectralGrid& g)
{
    spec.validate(g);
    FourierField f(g, spec.real);
    const double p = spec.decay_exponent(g.dim);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.retained(i)) continue;
        auto k = g.wavenumbers(i);
        const double w = spec.amplitude * std::pow(bracket(g.xi(i)), -p);
        if (!spec.real) {
            f[i] = w * mode_gaussian(spec.seed, k[0], k[1]);
            continue;
        }
        // draw on the half lattice (kx > 0, or kx == 0 and ky >= 0) and mirror
        bool upper = k[0] > 0 || (k[0] == 0 && k[1] >= 0);
        if (!upper) continue;
        std::size_t m = g.mirror(i);
        cplx z = mode_gaussian(spec.seed, k[0], k[1]);
        if (m == i) {
            f[i] = w * std::sqrt(2.0) * z.real();
        } else {
            f[i] = w * z;
            f[m] = std::conj(f[i]);
        }
    }
    if (spec.envelope.kind == Envelope::Kind::centered_bump) f = apply_envelope(f, spec.envelope.width);
    return f;
}

// Variant with finite <x>^r weighted norm: the field is localized by a centered
// bump (width from RoughDataSpec, L/16 by default), which smooths the coefficients
// on the scale 1/width. r = 0 switches the weight off.
inline FourierField generate_weighted(const RoughDataSpec& spec, const SpectralGrid& g, double r)
{
    require(g.dim == 1, "weighted data is 1D only");
    require(r >= 0.0, "weight exponent must be nonnegative");
    RoughDataSpec local = spec;
    if (r == 0.0) {
        local.envelope.kind = Envelope::Kind::none;
        return generate(local, g);
    }
    if (local.envelope.kind == Envelope::Kind::none) {
        local.envelope.kind = Envelope::Kind::centered_bump;
        local.envelope.width = g.box_length / 16.0;
    }
    return generate(local, g);
}

} // namespace dsmooth
