#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "dsmooth/fft.hpp"
#include "dsmooth/grid.hpp"

namespace dsmooth {

// Fourier coefficients on a SpectralGrid, normalized so that e^{i xi0 x} has
// unit amplitude at xi0. real_symmetric marks fields whose physical values are
// real, i.e. coeff(-xi) == conj(coeff(xi)).
struct FourierField {
    SpectralGrid grid;
    std::vector<cplx> coeffs;
    bool real_symmetric = false;

    FourierField() = default;
    explicit FourierField(const SpectralGrid& g, bool real = false)
        : grid(g), coeffs(g.size(), cplx(0.0)), real_symmetric(real) {}
    FourierField(const SpectralGrid& g, std::vector<cplx> c, bool real)
        : grid(g), coeffs(std::move(c)), real_symmetric(real)
    {
        require(coeffs.size() == grid.size(), "coefficient count does not match grid");
    }

    std::size_t size() const { return coeffs.size(); }
    cplx& operator[](std::size_t i) { return coeffs[i]; }
    const cplx& operator[](std::size_t i) const { return coeffs[i]; }

    FourierField& operator+=(const FourierField& o)
    {
        require(grid == o.grid, "grid mismatch");
        for (std::size_t i = 0; i < size(); ++i) coeffs[i] += o.coeffs[i];
        real_symmetric = real_symmetric && o.real_symmetric;
        return *this;
    }
    FourierField& operator-=(const FourierField& o)
    {
        require(grid == o.grid, "grid mismatch");
        for (std::size_t i = 0; i < size(); ++i) coeffs[i] -= o.coeffs[i];
        real_symmetric = real_symmetric && o.real_symmetric;
        return *this;
    }
    FourierField& operator*=(double a)
    {
        for (auto& c : coeffs) c *= a;
        return *this;
    }

    // Zero every coefficient outside the dealias mask.
    void truncate()
    {
        for (std::size_t i = 0; i < size(); ++i)
            if (!grid.retained(i)) coeffs[i] = 0.0;
    }

    double max_abs() const
    {
        double m = 0.0;
        for (const auto& c : coeffs) m = std::max(m, std::abs(c));
        return m;
    }
};

inline FourierField operator+(FourierField a, const FourierField& b) { return a += b; }
inline FourierField operator-(FourierField a, const FourierField& b) { return a -= b; }

// Largest violation of coeff(-xi) == conj(coeff(xi)).
inline double hermitian_defect(const FourierField& f)
{
    double d = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        d = std::max(d, std::abs(f[f.grid.mirror(i)] - std::conj(f[i])));
    return d;
}

// Symmetrize a nearly Hermitian field exactly.
inline void enforce_hermitian(FourierField& f)
{
    for (std::size_t i = 0; i < f.size(); ++i) {
        std::size_t j = f.grid.mirror(i);
        if (j == i) {
            f[i] = f[i].real();
        } else if (j > i) {
            cplx avg = 0.5 * (f[i] + std::conj(f[j]));
            f[i] = avg;
            f[j] = std::conj(avg);
        }
    }
    f.real_symmetric = true;
}

inline FourierField transform_forward(const SpectralGrid& g, const std::vector<cplx>& values,
                                      bool real_symmetric = false)
{
    require(values.size() == g.size(), "physical sample count does not match grid");
    FourierField out(g, real_symmetric);
    fft::c2c(fft::Kind::forward, g.dim, g.n, values.data(), out.coeffs.data());
    const double scale = 1.0 / double(g.size());
    for (auto& c : out.coeffs) c *= scale;
    return out;
}

inline FourierField transform_forward(const SpectralGrid& g, const std::vector<double>& values)
{
    require(values.size() == g.size(), "physical sample count does not match grid");
    std::vector<cplx> c(values.begin(), values.end());
    FourierField out = transform_forward(g, c, true);
    enforce_hermitian(out);
    return out;
}

inline std::vector<cplx> transform_inverse(const FourierField& f)
{
    std::vector<cplx> out(f.size());
    fft::c2c(fft::Kind::backward, f.grid.dim, f.grid.n, f.coeffs.data(), out.data());
    return out;
}

inline std::vector<double> transform_inverse_real(const FourierField& f)
{
    auto c = transform_inverse(f);
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
    return out;
}

// Spectral partial derivative along axis (0 = x, 1 = y).
inline FourierField derivative(const FourierField& f, int axis = 0)
{
    FourierField out(f.grid, f.real_symmetric);
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto k = f.grid.wavenumbers(i);
        // the unpaired Nyquist mode has no real derivative
        if (k[axis] == -f.grid.n / 2) continue;
        out[i] = cplx(0.0, k[axis] * f.grid.dxi()) * f[i];
    }
    return out;
}

// Transforms between a field and its samples on a grid refined by an integer
// pad factor, the working space for alias-free products. Each instance owns
// its scratch buffers, so use one per thread.
class PaddedTransform {
public:
    PaddedTransform(const SpectralGrid& g, int pad) : grid_(g), pad_(pad), m_(g.n * pad)
    {
        require(pad >= 1, "pad factor must be positive");
        // FFTW handles any size, but the padded grid stays a multiple of n
        total_ = g.dim == 1 ? std::size_t(m_) : std::size_t(m_) * m_;
        half_ = g.dim == 1 ? std::size_t(m_ / 2 + 1) : std::size_t(m_) * (m_ / 2 + 1);
        spec_.assign(total_, cplx(0.0));
        half_spec_.assign(half_, cplx(0.0));
    }

    const SpectralGrid& grid() const { return grid_; }
    int padded_n() const { return m_; }
    std::size_t physical_size() const { return total_; }

    void to_physical(const FourierField& f, cplx* out)
    {
        spread(f);
        fft::c2c(fft::Kind::backward, grid_.dim, m_, spec_.data(), out);
    }

    void to_physical(const FourierField& f, double* out)
    {
        spread(f);
        if (grid_.dim == 1) {
            std::copy(spec_.begin(), spec_.begin() + long(half_), half_spec_.begin());
        } else {
            const std::size_t h = std::size_t(m_ / 2 + 1);
            for (std::size_t a = 0; a < std::size_t(m_); ++a)
                for (std::size_t b = 0; b < h; ++b) half_spec_[a * h + b] = spec_[a * m_ + b];
        }
        fft::c2r(grid_.dim, m_, half_spec_.data(), out);
    }

    // Coefficients of padded samples on the original lattice, masked to the
    // dealias cutoff.
    FourierField from_physical(const cplx* in)
    {
        fft::c2c(fft::Kind::forward, grid_.dim, m_, in, spec_.data());
        return gather(false);
    }

    FourierField from_physical(const double* in)
    {
        fft::r2c(grid_.dim, m_, in, half_spec_.data());
        const std::size_t h = std::size_t(m_ / 2 + 1);
        if (grid_.dim == 1) {
            for (std::size_t b = 0; b < h; ++b) spec_[b] = half_spec_[b];
            for (std::size_t b = h; b < std::size_t(m_); ++b) spec_[b] = std::conj(half_spec_[m_ - b]);
        } else {
            for (std::size_t a = 0; a < std::size_t(m_); ++a) {
                std::size_t ma = (m_ - a) % m_;
                for (std::size_t b = 0; b < std::size_t(m_); ++b) {
                    spec_[a * m_ + b] = b < h ? half_spec_[a * h + b]
                                              : std::conj(half_spec_[ma * h + (m_ - b)]);
                }
            }
        }
        return gather(true);
    }

private:
    std::size_t padded_index(int kx, int ky) const
    {
        auto wrap = [this](int k) { return std::size_t(k >= 0 ? k : k + m_); };
        return grid_.dim == 1 ? wrap(kx) : wrap(kx) * m_ + wrap(ky);
    }

    // The Nyquist coefficient of the n-grid is split evenly between +n/2 and
    // -n/2 so that real fields stay real on the padded grid.
    void spread(const FourierField& f)
    {
        require(f.grid == grid_, "grid mismatch in padded transform");
        std::fill(spec_.begin(), spec_.end(), cplx(0.0));
        const int nh = grid_.n / 2;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const cplx c = f[i];
            if (c == cplx(0.0)) continue;
            auto k = grid_.wavenumbers(i);
            const bool nx = k[0] == -nh, ny = grid_.dim == 2 && k[1] == -nh;
            if (!nx && !ny) {
                spec_[padded_index(k[0], k[1])] += c;
                continue;
            }
            int xs[2] = {k[0], nh}, ys[2] = {k[1], nh};
            int cx = nx ? 2 : 1, cy = ny ? 2 : 1;
            double w = 1.0 / double(cx * cy);
            for (int a = 0; a < cx; ++a)
                for (int b = 0; b < cy; ++b) spec_[padded_index(xs[a], ys[b])] += w * c;
        }
    }

    FourierField gather(bool real)
    {
        FourierField out(grid_, real);
        const double scale = 1.0 / double(total_);
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (!grid_.retained(i)) continue;
            auto k = grid_.wavenumbers(i);
            out[i] = spec_[padded_index(k[0], k[1])] * scale;
        }
        return out;
    }

    SpectralGrid grid_;
    int pad_;
    int m_;
    std::size_t total_ = 0, half_ = 0;
    std::vector<cplx> spec_, half_spec_;
};

} // namespace dsmooth
