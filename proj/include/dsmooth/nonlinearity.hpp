#pragma once

#include <vector>

#include "dsmooth/equation.hpp"
#include "dsmooth/field.hpp"
#include "dsmooth/product.hpp"

namespace dsmooth {

// Fourier coefficients of N(u) for the equation written as
// u_t = -i L(D) u + N(u):
//   mkdv  u_t + u_xxx + sign (u^3)_x = 0         N = -sign d_x(u^3)
//   kdv   u_t + u_xxx + sign (u^2)_x = 0         N = -sign d_x(u^2)
//   nls   i u_t + u_xx + sign |u|^2 u = 0        N = i sign |u|^2 u
//   mzk   u_t + u_xxx + u_yyy = sign (d_x + d_y)(u^3)
//   dnls  i w_t + w_xx = -i w^2 d_x conj(w) - |w|^4 w / 2 (times sign)
// With renormalize set the monomials are Wick ordered against the spatial
// mean of |u|^2, which removes the exactly resonant self-interaction that a
// periodic lattice keeps but the line does not see.
//
// The evaluator owns padded scratch space; use one instance per thread.
class NonlinearEvaluator {
public:
    NonlinearEvaluator(const EquationSpec& eq, const SpectralGrid& g)
        : eq_(eq), grid_(g), pt_(g, pad_factor(eq.max_order()))
    {
        require(g.dim == eq.dim(), "grid dimension does not match " + to_string(eq.name));
        const std::size_t m = pt_.physical_size();
        if (eq.real()) {
            ru_.resize(m);
        } else {
            cu_.resize(m);
            cp_.resize(m);
            if (eq.name == EquationName::dnls) cux_.resize(m);
        }
    }

    const EquationSpec& equation() const { return eq_; }

    FourierField operator()(const FourierField& u)
    {
        require(u.grid == grid_, "field grid does not match evaluator grid");
        const double amp = eq_.options.sign * eq_.options.coupling;
        if (eq_.options.coupling == 0.0) return FourierField(grid_, eq_.real());
        switch (eq_.name) {
        case EquationName::mkdv: return real_cubic(u, amp, false);
        case EquationName::mzk: return real_cubic(u, amp, true);
        case EquationName::kdv: return kdv(u, amp);
        case EquationName::nls: return nls(u, amp);
        case EquationName::dnls: return dnls(u, amp);
        }
        return FourierField(grid_);
    }

private:
    static double mass(const FourierField& u)
    {
        double m = 0.0;
        for (const auto& c : u.coeffs) m += std::norm(c);
        return m;
    }

    FourierField real_cubic(const FourierField& u, double amp, bool two_d)
    {
        pt_.to_physical(u, ru_.data());
        const double mu = eq_.options.renormalize ? mass(u) : 0.0;
        for (auto& v : ru_) v = v * v * v - 3.0 * mu * v;
        FourierField p = pt_.from_physical(ru_.data());
        // mkdv: -amp d_x;  mzk: +amp (d_x + d_y)
        for (std::size_t i = 0; i < p.size(); ++i) {
            auto xi = grid_.xi(i);
            double k = two_d ? xi[0] + xi[1] : -xi[0];
            p[i] *= cplx(0.0, amp * k);
        }
        return p;
    }

    FourierField kdv(const FourierField& u, double amp)
    {
        pt_.to_physical(u, ru_.data());
        const double mean = eq_.options.renormalize ? u[0].real() : 0.0;
        for (auto& v : ru_) v = (v - mean) * (v - mean);
        FourierField p = pt_.from_physical(ru_.data());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] *= cplx(0.0, -amp * grid_.xi(i)[0]);
        return p;
    }

    FourierField nls(const FourierField& u, double amp)
    {
        pt_.to_physical(u, cu_.data());
        const double mu = eq_.options.renormalize ? mass(u) : 0.0;
        for (std::size_t i = 0; i < cu_.size(); ++i) cp_[i] = (std::norm(cu_[i]) - 2.0 * mu) * cu_[i];
        FourierField p = pt_.from_physical(cp_.data());
        for (auto& c : p.coeffs) c *= cplx(0.0, amp);
        return p;
    }

    FourierField dnls(const FourierField& w, double amp)
    {
        pt_.to_physical(w, cu_.data());
        pt_.to_physical(derivative(w), cux_.data());
        double mu = 0.0;
        cplx nu = 0.0; // mean of w * d_x conj(w)
        if (eq_.options.renormalize) {
            mu = mass(w);
            for (std::size_t i = 0; i < w.size(); ++i)
                nu += cplx(0.0, -grid_.xi(i)[0]) * std::norm(w[i]);
        }
        const cplx half_i(0.0, 0.5);
        for (std::size_t i = 0; i < cu_.size(); ++i) {
            const cplx a = cu_[i];
            const double r = std::norm(a);
            const cplx cubic = a * a * std::conj(cux_[i]) - 2.0 * nu * a;
            const cplx quintic = (r * r - 6.0 * mu * r + 6.0 * mu * mu) * a;
            cp_[i] = -cubic + half_i * quintic;
        }
        FourierField p = pt_.from_physical(cp_.data());
        for (auto& c : p.coeffs) c *= amp;
        return p;
    }

    EquationSpec eq_;
    SpectralGrid grid_;
    PaddedTransform pt_;
    std::vector<double> ru_;
    std::vector<cplx> cu_, cux_, cp_;
};

// N(u) for physical samples, returned as physical samples.
inline std::vector<cplx> nonlinearity(const EquationSpec& eq, const SpectralGrid& g,
                                      const std::vector<cplx>& u)
{
    FourierField f;
    if (eq.real()) {
        std::vector<double> r(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[i].real();
        f = transform_forward(g, r);
    } else {
        f = transform_forward(g, u);
    }
    NonlinearEvaluator ev(eq, g);
    return transform_inverse(ev(f));
}

} // namespace dsmooth
