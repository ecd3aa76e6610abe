#pragma once

#include <cmath>
#include <vector>

#include "dsmooth/equation.hpp"
#include "dsmooth/field.hpp"
#include "dsmooth/nonlinearity.hpp"

namespace dsmooth {

struct StepperConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    double cfl_guard = 1.5; // largest tolerated per-step growth of the profile L2 norm
    int samples = 16;       // trajectory snapshots besides t = 0

    void validate() const
    {
        require(dt > 0.0 && std::isfinite(dt), "dt must be positive");
        require(t_end > 0.0 && std::isfinite(t_end), "t_end must be positive");
        require(cfl_guard > 1.0, "cfl_guard must exceed 1");
        require(samples >= 1, "need at least one trajectory sample");
    }

    // dt is rounded so that an integer number of steps lands on t_end.
    int steps() const { return std::max(1, int(std::lround(t_end / dt))); }
    double effective_dt() const { return t_end / steps(); }
};

// Profile v = e^{itL} u-hat at time t.
struct ProfileState {
    FourierField profile;
    double time = 0.0;
};

struct Trajectory {
    EquationSpec equation;
    StepperConfig config;
    double dt = 0.0;
    int steps = 0;
    std::vector<ProfileState> samples;

    const ProfileState& at(double t) const
    {
        for (const auto& s : samples)
            if (std::abs(s.time - t) <= 1e-12 * std::max(1.0, std::abs(t))) return s;
        throw ValidationError("time " + std::to_string(t) + " is not a trajectory sample");
    }
    const ProfileState& initial() const { return samples.front(); }
    const ProfileState& final() const { return samples.back(); }
};

// Linear group e^{-itL(xi)}, a unimodular diagonal multiplier.
inline FourierField apply_group(const FourierField& f, double t, const EquationSpec& eq)
{
    require(f.grid.dim == eq.dim(), "grid dimension does not match " + to_string(eq.name));
    FourierField out = f;
    if (t == 0.0) return out;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i] != cplx(0.0)) out[i] = std::polar(1.0, -t * eq.dispersion(f.grid.xi(i))) * f[i];
    return out;
}

// Integrating-factor RK4 on the profile equation
//   dv/dt = e^{itL} F[N(F^{-1}(e^{-itL} v))].
// The stage phases e^{-i t_n L} are recomputed from scratch every step, and the
// half/full step factors are fixed tables.
inline Trajectory evolve(const FourierField& u0, const EquationSpec& eq, const StepperConfig& cfg)
{
    cfg.validate();
    const SpectralGrid& g = u0.grid;
    require(g.dim == eq.dim(), "grid dimension does not match " + to_string(eq.name));
    require(!eq.real() || u0.real_symmetric, "real equations need real_symmetric initial data");

    Trajectory traj;
    traj.equation = eq;
    traj.config = cfg;
    traj.steps = cfg.steps();
    traj.dt = cfg.effective_dt();
    const double dt = traj.dt;
    const int nsteps = traj.steps;

    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.retained(i) || u0[i] != cplx(0.0)) active.push_back(i);
    const std::size_t na = active.size();

    std::vector<double> symbol(na);
    std::vector<cplx> half(na), full(na);
    for (std::size_t a = 0; a < na; ++a) {
        symbol[a] = eq.dispersion(g.xi(active[a]));
        half[a] = std::polar(1.0, -0.5 * dt * symbol[a]);
        full[a] = std::polar(1.0, -dt * symbol[a]);
    }

    const int nsamp = std::min(cfg.samples, nsteps);
    std::vector<int> sample_steps;
    for (int s = 0; s <= nsamp; ++s) sample_steps.push_back(int(std::lround(double(s) * nsteps / nsamp)));

    FourierField v = u0;
    traj.samples.push_back({v, 0.0});

    NonlinearEvaluator nonlin(eq, g);
    FourierField u(g, eq.real());
    std::vector<cplx> e0(na), eh(na), e1(na);
    std::vector<cplx> k1(na), k2(na), k3(na), k4(na), base(na), stage(na);

    auto rhs = [&](const std::vector<cplx>& w, const std::vector<cplx>& e, std::vector<cplx>& k) {
        for (std::size_t a = 0; a < na; ++a) u[active[a]] = e[a] * w[a];
        FourierField nl = nonlin(u);
        for (std::size_t a = 0; a < na; ++a) k[a] = std::conj(e[a]) * nl[active[a]];
    };
    auto norm2 = [&](const std::vector<cplx>& w) {
        double s = 0.0;
        for (const auto& c : w) s += std::norm(c);
        return s;
    };

    for (std::size_t a = 0; a < na; ++a) base[a] = v[active[a]];
    double mass = norm2(base);
    std::size_t next_sample = 1;
    for (int n = 0; n < nsteps; ++n) {
        const double t = n * dt;
        for (std::size_t a = 0; a < na; ++a) {
            e0[a] = std::polar(1.0, -t * symbol[a]);
            eh[a] = e0[a] * half[a];
            e1[a] = e0[a] * full[a];
        }
        rhs(base, e0, k1);
        for (std::size_t a = 0; a < na; ++a) stage[a] = base[a] + 0.5 * dt * k1[a];
        rhs(stage, eh, k2);
        for (std::size_t a = 0; a < na; ++a) stage[a] = base[a] + 0.5 * dt * k2[a];
        rhs(stage, eh, k3);
        for (std::size_t a = 0; a < na; ++a) stage[a] = base[a] + dt * k3[a];
        rhs(stage, e1, k4);
        for (std::size_t a = 0; a < na; ++a)
            base[a] += dt / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);

        const double m = norm2(base);
        const double tn = (n + 1) * dt;
        if (!std::isfinite(m)) throw IntegrationError("non-finite profile", tn);
        if (mass > 0.0 && m > cfg.cfl_guard * cfg.cfl_guard * mass) throw IntegrationError("norm growth guard tripped", tn);
        mass = m;

        if (next_sample < sample_steps.size() && n + 1 == sample_steps[next_sample]) {
            for (std::size_t a = 0; a < na; ++a) v[active[a]] = base[a];
            traj.samples.push_back({v, tn});
            ++next_sample;
        }
    }
    return traj;
}

// Duhamel term w(t) = u(t) - G(t)u0, i.e. e^{-itL}(v(t) - v(0)).
inline FourierField duhamel_term(const Trajectory& traj, double t)
{
    const auto& s = traj.at(t);
    FourierField diff = s.profile - traj.initial().profile;
    return apply_group(diff, s.time, traj.equation);
}

// Solution u(t) = G(t) v(t).
inline FourierField solution(const Trajectory& traj, double t)
{
    const auto& s = traj.at(t);
    return apply_group(s.profile, s.time, traj.equation);
}

} // namespace dsmooth
