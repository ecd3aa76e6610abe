#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "dsmooth/multilinear.hpp"
#include "dsmooth/rough_data.hpp"

namespace dsmooth {

// First steps of the normal form reduction. The second-step exponent delta is
// not a field: it is always sigma.
struct InfrConfig {
    double N = 16.0;
    double sigma = 0.5;
    int J_max = 1;
    double s = 0.0, eps = 0.0;

    double delta() const { return sigma; }

    void validate() const
    {
        require(N > 1.0 && std::isfinite(N), "threshold N must exceed 1");
        require(sigma > 0.0 && sigma < 1.0, "sigma must lie in (0, 1)");
        require(J_max == 1 || J_max == 2, "J_max must be 1 or 2");
    }
};

// beta_j = ((k - 1)(j + 1) + 1)^k.
inline double beta_threshold(int j, int k)
{
    require(j >= 1, "step index must be at least 1");
    require(k >= 2, "nonlinearity order must be at least 2");
    return std::pow(double((k - 1) * (j + 1) + 1), k);
}

// Threshold for step J >= 2: beta_J max(|Phi_1|^{1-delta}, |Phi_prev|^{1-delta}).
inline double step_threshold(int J, int k, double delta, double phi_first, double phi_prev)
{
    require(J >= 2, "the generation threshold applies from the second step on");
    require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
    return beta_threshold(J, k) *
           std::max(std::pow(std::abs(phi_first), 1.0 - delta), std::pow(std::abs(phi_prev), 1.0 - delta));
}

// Near-resonant predicate of step J for a new phase against the first and
// previous generation phases.
inline bool step_near_resonant(const InfrConfig& cfg, int J, int k, double phi, double phi_first, double phi_prev)
{
    cfg.validate();
    require(J <= cfg.J_max, "step beyond J_max");
    if (J == 1) return std::abs(phi) <= cfg.N;
    return std::abs(phi) < step_threshold(J, k, cfg.delta(), phi_first, phi_prev);
}

// Kernel values of the first-step pieces at one tuple.
struct InfrKernels {
    cplx near = 0.0;     // m 1_{|Phi| <= N}
    cplx nonres = 0.0;   // m 1_{|Phi| > N}
    cplx boundary = 0.0; // m e^{it Phi} / (i Phi) 1_{|Phi| > N}
};

inline InfrKernels infr_kernels(const EquationSpec& eq, const FrequencyTuple& t, double N, double time = 0.0)
{
    const double phi = eq.phase_unchecked(t);
    const cplx m = eq.multiplier(t);
    InfrKernels k;
    if (std::abs(phi) <= N) {
        k.near = m;
    } else {
        k.nonres = m;
        k.boundary = m * std::polar(1.0, time * phi) / cplx(0.0, phi);
    }
    return k;
}

namespace detail {
inline std::vector<int> infr_signature(const EquationSpec& eq, int order, const std::vector<FourierField>& in)
{
    auto sig = eq.term(order > 0 ? order : eq.terms().front().order).signature;
    require(in.size() == sig.size(), "term expects " + std::to_string(sig.size()) + " inputs");
    require(!in.empty(), "need inputs");
    for (const auto& f : in) require(f.grid == in.front().grid, "inputs live on different lattices");
    require(in.front().grid.dim == eq.dim(), "lattice dimension does not match " + to_string(eq.name));
    return sig;
}
} // namespace detail

struct ResonantSplit {
    FourierField near;   // |Phi| <= N
    FourierField nonres; // |Phi| > N
};

// Splits one nonlinear term (the lowest unless `order` is given) at |Phi| = N.
inline ResonantSplit split_resonant(const EquationSpec& eq, const std::vector<FourierField>& in, double N,
                                    int order = 0)
{
    const auto sig = detail::infr_signature(eq, order, in);
    const SpectralGrid& g = in.front().grid;
    LatticeOperator near(g, sig, [&eq, N](const FrequencyTuple& t) { return infr_kernels(eq, t, N).near; });
    LatticeOperator far(g, sig, [&eq, N](const FrequencyTuple& t) { return infr_kernels(eq, t, N).nonres; });
    return {near.apply(in), far.apply(in)};
}

// Boundary term of the first integration by parts, evaluated at time t.
inline FourierField boundary_term(const EquationSpec& eq, const std::vector<FourierField>& in, double N,
                                  double t = 0.0, int order = 0)
{
    require(N > 1.0, "threshold N must exceed 1");
    const auto sig = detail::infr_signature(eq, order, in);
    LatticeOperator op(in.front().grid, sig,
                       [&eq, N, t](const FrequencyTuple& x) { return infr_kernels(eq, x, N, t).boundary; });
    return op.apply(in);
}

struct InfrScalingConfig {
    Lattice lattice{1, 512, 2048.0};
    int ensemble = 4;
    std::uint64_t seed = 0;
    double time = 0.0; // boundary term endpoint
    int order = 0;
    int workers = 1;
};

struct InfrScalingRow {
    double N = 0.0;
    double near_norm = 0.0;     // ensemble mean of ||N_1||_{H^{s+eps}}
    double boundary_norm = 0.0; // ensemble mean of ||N_0||_{H^{s+eps}}
};

struct InfrScalingResult {
    std::vector<InfrScalingRow> rows;
    LineFit near_fit, boundary_fit; // log norm against log N over the upper half of the N range
    bool degenerate = false;
};

// Both first-step pieces for every N at once: each tuple is binned by |Phi|
// against the sorted thresholds, then prefix sums give the near-resonant term
// and suffix sums the boundary term.
inline std::vector<std::pair<FourierField, FourierField>> infr_pieces(const EquationSpec& eq,
                                                                      const FourierField& u,
                                                                      const std::vector<double>& Ns,
                                                                      double time, int order)
{
    const SpectralGrid& g = u.grid;
    const auto sig = eq.term(order > 0 ? order : eq.terms().front().order).signature;
    const std::size_t nb = Ns.size() + 1; // bin b: Ns[b-1] < |Phi| <= Ns[b]
    std::vector<FourierField> near(nb, FourierField(g)), bnd(nb, FourierField(g));
    for_each_tuple(g, sig, [&](std::size_t o, const std::size_t* idx, const FrequencyTuple& t) {
        const cplx m = eq.multiplier(t);
        if (m == cplx(0.0)) return;
        cplx p = m;
        for (std::size_t j = 0; j < sig.size(); ++j) p *= sig[j] > 0 ? u[idx[j]] : std::conj(u[idx[j]]);
        const double phi = eq.phase_unchecked(t);
        const std::size_t b = std::size_t(std::lower_bound(Ns.begin(), Ns.end(), std::abs(phi)) - Ns.begin());
        near[b][o] += p;
        if (phi != 0.0) bnd[b][o] += p * std::polar(1.0, time * phi) / cplx(0.0, phi);
    });
    std::vector<std::pair<FourierField, FourierField>> out;
    FourierField acc(g);
    std::vector<FourierField> prefix;
    for (std::size_t b = 0; b + 1 < nb; ++b) {
        acc += near[b];
        prefix.push_back(acc);
    }
    FourierField tail(g);
    std::vector<FourierField> suffix(Ns.size(), FourierField(g));
    for (std::size_t b = nb; b-- > 1;) {
        tail += bnd[b];
        suffix[b - 1] = tail;
    }
    for (std::size_t i = 0; i < Ns.size(); ++i) out.emplace_back(prefix[i], suffix[i]);
    return out;
}

// Fitted N-exponents of ||N_1^{(1)}||_{H^{s+eps}} and ||N_0^{(2)}||_{H^{s+eps}}
// over an ensemble of sharp-H^s random lattice profiles.
inline InfrScalingResult verify_scalings(const EquationSpec& eq, double s, double eps, double sigma,
                                         std::vector<double> Ns, const InfrScalingConfig& cfg)
{
    InfrConfig ic;
    ic.sigma = sigma;
    ic.s = s;
    ic.eps = eps;
    ic.validate();
    require(Ns.size() >= 5, "need at least 5 thresholds");
    std::sort(Ns.begin(), Ns.end());
    for (double N : Ns) require(N > 1.0, "thresholds must exceed 1");
    require(std::adjacent_find(Ns.begin(), Ns.end()) == Ns.end(), "thresholds must be distinct");
    require(cfg.ensemble >= 1, "ensemble must hold at least one profile");
    cfg.lattice.validate();
    require(cfg.lattice.dim == eq.dim(), "lattice dimension does not match " + to_string(eq.name));

    const SpectralGrid g = cfg.lattice.grid();
    auto norms = parallel_map(std::size_t(cfg.ensemble), cfg.workers, [&](std::size_t e) {
        RoughDataSpec d;
        d.s = s;
        d.amplitude = 1.0;
        d.real = eq.real();
        d.seed = cfg.seed + e;
        const auto pieces = infr_pieces(eq, generate(d, g), Ns, cfg.time, cfg.order);
        std::vector<std::pair<double, double>> v;
        for (const auto& [n1, n0] : pieces) v.emplace_back(sobolev_norm(n1, s + eps), sobolev_norm(n0, s + eps));
        return v;
    });

    InfrScalingResult r;
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        InfrScalingRow row{Ns[i], 0.0, 0.0};
        for (const auto& v : norms) {
            row.near_norm += v[i].first / cfg.ensemble;
            row.boundary_norm += v[i].second / cfg.ensemble;
        }
        r.rows.push_back(row);
    }
    const double mid = 0.5 * (std::log(Ns.front()) + std::log(Ns.back()));
    std::vector<double> x, yn, yb;
    for (const auto& row : r.rows) {
        if (std::log(row.N) < mid - 1e-12) continue;
        if (row.near_norm <= 0.0 || row.boundary_norm <= 0.0) {
            r.degenerate = true;
            continue;
        }
        x.push_back(std::log(row.N));
        yn.push_back(std::log(row.near_norm));
        yb.push_back(std::log(row.boundary_norm));
    }
    if (x.size() < 2) {
        r.degenerate = true;
        return r;
    }
    r.near_fit = fit_line(x, yn);
    r.boundary_fit = fit_line(x, yb);
    return r;
}

} // namespace dsmooth
