#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "dsmooth/equation.hpp"
#include "dsmooth/field.hpp"
#include "dsmooth/norms.hpp"
#include "dsmooth/parallel.hpp"
#include "dsmooth/stats.hpp"

namespace dsmooth {

// Frequency lattice {j h : -m/2 <= j < m/2}^d with h = 2K/m. Fields on it are
// FourierFields over the box of length 2 pi / h with no dealias cut, so the
// lattice and the spectral grid share the same wavenumbers.
struct Lattice {
    int dim = 1;
    int m = 128;
    double K = 64.0;

    double h() const { return 2.0 * K / m; }
    SpectralGrid grid() const { return SpectralGrid::frequency_lattice(dim, 2.0 * pi / h(), m); }
    void validate() const
    {
        require(dim == 1 || dim == 2, "lattice dimension must be 1 or 2");
        require(m >= 4 && m % 2 == 0, "lattice size must be even and at least 4");
        require(K > 0.0 && std::isfinite(K), "lattice extent must be positive");
    }
};

using Kernel = std::function<cplx(const FrequencyTuple&)>;

// Odometer over all input index tuples of a signed k-fold convolution on g.
// fn(out, idx, tuple) is called for tuples whose output sum_j s_j xi_j lies
// on the grid, in one fixed order.
template <class Fn>
void for_each_tuple(const SpectralGrid& g, const std::vector<int>& sig, Fn&& fn)
{
    const std::size_t k = sig.size(), n = g.size();
    const int half = g.n / 2;
    std::vector<int> kx(n), ky(n);
    std::vector<Freq> xi(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto w = g.wavenumbers(i);
        kx[i] = w[0];
        ky[i] = w[1];
        xi[i] = g.xi(i);
    }
    std::vector<std::size_t> idx(k, 0);
    FrequencyTuple t;
    t.inputs.resize(k);
    for (;;) {
        int ox = 0, oy = 0;
        for (std::size_t j = 0; j < k; ++j) {
            ox += sig[j] * kx[idx[j]];
            oy += sig[j] * ky[idx[j]];
        }
        if (ox >= -half && ox < half && oy >= -half && oy < half) {
            const int ix = ox < 0 ? ox + g.n : ox;
            const int iy = oy < 0 ? oy + g.n : oy;
            const std::size_t o = g.dim == 1 ? std::size_t(ix) : std::size_t(ix) * std::size_t(g.n) + std::size_t(iy);
            for (std::size_t j = 0; j < k; ++j) t.inputs[j] = xi[idx[j]];
            t.xi = xi[o];
            fn(o, static_cast<const std::size_t*>(idx.data()), static_cast<const FrequencyTuple&>(t));
        }
        std::size_t j = k;
        while (j > 0 && ++idx[j - 1] == n) idx[--j] = 0;
        if (j == 0) break;
    }
}

// Signed convolution operator on a lattice:
//   T(f_1..f_k)(xi) = sum_{sum s_j xi_j = xi} K(Xi) prod f_j^{(s_j)}(xi_j),
// with f^{(-1)} = conj f and outputs off the lattice dropped. No measure
// factor is applied. Tuples are visited in one fixed order, so every result is
// reproducible bit for bit.
class LatticeOperator {
public:
    // Nonzero tuples are stored compactly when there are at most `store_limit`
    // of them; larger operators are re-evaluated on every pass.
    LatticeOperator(const SpectralGrid& g, std::vector<int> signature, Kernel kernel,
                    std::size_t store_limit = std::size_t(1) << 22)
        : grid_(g), sig_(std::move(signature)), kernel_(std::move(kernel))
    {
        require(!sig_.empty(), "operator needs at least one slot");
        for (int s : sig_) require(s == 1 || s == -1, "signature entries must be +1 or -1");
        require(g.size() <= std::numeric_limits<std::uint32_t>::max(), "lattice too large");
        const std::size_t k = sig_.size();
        bool fits = true;
        for_each_tuple(grid_, sig_, [&](std::size_t o, const std::size_t* idx, const FrequencyTuple& t) {
            if (!fits) return;
            const cplx w = kernel_(t);
            if (w == cplx(0.0)) return;
            if (weight_.size() == store_limit) {
                fits = false;
                return;
            }
            out_.push_back(std::uint32_t(o));
            for (std::size_t j = 0; j < k; ++j) in_.push_back(std::uint32_t(idx[j]));
            weight_.push_back(w);
        });
        stored_ = fits;
        if (!stored_) {
            out_ = {};
            in_ = {};
            weight_ = {};
        }
    }

    const SpectralGrid& grid() const { return grid_; }
    const std::vector<int>& signature() const { return sig_; }
    int order() const { return int(sig_.size()); }

    FourierField apply(const std::vector<FourierField>& in) const
    {
        check_inputs(in);
        FourierField out(grid_);
        visit([&](std::size_t o, const std::size_t* idx, cplx w) {
            cplx p = w;
            for (std::size_t j = 0; j < sig_.size(); ++j) p *= slot(in[j], j, idx[j]);
            out[o] += p;
        });
        return out;
    }

    // B(i) = sum over tuples with input `slot_j` at i of conj(g(xi)) K prod_{l != j} f_l^{(s_l)},
    // so <T(f), g> = sum_i B(i) f_j^{(s_j)}(i).
    std::vector<cplx> adjoint(int slot_j, const std::vector<FourierField>& in, const FourierField& g) const
    {
        check_inputs(in);
        require(g.grid == grid_, "dual field lives on another lattice");
        std::vector<cplx> b(grid_.size(), 0.0);
        const std::size_t sj = std::size_t(slot_j);
        visit([&](std::size_t o, const std::size_t* idx, cplx w) {
            cplx p = std::conj(g[o]) * w;
            for (std::size_t l = 0; l < sig_.size(); ++l)
                if (l != sj) p *= slot(in[l], l, idx[l]);
            b[idx[sj]] += p;
        });
        return b;
    }

    // sum over tuples landing on xi of |K|^2, per output point.
    std::vector<double> kernel_mass() const
    {
        std::vector<double> acc(grid_.size(), 0.0);
        visit([&](std::size_t o, const std::size_t*, cplx w) { acc[o] += std::norm(w); });
        return acc;
    }

private:
    SpectralGrid grid_;
    std::vector<int> sig_;
    Kernel kernel_;
    std::vector<std::uint32_t> out_, in_; // stored tuples: output index, k input indices
    std::vector<cplx> weight_;
    bool stored_ = false;

    void check_inputs(const std::vector<FourierField>& in) const
    {
        require(in.size() == sig_.size(), "operator expects " + std::to_string(sig_.size()) + " inputs");
        for (const auto& f : in) require(f.grid == grid_, "input lives on another lattice");
    }

    cplx slot(const FourierField& f, std::size_t j, std::size_t i) const
    {
        return sig_[j] > 0 ? f[i] : std::conj(f[i]);
    }

    // fn(out, idx, weight) over tuples with a nonzero kernel, always in odometer order.
    template <class Fn>
    void visit(Fn&& fn) const
    {
        if (stored_) {
            const std::size_t k = sig_.size();
            std::vector<std::size_t> idx(k);
            for (std::size_t e = 0; e < weight_.size(); ++e) {
                for (std::size_t j = 0; j < k; ++j) idx[j] = in_[e * k + j];
                fn(std::size_t(out_[e]), idx.data(), weight_[e]);
            }
            return;
        }
        for_each_tuple(grid_, sig_, [&](std::size_t o, const std::size_t* idx, const FrequencyTuple& t) {
            const cplx w = kernel_(t);
            if (w != cplx(0.0)) fn(o, idx, w);
        });
    }
};

enum class OperatorKind { t_sigma, t_alpha_m };

// Parameters of one operator-norm probe.
struct BoundProbe {
    enum class Multiplier { equation, unit, zero };

    EquationSpec eq;
    int order = 0; // nonlinearity degree; 0 means the lowest term of eq
    double s = 0.0, eps = 0.0, sigma = 0.5;
    double alpha = 0.0, M = 1.0;
    Lattice lattice;
    int trials = 4;
    int iterations = 40;
    std::uint64_t seed = 0;
    Multiplier multiplier = Multiplier::equation;
    bool exclude_resonant = false; // drop tuples with Phi = 0
    double lambda = 0.0;           // KdV window exponent; 0 means 2/(1-s)^+

    // Hooks for surrogate kernels: a replacement phase and/or signature.
    std::function<double(const FrequencyTuple&)> phase_override;
    std::vector<int> signature_override;

    int effective_order() const
    {
        if (!signature_override.empty()) return int(signature_override.size());
        return order > 0 ? order : eq.terms().front().order;
    }
    std::vector<int> signature() const
    {
        return signature_override.empty() ? eq.term(effective_order()).signature : signature_override;
    }

    void validate() const
    {
        lattice.validate();
        require(lattice.dim == eq.dim(), "lattice dimension does not match " + to_string(eq.name));
        require(sigma >= 0.0 && sigma < 1.0, "sigma must lie in [0, 1)");
        require(M > 0.0, "M must be positive");
        require(trials >= 1 && iterations >= 1, "need at least one trial and one iteration");
        signature();
    }

    // Norm estimation additionally needs a lattice of desk scale but not a toy one.
    void validate_for_estimation() const
    {
        validate();
        require(lattice.m >= 32, "norm estimates need m_f >= 32");
    }

    double phase(const FrequencyTuple& t) const { return phase_override ? phase_override(t) : eq.phase_unchecked(t); }

    cplx multiplier_value(const FrequencyTuple& t) const
    {
        switch (multiplier) {
        case Multiplier::unit: return 1.0;
        case Multiplier::zero: return 0.0;
        case Multiplier::equation: break;
        }
        return eq.multiplier(t);
    }

    bool resonant(double phi) const { return std::abs(phi) < 1e-9; }

    // Unweighted kernel of the requested operator.
    Kernel kernel(OperatorKind kind) const
    {
        BoundProbe p = *this;
        return [p, kind](const FrequencyTuple& t) -> cplx {
            const cplx mult = p.multiplier_value(t);
            if (mult == cplx(0.0)) return 0.0;
            const double phi = p.phase(t);
            if (p.exclude_resonant && p.resonant(phi)) return 0.0;
            if (kind == OperatorKind::t_sigma) return mult * std::pow(bracket(phi), -p.sigma);
            return std::abs(phi - p.alpha) < p.M ? mult : cplx(0.0);
        };
    }

    double kdv_lambda() const
    {
        if (lambda > 0.0) return lambda;
        double cap = kdv_lambda_cap(s);
        return std::isinf(cap) ? 0.0 : cap;
    }
    bool adapted_inputs() const { return eq.name == EquationName::kdv && kdv_lambda() > 1.0; }
};

inline LatticeOperator make_operator(const BoundProbe& probe, OperatorKind kind)
{
    probe.validate();
    return LatticeOperator(probe.lattice.grid(), probe.signature(), probe.kernel(kind));
}

// T_sigma: kernel m(Xi) / <Phi(Xi)>^sigma.
inline FourierField apply_T_sigma(const BoundProbe& probe, const std::vector<FourierField>& inputs)
{
    return make_operator(probe, OperatorKind::t_sigma).apply(inputs);
}

// T^{alpha,M}: kernel m(Xi) 1_{|Phi(Xi) - alpha| < M}.
inline FourierField apply_T_alpha_M(const BoundProbe& probe, const std::vector<FourierField>& inputs)
{
    return make_operator(probe, OperatorKind::t_alpha_m).apply(inputs);
}

struct NormEstimate {
    double lower = 0.0; // best probe ratio found
    double upper = 0.0; // sup_xi (sum |W|^2 h^{d(k-1)})^{1/2}
};

// Operator norm of T_sigma : H^s x .. x H^s -> H^{s+eps}, or of
// T^{alpha,M} : H^s x .. x H^s -> H^s, with the continuum normalization
// (Riemann measure h^d per lattice point, h^{d(k-1)} on the constraint set).
// In the unit-ball variables a_j = h^{d/2} <xi>^s f_j the operator becomes a
// plain multilinear map with kernel
//   W = h^{d(k-1)/2} <xi>^{s+eps} K(Xi) prod <xi_j>^{-s}.
// The lower bound is alternating maximization over the slots (each update is
// the exact maximizer given the other slots), restarted `trials` times. The
// upper functional is the Cauchy-Schwarz bound over each output fibre.
inline NormEstimate estimate_norm(const BoundProbe& probe, OperatorKind kind)
{
    probe.validate_for_estimation();
    const SpectralGrid g = probe.lattice.grid();
    const auto sig = probe.signature();
    const int k = int(sig.size());
    const double h = probe.lattice.h();
    const double measure = std::pow(h, 0.5 * g.dim * (k - 1));
    const double out_exp = kind == OperatorKind::t_sigma ? probe.s + probe.eps : probe.s;
    const Kernel raw = probe.kernel(kind);
    const double s = probe.s;
    Kernel weighted = [&, raw](const FrequencyTuple& t) -> cplx {
        cplx w = raw(t);
        if (w == cplx(0.0)) return w;
        double f = measure * std::pow(bracket(t.xi), out_exp);
        for (const auto& x : t.inputs) f *= std::pow(bracket(x), -s);
        return f * w;
    };
    LatticeOperator op(g, sig, weighted);

    NormEstimate est;
    for (double v : op.kernel_mass()) est.upper = std::max(est.upper, v);
    est.upper = std::sqrt(est.upper);
    if (est.upper == 0.0) return est;

    auto l2 = [](const std::vector<cplx>& v) {
        double a = 0.0;
        for (const auto& z : v) a += std::norm(z);
        return std::sqrt(a);
    };
    // ratio H^s / adapted for the KdV window norm; adapted >= Sobolev, so this
    // only lowers the reported bound
    auto input_ratio = [&](const FourierField& a) {
        if (!probe.adapted_inputs()) return 1.0;
        FourierField f(g);
        for (std::size_t i = 0; i < g.size(); ++i) f[i] = a[i] / (std::sqrt(std::pow(h, g.dim)) * std::pow(bracket(g.xi(i)), s));
        double so = sobolev_norm(f, s);
        return so / adapted_norm(f, s, probe.kdv_lambda());
    };

    for (int trial = 0; trial < probe.trials; ++trial) {
        std::mt19937_64 eng(probe.seed * 1000003ull + std::uint64_t(trial));
        std::normal_distribution<double> nd;
        std::vector<FourierField> a(std::size_t(k), FourierField{g});
        for (auto& f : a) {
            for (auto& c : f.coeffs) c = cplx(nd(eng), nd(eng));
            f *= 1.0 / l2(f.coeffs);
        }
        double value = 0.0;
        FourierField b = op.apply(a);
        for (int it = 0; it < probe.iterations; ++it) {
            const double nb = l2(b.coeffs);
            if (nb == 0.0) break;
            b *= 1.0 / nb;
            for (int j = 0; j < k; ++j) {
                auto B = op.adjoint(j, a, b);
                const double nB = l2(B);
                if (nB == 0.0) continue;
                for (std::size_t i = 0; i < B.size(); ++i)
                    a[std::size_t(j)][i] = (sig[std::size_t(j)] > 0 ? std::conj(B[i]) : B[i]) / nB;
            }
            b = op.apply(a);
            const double next = l2(b.coeffs);
            const bool settled = next <= value * (1.0 + 1e-7);
            value = std::max(value, next);
            if (settled) break;
        }
        double ratio = 1.0;
        for (const auto& f : a) ratio *= input_ratio(f);
        est.lower = std::max(est.lower, value * ratio);
    }
    return est;
}

struct ScalingRow {
    double alpha, M;
    NormEstimate norm;
};

struct ScalingResult {
    std::vector<ScalingRow> m_rows;     // alpha = 0, M swept
    std::vector<ScalingRow> alpha_rows; // M fixed, alpha swept
    LineFit beta_fit;                   // log lower vs log <M>
    LineFit gamma_fit;                  // log lower vs log <alpha>
    bool degenerate = false;
};

namespace detail {
inline LineFit fit_rows(const std::vector<ScalingRow>& rows, bool in_m, bool& degenerate)
{
    std::vector<double> x, y;
    for (const auto& r : rows) {
        if (r.norm.lower <= 0.0) continue;
        x.push_back(std::log(bracket(in_m ? r.M : r.alpha)));
        y.push_back(std::log(r.norm.lower));
    }
    if (x.size() < 2) {
        degenerate = true;
        return {};
    }
    if (x.size() < rows.size() || x.size() < 5) degenerate = true;
    return fit_line(x, y);
}
} // namespace detail

// Fitted exponents of the T^{alpha,M} norm: beta-hat in <M> at alpha = tmpl.alpha
// and gamma-hat in <alpha> at M = tmpl.M.
inline ScalingResult sweep_M_scaling(const BoundProbe& tmpl, const std::vector<double>& Ms,
                                     const std::vector<double>& alphas, int workers = 1)
{
    require(Ms.size() >= 5 && alphas.size() >= 5, "need at least 5 values per swept parameter");
    std::vector<BoundProbe> probes;
    for (double M : Ms) {
        BoundProbe p = tmpl;
        p.M = M;
        probes.push_back(p);
    }
    for (double a : alphas) {
        BoundProbe p = tmpl;
        p.alpha = a;
        probes.push_back(p);
    }
    for (const auto& p : probes) p.validate_for_estimation();
    auto norms = parallel_map(probes.size(), workers,
                              [&](std::size_t i) { return estimate_norm(probes[i], OperatorKind::t_alpha_m); });
    ScalingResult r;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        ScalingRow row{probes[i].alpha, probes[i].M, norms[i]};
        (i < Ms.size() ? r.m_rows : r.alpha_rows).push_back(row);
    }
    r.beta_fit = detail::fit_rows(r.m_rows, true, r.degenerate);
    r.gamma_fit = detail::fit_rows(r.alpha_rows, false, r.degenerate);
    return r;
}

struct SigmaCell {
    double s, eps, sigma;
    NormEstimate coarse, fine;
    double growth = 0.0; // fine.lower / coarse.lower
};

struct FeasibilityCell {
    double s, eps;
    bool bounded = false;
    double best_sigma = std::numeric_limits<double>::quiet_NaN();
    double best_growth = std::numeric_limits<double>::infinity();
};

struct FeasibilityTable {
    std::vector<SigmaCell> probes;
    std::vector<FeasibilityCell> cells;
    double growth_threshold = 1.3;
};

// For each (s, eps, sigma) estimate the T_sigma norm on the template lattice and
// on the lattice with twice the points at the same spacing (twice the extent).
// A cell is bounded when the norm grows by less than the threshold for some sigma.
inline FeasibilityTable sweep_sigma_bound(const BoundProbe& tmpl, const std::vector<double>& s_grid,
                                          const std::vector<double>& eps_grid, const std::vector<double>& sigma_grid,
                                          int workers = 1, double growth_threshold = 1.3)
{
    require(!s_grid.empty() && !eps_grid.empty() && !sigma_grid.empty(), "sweep grids must be non-empty");
    std::vector<BoundProbe> probes;
    for (double s : s_grid) {
        require(tmpl.eq.s_admissible(s), "s=" + std::to_string(s) + " is outside the range of " + to_string(tmpl.eq.name));
        for (double e : eps_grid)
            for (double sg : sigma_grid)
                for (int refine = 0; refine < 2; ++refine) {
                    BoundProbe p = tmpl;
                    p.s = s;
                    p.eps = e;
                    p.sigma = sg;
                    if (refine) {
                        p.lattice.m *= 2;
                        p.lattice.K *= 2.0;
                    }
                    p.validate_for_estimation();
                    probes.push_back(p);
                }
    }
    auto norms = parallel_map(probes.size(), workers,
                              [&](std::size_t i) { return estimate_norm(probes[i], OperatorKind::t_sigma); });
    FeasibilityTable tab;
    tab.growth_threshold = growth_threshold;
    for (std::size_t i = 0; i < probes.size(); i += 2) {
        SigmaCell c{probes[i].s, probes[i].eps, probes[i].sigma, norms[i], norms[i + 1], 0.0};
        c.growth = c.coarse.lower > 0.0 ? c.fine.lower / c.coarse.lower : (c.fine.lower > 0.0 ? INFINITY : 1.0);
        tab.probes.push_back(c);
    }
    for (double s : s_grid)
        for (double e : eps_grid) {
            FeasibilityCell cell{s, e};
            for (const auto& c : tab.probes)
                if (c.s == s && c.eps == e && c.growth < cell.best_growth) {
                    cell.best_growth = c.growth;
                    cell.best_sigma = c.sigma;
                }
            cell.bounded = cell.best_growth < growth_threshold;
            tab.cells.push_back(cell);
        }
    return tab;
}

} // namespace dsmooth
