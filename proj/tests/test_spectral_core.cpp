#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <thread>

#include "dsmooth/norms.hpp"
#include "dsmooth/product.hpp"
#include "dsmooth/serialize.hpp"
#include "oracles.hpp"

using namespace dsmooth;

TEST(Grid, LatticeAndCutoff)
{
    SpectralGrid g(1, 2 * pi, 16);
    EXPECT_DOUBLE_EQ(g.dxi(), 1.0);
    EXPECT_EQ(g.wavenumber(8), -8);
    EXPECT_EQ(g.wavenumber(7), 7);
    EXPECT_NEAR(g.xi_cut(), 16.0 / 3.0, 1e-12);
    EXPECT_TRUE(g.retained(5));
    EXPECT_FALSE(g.retained(6));
    EXPECT_THROW(SpectralGrid(1, 1.0, 12), ValidationError);
    EXPECT_THROW(SpectralGrid(3, 1.0, 16), ValidationError);
    EXPECT_THROW(SpectralGrid(1, -1.0, 16), ValidationError);
    EXPECT_THROW(SpectralGrid(1, 1.0, 16, 0.0), ValidationError);
}

TEST(Transform, ConstantMapsToUnitZeroMode)
{
    SpectralGrid g(1, 10.0, 32);
    auto f = transform_forward(g, std::vector<double>(32, 1.0));
    EXPECT_NEAR(std::abs(f[0] - 1.0), 0.0, 1e-15);
    for (std::size_t i = 1; i < f.size(); ++i) EXPECT_NEAR(std::abs(f[i]), 0.0, 1e-15);
}

TEST(Transform, CosineSplitsIntoHalves)
{
    SpectralGrid g(1, 2 * pi, 32);
    std::vector<double> v(32);
    for (int j = 0; j < 32; ++j) v[std::size_t(j)] = std::cos(3.0 * g.x(j));
    auto f = transform_forward(g, v);
    EXPECT_NEAR(std::abs(f[3] - 0.5), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(f[std::size_t(g.index_of(-3))] - 0.5), 0.0, 1e-14);
}

TEST(Transform, MatchesNaiveDft1D2D)
{
    std::mt19937_64 eng(3);
    std::normal_distribution<double> nd;
    for (int dim : {1, 2}) {
        SpectralGrid g(dim, 7.0, dim == 1 ? 64 : 16);
        std::vector<cplx> v(g.size());
        for (auto& x : v) x = cplx(nd(eng), dim == 1 ? 0.0 : nd(eng));
        auto f = transform_forward(g, v);
        auto ref = oracle::naive_dft(g, v);
        for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(std::abs(f[i] - ref[i]), 0.0, 1e-10);
    }
}

TEST(Transform, RoundTrip)
{
    std::mt19937_64 eng(5);
    std::normal_distribution<double> nd;
    for (int n : {8, 64, 1024}) {
        for (int dim : {1, 2}) {
            if (dim == 2 && n > 64) continue;
            SpectralGrid g(dim, 3.0, n);
            std::vector<cplx> v(g.size());
            for (auto& x : v) x = cplx(nd(eng), nd(eng));
            auto back = transform_inverse(transform_forward(g, v));
            for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(std::abs(back[i] - v[i]), 0.0, 1e-12);
        }
    }
}

TEST(Transform, RealDataIsHermitian)
{
    std::mt19937_64 eng(8);
    std::normal_distribution<double> nd;
    SpectralGrid g(2, 5.0, 32);
    std::vector<double> v(g.size());
    for (auto& x : v) x = nd(eng);
    auto f = transform_forward(g, v);
    EXPECT_TRUE(f.real_symmetric);
    EXPECT_LT(hermitian_defect(f), 1e-12);
}

TEST(Transform, SizeMismatchThrows)
{
    SpectralGrid g(1, 1.0, 16);
    EXPECT_THROW(transform_forward(g, std::vector<double>(15)), ValidationError);
}

TEST(Norms, SobolevHandValues)
{
    SpectralGrid g(1, 2 * pi, 16);
    FourierField z(g);
    EXPECT_EQ(sobolev_norm(z, 1.3), 0.0);
    FourierField f(g);
    f[3] = 0.7;
    EXPECT_NEAR(sobolev_norm(f, 1.0), 0.7 * std::sqrt(10.0), 1e-14);
}

TEST(Norms, SobolevMatchesDirectSum)
{
    SpectralGrid g(2, 9.0, 32);
    auto f = oracle::random_field(g, 11);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto xi = g.xi(i);
        acc += std::pow(1.0 + xi[0] * xi[0] + xi[1] * xi[1], 0.7) * std::norm(f[i]);
    }
    double ref = std::sqrt(acc * g.dxi() * g.dxi());
    EXPECT_NEAR(sobolev_norm(f, 0.7), ref, 1e-12 * ref);
}

TEST(Norms, SobolevMonotoneInS)
{
    SpectralGrid g(1, 50.0, 256);
    auto f = oracle::random_field(g, 2);
    double prev = 0.0;
    for (double s = -1.0; s <= 2.0; s += 0.25) {
        double v = sobolev_norm(f, s);
        EXPECT_GE(v, prev);
        prev = v;
    }
}

TEST(Norms, ParsevalWithBoxConstant)
{
    // sum |c|^2 dxi^d = (2 pi / L^2)^d int |f|^2 for unit-amplitude coefficients
    for (int dim : {1, 2}) {
        SpectralGrid g(dim, 13.0, dim == 1 ? 256 : 32);
        auto f = oracle::random_field(g, 4);
        double phys = physical_l2_norm(g, transform_inverse(f));
        double factor = std::pow(2 * pi / (g.box_length * g.box_length), 0.5 * dim);
        EXPECT_NEAR(sobolev_norm(f, 0.0), factor * phys, 1e-10 * phys);
    }
}

TEST(Norms, WeightedNorm)
{
    SpectralGrid g(1, 128.0, 4096);
    std::vector<double> centered(g.size()), shifted(g.size());
    for (int j = 0; j < g.n; ++j) {
        double x = centered_x(g, j);
        centered[std::size_t(j)] = std::exp(-x * x / (2 * 0.3 * 0.3));
        shifted[std::size_t(j)] = std::exp(-(x - 10) * (x - 10) / (2 * 0.3 * 0.3));
    }
    double l2 = physical_l2_norm(g, centered);
    EXPECT_NEAR(weighted_norm(g, centered, 0.0), l2, 1e-14 * l2);
    double ratio = weighted_norm(g, centered, 0.5) / l2;
    EXPECT_GE(ratio, 1.0);
    EXPECT_LE(ratio, 1.05);
    // quadrature oracle: <x>^r at distance 10
    double r = 0.8;
    double moved = weighted_norm(g, shifted, r) / physical_l2_norm(g, shifted);
    EXPECT_NEAR(moved / std::pow(bracket(10.0), r), 1.0, 0.05);
}

TEST(Norms, LambdaWindow)
{
    SpectralGrid g(1, 2000.0, 4096);
    FourierField f(g);
    for (std::size_t i = 0; i < f.size(); ++i)
        if (g.abs_xi(i) < 1.0) f[i] = 0.0;
        else if (g.retained(i)) f[i] = 1.0;
    EXPECT_EQ(lambda_window_norm(f, 2.0), 0.0);

    FourierField flat(g);
    for (std::size_t i = 0; i < f.size(); ++i)
        if (g.abs_xi(i) < 1.0) flat[i] = 0.4;
    EXPECT_NEAR(lambda_window_norm(flat, 2.0), 0.4 * std::sqrt(2.0), 2e-3);

    auto r = oracle::random_field(g, 9);
    double acc = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (g.abs_xi(i) < 1.0) acc += std::pow(std::abs(r[i]), 4.0);
    double ref = std::pow(acc * g.dxi(), 0.25);
    EXPECT_NEAR(lambda_window_norm(r, 4.0), ref, 1e-12 * ref);
    EXPECT_THROW(lambda_window_norm(r, 1.0), ValidationError);
}

TEST(Norms, KdvExponentBookkeeping)
{
    auto e = kdv_exponents(0.5, 0.2, 0.75, 4.0);
    EXPECT_TRUE(e.identity_ok);
    EXPECT_TRUE(std::isinf(e.rho));
    EXPECT_TRUE(e.valid());
    auto bad = kdv_exponents(0.5, 0.2, 0.75, 8.0);
    EXPECT_FALSE(bad.lambda_ok);
    auto finite = kdv_exponents(0.5, 0.1, 0.6, 3.0);
    EXPECT_NEAR(1.0 / finite.rho + 1.0 / 3.0, 0.4, 1e-12);
    EXPECT_TRUE(finite.identity_ok);
    // rho (2 sigma - 1 - eps) = 15 * 0.1 > 1
    EXPECT_TRUE(finite.rho_ok);
    EXPECT_FALSE(kdv_exponents(0.5, 0.1, 0.8, 3.0).identity_ok);
}

namespace {
FourierField mode(const SpectralGrid& g, int k, cplx a = 1.0)
{
    FourierField f(g);
    f[std::size_t(g.index_of(k))] = a;
    return f;
}
} // namespace

TEST(Product, ModeArithmetic)
{
    SpectralGrid g(1, 2 * pi, 32);
    auto e1 = mode(g, 1);
    auto p = dealiased_product({e1, e1, e1}, {1, 1, 1});
    EXPECT_NEAR(std::abs(p[3] - 1.0), 0.0, 1e-14);
    auto q = dealiased_product({e1, e1, e1}, {1, -1, 1});
    EXPECT_NEAR(std::abs(q[1] - 1.0), 0.0, 1e-14);
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (i != 1) { EXPECT_NEAR(std::abs(q[i]), 0.0, 1e-14); }
    }
}

TEST(Product, MatchesDirectConvolution)
{
    SpectralGrid g(1, 2 * pi, 64);
    std::vector<FourierField> in = {oracle::random_field(g, 1), oracle::random_field(g, 2),
                                    oracle::random_field(g, 3)};
    for (auto sig : {std::vector<int>{1, -1, 1}, std::vector<int>{1, 1, 1}}) {
        auto p = dealiased_product(in, sig);
        auto ref = oracle::direct_convolution(in, sig);
        EXPECT_LT(oracle::max_diff(p, ref), 1e-10);
    }
}

TEST(Product, QuinticMatchesDirectConvolution)
{
    SpectralGrid g(1, 2 * pi, 16, 1.0);
    // full band inputs without the Nyquist mode
    std::vector<FourierField> in;
    for (unsigned s = 0; s < 5; ++s) {
        auto f = oracle::random_field(g, 20 + s);
        f[8] = 0.0;
        in.push_back(f);
    }
    std::vector<int> sig{1, -1, 1, -1, 1};
    auto p = dealiased_product(in, sig);
    auto ref = oracle::direct_convolution(in, sig);
    EXPECT_LT(oracle::max_diff(p, ref), 1e-10);
}

TEST(Product, MultilinearAndConjugateSlots)
{
    SpectralGrid g(1, 3.0, 64);
    auto a = oracle::random_field(g, 1), b = oracle::random_field(g, 2), c = oracle::random_field(g, 3);
    const cplx z(0.3, -1.2);
    FourierField bz = b;
    for (auto& x : bz.coeffs) x *= z;
    auto base = dealiased_product({a, b, c}, {1, -1, 1});
    auto scaled = dealiased_product({a, bz, c}, {1, -1, 1});
    for (std::size_t i = 0; i < base.size(); ++i)
        EXPECT_NEAR(std::abs(scaled[i] - std::conj(z) * base[i]), 0.0, 1e-12);
    auto plus = dealiased_product({a + c, b, c}, {1, -1, 1});
    auto sum = base + dealiased_product({c, b, c}, {1, -1, 1});
    EXPECT_LT(oracle::max_diff(plus, sum), 1e-12);
}

TEST(Product, OutputMaskedAndRealPreserved)
{
    SpectralGrid g(2, 4.0, 32);
    auto a = oracle::random_field(g, 5, true);
    auto p = dealiased_product({a, a, a}, {1, 1, 1});
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!g.retained(i)) { EXPECT_EQ(p[i], cplx(0.0)); }
    }
    EXPECT_TRUE(p.real_symmetric);
    EXPECT_LT(hermitian_defect(p), 1e-12);
}

TEST(Product, GridMismatchThrows)
{
    SpectralGrid g(1, 1.0, 16), h(1, 2.0, 16);
    EXPECT_THROW(dealiased_product({FourierField(g), FourierField(h)}, {1, 1}), ValidationError);
    EXPECT_THROW(dealiased_product({FourierField(g)}, {1, 1}), ValidationError);
}

TEST(PaddedTransform, RealPathMatchesComplexPath)
{
    SpectralGrid g(2, 6.0, 32);
    auto a = oracle::random_field(g, 31, true);
    PaddedTransform pt(g, 2);
    std::vector<double> r(pt.physical_size());
    std::vector<cplx> c(pt.physical_size());
    pt.to_physical(a, r.data());
    pt.to_physical(a, c.data());
    for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(r[i], c[i].real(), 1e-12);
    auto back_r = pt.from_physical(r.data());
    auto back_c = pt.from_physical(c.data());
    EXPECT_LT(oracle::max_diff(back_r, back_c), 1e-13);
    EXPECT_LT(oracle::max_diff(back_r, a), 1e-13);
}

TEST(Transform, ConcurrentUseIsDeterministic)
{
    SpectralGrid g(1, 5.0, 512);
    auto f = oracle::random_field(g, 77);
    auto ref = dealiased_product({f, f, f}, {1, -1, 1});
    std::vector<FourierField> outs(6);
    std::vector<std::thread> pool;
    for (int t = 0; t < 6; ++t)
        pool.emplace_back([&, t] { outs[std::size_t(t)] = dealiased_product({f, f, f}, {1, -1, 1}); });
    for (auto& th : pool) th.join();
    for (const auto& o : outs) EXPECT_EQ(o.coeffs, ref.coeffs);
}

TEST(Serialize, CsvAndBinaryRoundTrip)
{
    for (int dim : {1, 2}) {
        SpectralGrid g(dim, 12.5, 16);
        auto f = oracle::random_field(g, 3);
        std::stringstream csv, bin;
        write_field_csv(csv, f, json{{"config_hash", "abc"}});
        json meta;
        auto back = read_field_csv(csv, &meta);
        EXPECT_EQ(meta.at("config_hash"), "abc");
        EXPECT_EQ(meta.at("grid").at("n"), 16);
        EXPECT_EQ(back.grid, g);
        EXPECT_EQ(back.coeffs, f.coeffs);
        write_field_binary(bin, f);
        auto back2 = read_field_binary(bin);
        EXPECT_EQ(back2.coeffs, f.coeffs);
    }
}
