#include "doctest.h"

#include <cmath>
#include <random>

#include "bergman/errors.hpp"
#include "bergman/operators.hpp"
#include "bergman/weights.hpp"

using namespace bergman;

namespace {

std::vector<double> random_sparse(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> f(n, 0.0);
    const int kind = static_cast<int>(rng() % 3);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = U(rng);
        if (kind == 0) f[i] = u;
        else if (kind == 1) f[i] = U(rng) < 0.05 ? u : 0.0;
        else f[i] = std::pow(u, 8.0);
    }
    f[rng() % n] += 1.0;
    return f;
}

double l2(std::span<const double> f, std::span<const double> nu)
{
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * f[i] * nu[i];
    return std::sqrt(s);
}

} // namespace

TEST_CASE("dual weights")
{
    const auto q = build_quadrature(RadialMeasure::lebesgue(), 4, 2);
    const auto one = make_field(q, [](cplx) { return 1.0; });
    for (double x : dual_weight(one, 3.0).values) CHECK(x == 1.0);
    const auto v = make_weight(q, {"bump", 0.3, 1.0, 0.2, 0.1, 2.0});
    const auto s2 = dual_weight(v, 2.0);
    for (std::size_t i = 0; i < q->size(); ++i) CHECK(std::fabs(s2.values[i] * v.values[i] - 1.0) < 1e-14);
    const auto s3 = dual_weight(power_weight(q, 0.5), 3.0);
    const auto expect = power_weight(q, -0.25);
    for (std::size_t i = 0; i < q->size(); ++i) CHECK(s3.values[i] == doctest::Approx(expect.values[i]).epsilon(1e-14));
    const auto back = dual_weight(dual_weight(v, 3.0), 1.5);
    for (std::size_t i = 0; i < q->size(); ++i) CHECK(back.values[i] == doctest::Approx(v.values[i]).epsilon(1e-13));
    CHECK_THROWS_AS(dual_weight(v, 1.0), Error);
    CHECK_THROWS_AS(make_weight(q, {"bad", 0.0, 0.0, 0.0, 0.0, 1.0}), Error);
}

TEST_CASE("B_p characteristic examples")
{
    const auto q = build_quadrature(RadialMeasure::lebesgue(), 8, 3);
    const auto one = make_field(q, [](cplx) { return 1.0; });
    const auto r1 = bp_characteristic(one, 2.0, 8);
    CHECK(r1.value == doctest::Approx(1.0).epsilon(1e-12));
    for (double d : r1.per_depth) CHECK(d == doctest::Approx(1.0).epsilon(1e-12));
    const auto c = make_field(q, [](cplx) { return 7.5; });
    CHECK(bp_characteristic(c, 3.0, 8).value == doctest::Approx(1.0).epsilon(1e-12));

    const auto v = power_weight(q, 0.5);
    const auto r = bp_characteristic(v, 2.0, 8);
    CHECK(std::isfinite(r.value));
    CHECK(r.value > 1.0);
    CHECK(r.per_depth.size() == 9);
    CHECK(r.per_depth[8] / r.per_depth[6] < 1.1);
    CHECK(r.per_depth.back() == r.value);

    // brute force over both grids with geometric membership
    const auto& m = q->masses();
    double brute = 0.0;
    for (int beta2 : {0, 1}) {
        for (int l = 0; l <= 5; ++l) {
            for (std::int64_t k = 0; k < (std::int64_t{1} << l); ++k) {
                const auto S = carleson_square(DyadicInterval{beta2, l, k});
                double w = 0.0, a = 0.0, b = 0.0;
                for (std::size_t i = 0; i < q->size(); ++i) {
                    if (!S.contains(q->nodes()[i])) continue;
                    w += m[i];
                    a += v.values[i] * m[i];
                    b += m[i] / v.values[i];
                }
                brute = std::max(brute, (a / w) * (b / w));
            }
        }
    }
    CHECK(r.per_depth[5] == doctest::Approx(brute).epsilon(1e-12));
    CHECK_THROWS_AS(bp_characteristic(v, 1.0, 8), Error);
    CHECK_THROWS_AS(bp_characteristic(v, 2.0, 9), Error);
}

TEST_CASE("B_p invariants")
{
    const auto q = build_quadrature(RadialMeasure::standard(0.5), 7, 3);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(-0.8, 0.8);
    for (int s = 0; s < 20; ++s) {
        const WeightSpec spec{"w", U(rng), U(rng), 0.5 + 0.5 * U(rng), 0.05 + 0.1 * std::fabs(U(rng)), 4.0 * std::fabs(U(rng))};
        const auto v = make_weight(q, spec);
        for (double p : {1.5, 2.0, 3.0}) {
            const auto rv = bp_characteristic(v, p, 7);
            CHECK(rv.value >= 1.0 - 1e-12);
            auto scaled = v;
            for (double& x : scaled.values) x *= 13.0;
            CHECK(bp_characteristic(scaled, p, 7).value == doctest::Approx(rv.value).epsilon(1e-12));
            const double pp = p / (p - 1.0);
            const auto rs = bp_characteristic(dual_weight(v, p), pp, 7);
            CHECK(rs.value == doctest::Approx(std::pow(rv.value, pp / p)).epsilon(1e-11));
            for (std::size_t l = 1; l < rv.per_depth.size(); ++l) CHECK(rv.per_depth[l] >= rv.per_depth[l - 1]);
        }
    }
}

TEST_CASE("classical B_p with alpha = 0 equals the Lebesgue characteristic")
{
    const auto q = build_quadrature(RadialMeasure::lebesgue(), 7, 3);
    for (double eta : {-0.5, 0.5, 2.0}) {
        const auto v = make_weight(q, {"w", eta, 0.0, 0.3, 0.1, 1.0});
        for (double p : {1.5, 2.0, 4.0}) {
            CHECK(bp_alpha_characteristic(v, p, 0.0, 7).value == doctest::Approx(bp_characteristic(v, p, 7).value).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS(bp_alpha_characteristic(power_weight(q, 0.0), 2.0, -1.0, 7), Error);
}

TEST_CASE("B_1 characteristic")
{
    const auto q5 = build_quadrature(RadialMeasure::lebesgue(), 5, 3);
    CHECK(b1_characteristic(make_field(q5, [](cplx) { return 1.0; })).value == doctest::Approx(1.0).epsilon(1e-12));
    const auto v = power_weight(q5, -0.25);
    auto v3 = v;
    for (double& x : v3.values) x *= 3.0;
    CHECK(b1_characteristic(v3).value == doctest::Approx(b1_characteristic(v).value).epsilon(1e-12));

    std::vector<double> good, bad;
    for (int J : {5, 6, 7}) {
        const auto q = build_quadrature(RadialMeasure::lebesgue(), J, 3);
        good.push_back(b1_characteristic(power_weight(q, -0.25)).value);
        bad.push_back(b1_characteristic(power_weight(q, 0.5)).value);
    }
    CHECK(good[2] / good[0] < 1.1);
    CHECK(bad[1] > 1.2 * bad[0]);
    CHECK(bad[2] > 1.2 * bad[1]);

    // B_2 ≲ B_1 on test weights
    const auto q = build_quadrature(RadialMeasure::lebesgue(), 6, 3);
    for (const WeightSpec& spec : {WeightSpec{"a", -0.25}, WeightSpec{"b", -0.5, 0.5}, WeightSpec{"c", -0.1, 0.0, 0.25, 0.05, 3.0}}) {
        const auto w = make_weight(q, spec);
        const double b1 = b1_characteristic(w).value, b2 = bp_characteristic(w, 2.0, 6).value;
        CHECK(b2 <= 4.0 * b1 * b1);
    }
}

TEST_CASE("disc maximal examples")
{
    const auto q = build_quadrature(RadialMeasure::lebesgue(), 5, 3);
    const DiscMaximal M(q);
    CHECK(M.disc_count() > q->size());
    const std::vector<double> one(q->size(), 1.0);
    for (double x : M(one)) CHECK(x == doctest::Approx(1.0).epsilon(1e-14));
    std::vector<double> ind(q->size());
    // D(a, 1-|a|) at a node a is a family disc
    const cplx a = q->nodes()[q->size() / 2];
    for (std::size_t i = 0; i < q->size(); ++i) ind[i] = std::abs(q->nodes()[i] - a) < 1.0 - std::abs(a) ? 1.0 : 0.0;
    const auto Mi = M(ind);
    std::mt19937_64 rng(5);
    const auto f = random_sparse(rng, q->size());
    const auto Mf = M(f);
    double avg = 0.0;
    for (std::size_t i = 0; i < q->size(); ++i) avg += f[i] * q->masses()[i];
    avg /= q->total_mass();
    for (std::size_t i = 0; i < q->size(); ++i) {
        if (ind[i] > 0.0) CHECK(Mi[i] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(Mf[i] >= avg * (1.0 - 1e-14));
    }
    CHECK(disc_maximal(M, f, 3) == Mf[3]);
}

TEST_CASE("dyadic maximal examples")
{
    const auto q = build_quadrature(RadialMeasure::standard(1.0), 6, 3);
    const auto& nu = q->masses();
    for (int beta2 : {0, 1}) {
        const std::vector<double> one(q->size(), 1.0);
        for (double x : dyadic_maximal(*q, nu, beta2, one, 6)) CHECK(x == doctest::Approx(1.0).epsilon(1e-13));

        const DyadicInterval I0{beta2, 3, 5};
        std::vector<double> ind(q->size());
        for (std::size_t i = 0; i < q->size(); ++i) ind[i] = q->in_square(i, I0) ? 1.0 : 0.0;
        const auto Mi = dyadic_maximal(*q, nu, beta2, ind, 6);
        for (std::size_t i = 0; i < q->size(); ++i) {
            double oracle = 0.0;
            for (int l = 0; l <= 6; ++l) {
                for (std::int64_t k = 0; k < (std::int64_t{1} << l); ++k) {
                    const DyadicInterval I{beta2, l, k};
                    if (!q->in_square(i, I)) continue;
                    double a = 0.0, w = 0.0;
                    for (std::size_t j = 0; j < q->size(); ++j) {
                        if (!q->in_square(j, I)) continue;
                        w += nu[j];
                        a += ind[j] * nu[j];
                    }
                    oracle = std::max(oracle, a / w);
                }
            }
            CHECK(Mi[i] == doctest::Approx(oracle).epsilon(1e-12));
            if (ind[i] > 0.0) CHECK(Mi[i] == doctest::Approx(1.0).epsilon(1e-13));
        }

        std::mt19937_64 rng(6 + beta2);
        const auto f = random_sparse(rng, q->size());
        double avg = 0.0;
        for (std::size_t i = 0; i < q->size(); ++i) avg += f[i] * nu[i];
        avg /= q->total_mass();
        for (double x : dyadic_maximal(*q, nu, beta2, f, 6)) CHECK(x >= avg * (1.0 - 1e-13));
    }
}

TEST_CASE("dyadic maximal weak (1,1) and L2 bounds")
{
    const auto q = build_quadrature(RadialMeasure::lebesgue(), 7, 3);
    std::vector<double> nu(q->size());
    for (std::size_t i = 0; i < q->size(); ++i) nu[i] = q->masses()[i] * std::pow(1.0 - std::abs(q->nodes()[i]), -0.3);
    std::mt19937_64 rng(9);
    const std::vector<double> one(q->size(), 1.0);
    for (int beta2 : {0, 1}) {
        CHECK(weak11_maximal_check(*q, nu, beta2, one, 7) == doctest::Approx(1.0).epsilon(1e-13));
        std::vector<double> ind(q->size());
        const DyadicInterval I{beta2, 4, 3};
        double mass = 0.0;
        for (std::size_t i = 0; i < q->size(); ++i) mass += q->in_square(i, I) ? nu[i] : 0.0;
        for (std::size_t i = 0; i < q->size(); ++i) ind[i] = q->in_square(i, I) ? 1.0 / mass : 0.0;
        CHECK(weak11_maximal_check(*q, nu, beta2, ind, 7) <= 2.0 + 1e-10);
        double l2max = 0.0;
        for (int s = 0; s < 100; ++s) {
            const auto f = random_sparse(rng, q->size());
            CHECK(weak11_maximal_check(*q, nu, beta2, f, 7) <= 2.0 + 1e-10);
            l2max = std::max(l2max, l2(dyadic_maximal(*q, nu, beta2, f, 7), nu) / l2(f, nu));
        }
        // Doob's inequality on the nested grid
        if (beta2 == 0) CHECK(l2max <= 2.0);
        CHECK(std::isfinite(l2max));
    }
    CHECK_THROWS_AS(weak11_maximal_check(*q, nu, 0, std::vector<double>(q->size(), 0.0), 7), Error);
}

TEST_CASE("weak type sweep matches a lambda grid")
{
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int s = 0; s < 50; ++s) {
        std::vector<double> g(200), nu(200);
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] = std::floor(20.0 * U(rng)) / 4.0;
            nu[i] = U(rng);
        }
        std::vector<double> lam;
        for (int k = 1; k <= 20 * 4 * 1000; ++k) lam.push_back(k / 4000.0);
        const double exact = weak_type_sup(g, nu);
        const double grid = weak_type_on_grid(g, nu, lam);
        CHECK(grid <= exact * (1.0 + 1e-12));
        CHECK(grid >= exact * (1.0 - 1e-3));
    }
    const auto L = geometric_lambda_grid(1.0, 16.0);
    CHECK(L.size() == 17);
    CHECK(L.back() == doctest::Approx(16.0));
    CHECK_THROWS_AS(geometric_lambda_grid(0.0, 1.0), Error);
}

TEST_CASE("weak (1,1) projection examples")
{
    const auto q = build_quadrature(RadialMeasure::lebesgue(), 5, 3);
    const auto spec = make_kernel_spec(1.0, RadialMeasure::atoms_only("atom1", {{1.0, 1.0}}));
    const auto P = bergman_operator(q, spec);
    const auto Pp = positive_operator(q, spec);
    const auto v = make_field(q, [](cplx) { return 1.0; });
    const auto zero = weak11_projection_check(P, Pp, v, make_field(q, [](cplx) { return 0.0; }));
    CHECK(zero.signed_ratio == 0.0);
    CHECK(zero.positive_ratio == 0.0);
    Field cell = make_field(q, [](cplx) { return 0.0; });
    cell.values[40] = 1.0;
    const auto r = weak11_projection_check(P, Pp, v, cell);
    CHECK(r.signed_ratio > 0.0);
    CHECK(std::isfinite(r.positive_ratio));
    CHECK(r.positive_ratio >= r.signed_ratio * (1.0 - 1e-12));
}
