#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "bergman/errors.hpp"
#include "bergman/measures.hpp"

using namespace bergman;

TEST_CASE("tail examples")
{
    CHECK(RadialMeasure::lebesgue().tail(0.5) == doctest::Approx(0.5).epsilon(1e-13));
    const auto atom = RadialMeasure::atoms_only("a", {{1.0, 2.0}});
    CHECK(atom.tail(0.9) == 2.0);
    CHECK(atom.tail(1.0) == 2.0);

    // antiderivative of 1 - r^2 is r - r^3/3
    const RadialMeasure shape("shape", [](double r) { return 1.0 - r * r; });
    auto F = [](double r) { return r - r * r * r / 3.0; };
    CHECK(std::fabs(shape.tail(0.5) - (F(1.0) - F(0.5))) < 1e-12);
}

TEST_CASE("moment examples and Beta oracle")
{
    const auto leb = RadialMeasure::lebesgue();
    CHECK(std::fabs(leb.moment(1) - 0.5) < 1e-13);
    CHECK(std::fabs(leb.moment(3) - 0.25) < 1e-13);
    for (double alpha : {1.0, 2.0, 0.5}) {
        const auto w = RadialMeasure::standard(alpha);
        for (int n : {0, 1, 5, 40, 300}) {
            const double oracle = (alpha + 1.0) * std::beta(n + 1.0, alpha + 1.0) / 2.0;
            CHECK(std::fabs(w.moment(2 * n + 1) / oracle - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("interval mass examples")
{
    const auto leb = RadialMeasure::lebesgue();
    CHECK(std::fabs(leb.interval_mass(0.25, 0.75) - 0.5) < 1e-13);
    CHECK(RadialMeasure::atoms_only("a", {{0.5, 1.0}}).interval_mass(0.5, 0.5) == 1.0);
    CHECK(std::fabs(leb.interval_mass(0.0, 0.5) / leb.interval_mass(0.0, 1.0) - 0.5) < 1e-13);
    CHECK_THROWS_AS(leb.interval_mass(0.7, 0.2), Error);
}

TEST_CASE("doubling report examples")
{
    const auto leb = doubling_report(RadialMeasure::lebesgue(), 10);
    CHECK(leb.constant_hat == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(std::fabs(leb.regular_fit.gamma - 1.0) < 1e-3);
    CHECK(std::fabs(leb.regular_fit.beta - 1.0) < 1e-3);
    CHECK(leb.regular_fit.C == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(leb.interval_doubling == doctest::Approx(2.0).epsilon(1e-10));
    CHECK_FALSE(leb.not_supported_near_one);

    // 3(1-r)^2 has tail (1-r)^3
    const auto cubic = doubling_report(RadialMeasure::power(2.0), 10);
    CHECK(cubic.constant_hat == doctest::Approx(8.0).epsilon(1e-8));
    CHECK(cubic.regular_fit.gamma == doctest::Approx(3.0).epsilon(1e-6));

    const auto atom = doubling_report(RadialMeasure::atoms_only("a1", {{1.0, 1.0}}), 10);
    CHECK_FALSE(atom.not_supported_near_one);
    CHECK(atom.constant_hat == 1.0);

    const auto inner = doubling_report(RadialMeasure::atoms_only("a", {{0.3, 1.0}}), 6);
    CHECK(inner.not_supported_near_one);
}

TEST_CASE("property: tail monotone, moments log-convex, interval additivity")
{
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const RadialMeasure measures[] = {
        RadialMeasure::lebesgue(),
        RadialMeasure::standard(1.5),
        RadialMeasure::power(0.5).with_atoms({{0.5, 0.3}, {1.0, 0.2}}),
        RadialMeasure::exponential(0.5),
    };
    for (const auto& w : measures) {
        for (int i = 0; i < 1000; ++i) {
            double a = U(rng), b = U(rng);
            if (a > b) std::swap(a, b);
            CHECK(w.tail(a) >= w.tail(b) - 1e-12);
        }
        for (int i = 0; i < 100; ++i) {
            const double x = 20.0 * U(rng), z = 20.0 * U(rng);
            const double y = 0.5 * (x + z);
            CHECK(w.moment(x) * w.moment(z) >= w.moment(y) * w.moment(y) * (1.0 - 1e-9));
        }
        for (int i = 0; i < 100; ++i) {
            double p[3] = {U(rng), U(rng), U(rng)};
            std::sort(p, p + 3);
            const double lhs = w.interval_mass(p[0], p[2]);
            const double rhs = w.interval_mass(p[0], p[1]) + w.interval_mass(p[1], p[2]) -
                               w.atom_mass_at(p[1]);
            CHECK(std::fabs(lhs - rhs) < 1e-10);
        }
        const double at_atom = w.interval_mass(0.2, 0.5) + w.interval_mass(0.5, 0.9) - w.atom_mass_at(0.5);
        CHECK(std::fabs(w.interval_mass(0.2, 0.9) - at_atom) < 1e-10);
    }
}
