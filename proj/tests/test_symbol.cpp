#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "divcert/conditions.hpp"
#include "divcert/symbol.hpp"

using namespace divcert;

namespace {

const std::vector<double> plus1{1.0};

std::vector<DispersionSymbol> builtins(int n)
{
    std::vector<DispersionSymbol> out;
    out.push_back(DispersionSymbol::homogeneous(2.0, n));
    out.push_back(DispersionSymbol::homogeneous(1.5, n));
    out.push_back(DispersionSymbol::homogeneous(3.0, n));
    out.push_back(DispersionSymbol::r_log_r(n));
    out.push_back(DispersionSymbol::exponential(1.0, 1.0, n));
    HomogeneousSum sum;
    sum.terms.push_back({1.0, [](Direction) { return 0.5; }, 0.5, 0.5, true});
    sum.terms.push_back({2.0, [](Direction w) { return 2.0 + w[0]; }, 1.0, 3.0, false});
    out.emplace_back(sum, n);
    return out;
}

} // namespace

TEST(Symbol, ValuesFromExamples)
{
    EXPECT_DOUBLE_EQ(DispersionSymbol::homogeneous(2.0, 1).phi(3.0, plus1), 9.0);
    EXPECT_DOUBLE_EQ(DispersionSymbol::homogeneous(2.0, 1).dphi(3.0, plus1), 6.0);
    EXPECT_DOUBLE_EQ(DispersionSymbol::homogeneous(3.0, 1, 1.0).d2phi(2.0, plus1), 12.0);
    const auto rl = DispersionSymbol::r_log_r(1);
    EXPECT_NEAR(rl.phi(std::numbers::e, plus1), std::numbers::e, 1e-15);
    EXPECT_NEAR(rl.dphi(std::numbers::e, plus1), 2.0, 1e-15);
    EXPECT_NEAR(DispersionSymbol::exponential(1.0, 1.0, 1, 1.0).phi(2.0, plus1), 7.389056, 1e-6);
}

TEST(Symbol, DomainAndDirectionErrors)
{
    const auto s = DispersionSymbol::homogeneous(2.0, 2);
    const std::vector<double> w{1.0, 0.0};
    EXPECT_THROW((void)s.phi(2.0, w), DomainError);
    EXPECT_THROW((void)s.phi(1.0, w), DomainError);
    const std::vector<double> bad{1.0, 0.1};
    EXPECT_THROW((void)s.phi(3.0, bad), InputError);
    EXPECT_THROW((void)s.phi(3.0, plus1), InputError);
    EXPECT_THROW(DispersionSymbol::homogeneous(-1.0, 1), InputError);
}

TEST(Symbol, DerivativesMatchCenteredDifferences)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ur(3.0, 30.0), ang(0.0, 2.0 * std::numbers::pi);
    for (int n : {1, 2}) {
        for (const auto& s : builtins(n)) {
            for (int i = 0; i < 100; ++i) {
                const double r = ur(rng);
                std::vector<double> w;
                if (n == 1)
                    w = {i % 2 ? 1.0 : -1.0};
                else {
                    const double th = ang(rng);
                    w = {std::cos(th), std::sin(th)};
                }
                const double h = 1e-5 * r;
                const double fd1 = (s.phi(r + h, w) - s.phi(r - h, w)) / (2 * h);
                const double fd2 = (s.dphi(r + h, w) - s.dphi(r - h, w)) / (2 * h);
                const double fd3 = (s.d2phi(r + h, w) - s.d2phi(r - h, w)) / (2 * h);
                const double d1 = s.dphi(r, w), d2 = s.d2phi(r, w), d3 = s.d3phi(r, w);
                EXPECT_LE(std::abs(d1 - fd1), 1e-6 * (1 + std::abs(d1)))
                    << s.name() << " r=" << r;
                EXPECT_LE(std::abs(d2 - fd2), 1e-6 * (1 + std::abs(d2)))
                    << s.name() << " r=" << r;
                EXPECT_LE(std::abs(d3 - fd3), 1e-5 * (1 + std::abs(d3)))
                    << s.name() << " r=" << r;
            }
        }
    }
}

TEST(Symbol, Homogeneity)
{
    const auto s = DispersionSymbol::homogeneous(2.5, 1);
    for (double lam : {2.0, 10.0}) {
        const double r = 3.7;
        EXPECT_NEAR(s.phi(lam * r, plus1), std::pow(lam, 2.5) * s.phi(r, plus1),
                    1e-12 * s.phi(lam * r, plus1));
    }
}

TEST(Symbol, LogDomainAgreesWithDirect)
{
    for (const auto& s : builtins(1)) {
        for (double r : {3.0, 17.0, 40.0}) {
            const auto lr = LogRadius::from_r(r);
            EXPECT_NEAR(static_cast<double>(s.log_abs_dphi(lr, plus1)),
                        std::log(std::abs(s.dphi(r, plus1))), 1e-10)
                << s.name();
            const double ratio = r * std::abs(s.d2phi(r, plus1))
                                 / (s.dphi(r, plus1) * s.dphi(r, plus1) * std::pow(std::log(r), 0.75));
            EXPECT_NEAR(static_cast<double>(s.log_curvature_ratio(lr, plus1)), std::log(ratio), 1e-10)
                << s.name();
        }
    }
}

TEST(Symbol, LogDomainBeyondDoubleRange)
{
    const auto s = DispersionSymbol::homogeneous(2.0, 1);
    const LogRadius huge{1e6L};
    EXPECT_NEAR(static_cast<double>(s.log_abs_dphi(huge, plus1)), std::log(2.0) + 1e6, 1e-6);
    EXPECT_TRUE(std::isfinite(static_cast<double>(s.log_curvature_ratio(huge, plus1))));
    EXPECT_FALSE(huge.representable());
}

TEST(Conditions, ExampleVerdicts)
{
    const auto a2 = verify_growth_conditions(DispersionSymbol::homogeneous(2.0, 1), 1e6, 64);
    EXPECT_TRUE(a2.has(Verdict::theorem1));
    EXPECT_TRUE(a2.grows_unboundedly);
    EXPECT_LT(a2.ratio_bound_C, 1.0);

    const auto a1 = verify_growth_conditions(DispersionSymbol::homogeneous(1.0, 1), 1e6, 64, 1.0);
    EXPECT_FALSE(a1.grows_unboundedly);
    EXPECT_DOUBLE_EQ(a1.lower_bound_h, 1.0);
    ASSERT_TRUE(a1.weak_ratio_bound.has_value());
    EXPECT_EQ(*a1.weak_ratio_bound, 0.0);
    EXPECT_FALSE(a1.has(Verdict::theorem1));
    EXPECT_TRUE(a1.has(Verdict::theorem2_strong));
    EXPECT_TRUE(a1.has(Verdict::theorem2_weak));

    EXPECT_TRUE(verify_growth_conditions(DispersionSymbol::r_log_r(1), 1e6, 64).has(Verdict::theorem1));
}

TEST(Conditions, CheckerMatrix)
{
    for (double a : {1.5, 2.0, 3.0})
        EXPECT_TRUE(verify_growth_conditions(DispersionSymbol::homogeneous(a, 1), 1e6, 64)
                        .has(Verdict::theorem1));
    EXPECT_TRUE(verify_growth_conditions(DispersionSymbol::exponential(1.0, 1.0, 1), 1e6, 64)
                    .has(Verdict::theorem1));
}

TEST(Conditions, MonotoneInRmax)
{
    for (const auto& s : {DispersionSymbol::homogeneous(1.5, 1), DispersionSymbol::r_log_r(1),
                          DispersionSymbol::exponential(1.0, 1.0, 1)}) {
        bool seen = false;
        for (double rmax : {1e3, 1e4, 1e6, 1e9}) {
            const bool g = verify_growth_conditions(s, rmax, 64).grows_unboundedly;
            if (seen) {
                EXPECT_TRUE(g) << s.name() << " rmax=" << rmax;
            }
            seen = seen || g;
        }
        EXPECT_TRUE(seen);
    }
}

TEST(Conditions, RecordsGrid)
{
    const auto rep = verify_growth_conditions(DispersionSymbol::homogeneous(2.0, 2), 1e4, 16);
    EXPECT_EQ(rep.grid.radii.size(), 16u);
    EXPECT_NEAR(rep.grid.radii.front(), 3.0, 1e-12);
    EXPECT_NEAR(rep.grid.radii.back(), 1e4, 1e-8);
    EXPECT_EQ(rep.grid.angular_points, 1u);
}

TEST(Conditions, Preconditions)
{
    const auto s = DispersionSymbol::homogeneous(2.0, 1);
    EXPECT_THROW(verify_growth_conditions(s, 1.0, 64), DomainError);
    EXPECT_THROW(verify_growth_conditions(s, 1e6, 8), InputError);
}

TEST(Conditions, AnisotropicSumNeedsNonvanishingLeadingProfile)
{
    HomogeneousSum good;
    good.terms.push_back({2.0, [](Direction w) { return 2.0 + w[0]; }, 1.0, 3.0, false});
    const auto rep = verify_growth_conditions(DispersionSymbol(good, 2), 1e5, 32);
    ASSERT_TRUE(rep.leading_profile_inf.has_value());
    EXPECT_NEAR(*rep.leading_profile_inf, 1.0, 1e-12);
    EXPECT_TRUE(rep.has(Verdict::theorem1));

    HomogeneousSum bad;
    bad.terms.push_back({1.0, [](Direction) { return 1.0; }, 1.0, 1.0, true});
    bad.terms.push_back({2.0, [](Direction w) { return w[0]; }, 0.0, 1.0, false});
    const auto rep2 = verify_growth_conditions(DispersionSymbol(bad, 2), 1e5, 32);
    EXPECT_FALSE(rep2.has(Verdict::theorem1));
}
