#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "divcert/sobolev.hpp"

using namespace divcert;

namespace {

const Schedule& acceptance()
{
    static const auto s = build_annulus_schedule(DispersionSymbol::homogeneous(2.0, 1),
                                                 build_spatial_schedule(ApproachProfile::identity(), 1, 6), 81.0);
    return s;
}

} // namespace

TEST(Annulus, SingleAnnulusAgainstReference)
{
    // 30-digit references
    EXPECT_NEAR(hs_annulus_norm(1, 0.5, 1.0L, 4.0L), 2.04172106132684607384992895394, 1e-8 * 2.04);
    EXPECT_LE(hs_annulus_norm(1, 0.5, 1.0L, 4.0L), 2.0 * std::sqrt(2.0));
    EXPECT_NEAR(hs_annulus_norm(1, 1.0, 1.0L, 3.0L), 11.6337814365324053577624664048, 1e-8 * 11.6);
}

TEST(Annulus, ClosedFormSplit)
{
    EXPECT_NEAR(hs_annulus_norm(1, 0.5, 30.0L, 50.0L), 0.164611318390983465088617554077, 1e-9 * 0.1646);
    // far out: pure antiderivative 2(a^{-1/2} - b^{-1/2}) times |S^0| = 2
    EXPECT_NEAR(hs_annulus_norm(1, 0.5, 1e6L, 4e6L), 4.0 * (1e-3 - 5e-4), 1e-15);
    EXPECT_GT(hs_annulus_norm(1, 0.5, 1e400L, 81e400L), 0.0);
    EXPECT_THROW(hs_annulus_norm(1, 1.0, 1e3L, 2e3L), RegimeError);
}

TEST(Annulus, Preconditions)
{
    EXPECT_THROW(hs_annulus_norm(1, -0.5, 1.0L, 2.0L), InputError);
    EXPECT_THROW(hs_annulus_norm(1, 0.5, 0.0L, 2.0L), DomainError);
    EXPECT_THROW(hs_annulus_norm(1, 0.5, 3.0L, 2.0L), DomainError);
}

TEST(TailBound, Examples)
{
    EXPECT_NEAR(hs_tail_bound(4.0L, 1), 2.0 * std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(hs_tail_bound(4.0L, 2), 4.0 * std::numbers::pi, 1e-13);
    EXPECT_LT(hs_tail_bound(1e12L, 1), 1e-5);
    EXPECT_LT(hs_tail_bound(1e400L, 1), 1e-190);
    EXPECT_NEAR(hs_tail_bound(4.0L, 1, 2.0), std::sqrt(2.0) * 2.0 / 4.0, 1e-15);
    EXPECT_THROW(hs_tail_bound(0.0L, 1), DomainError);
    EXPECT_THROW(hs_tail_bound(4.0L, 1, 1.0), InputError);
}

TEST(TailBound, DominatesAnnulusBeyondRadius)
{
    for (double la : {1.0, 3.0, 20.0, 100.0})
        EXPECT_LE(hs_annulus_norm(1, 0.5, la, 50.0 * la), hs_tail_bound(la, 1)) << la;
    EXPECT_LE(hs_annulus_norm(2, 1.0, 2.0L, 30.0L), hs_tail_bound(2.0L, 2));
}

TEST(Partial, MonotoneAndCauchy)
{
    const auto& s = acceptance();
    const auto p = hs_partial_norms(s, 0.5, s.size());
    ASSERT_EQ(p.size(), s.size());
    for (std::size_t j = 1; j < p.size(); ++j) {
        EXPECT_GE(p[j], p[j - 1]);
        EXPECT_LE(p.back() - p[j - 1], hs_tail_bound(s.log_R[j], 1)) << j;
    }
    EXPECT_EQ(hs_partial_norm(s, 0.5, 0), 0.0);
    EXPECT_EQ(hs_partial_norm(s, 0.5, 4), p[3]);
    EXPECT_THROW(hs_partial_norms(s, 0.5, s.size() + 1), DomainError);
}

TEST(Partial, UnimodularFactorsIrrelevant)
{
    auto s = acceptance();
    const double before = hs_partial_norm(s, 0.5, 10);
    for (auto& x : s.points)
        std::fill(x.begin(), x.end(), 0.0);
    std::fill(s.times.begin(), s.times.end(), 0.0);
    EXPECT_EQ(hs_partial_norm(s, 0.5, 10), before);
}

TEST(Report, AcceptanceMembership)
{
    const auto& s = acceptance();
    const std::size_t K = 6;
    const auto r = sobolev_report(s, 0.5, K);
    ASSERT_EQ(r.partial_norms.size(), K);
    ASSERT_EQ(r.increment_bounds.size(), K - 1);
    for (std::size_t j = 1; j < K; ++j) {
        EXPECT_GE(r.partial_norms[j], r.partial_norms[j - 1]);
        EXPECT_LE(r.partial_norms[j] - r.partial_norms[j - 1], r.increment_bounds[j - 1]);
    }
    EXPECT_LT(r.tail_bound, 0.1 * r.partial_norms.back());
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.norm(), std::sqrt(r.partial_norms.back()), 0.0);
}

TEST(Contrast, DecayIntegralAboveCriticalOrder)
{
    EXPECT_NEAR(decay_integral_limit(1, 1.0), std::numbers::pi, 1e-14);
    EXPECT_NEAR(decay_integral_limit(2, 1.5), 2.0 * std::numbers::pi, 1e-13);
    // n=2, s=3/2: 2 pi (1 - (1 + r^2)^{-1/2})
    for (double rm : {1.0, 10.0, 1000.0}) {
        const double v = decay_integral(2, 1.5, rm);
        EXPECT_NEAR(v, 2.0 * std::numbers::pi * (1.0 - 1.0 / std::sqrt(1.0 + rm * rm)), 1e-9);
        EXPECT_LT(v, decay_integral_limit(2, 1.5));
    }
    EXPECT_THROW(decay_integral_limit(1, 0.5), DomainError);
}
