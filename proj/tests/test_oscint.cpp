#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "divcert/oscint.hpp"

using namespace divcert;

namespace {

// Two-term n=1 schedule with hand-picked data.
Schedule tiny_schedule(LogReal la1, LogReal lb1)
{
    Schedule s;
    s.n = 1;
    s.K = 1;
    s.points = {{0.0}, {0.5}};
    s.times = {0.3, 0.2};
    s.terms = {0, 1};
    s.N = static_cast<double>(lb1 / la1);
    s.log_R = {la1, lb1 * 2};
    s.log_Rp = {lb1, lb1 * 2 * static_cast<LogReal>(s.N)};
    return s;
}

RadialPhase linear_phase(double c)
{
    RadialPhase p;
    p.F = [c](double r) { return c * r; };
    p.d1 = [c](double) { return c; };
    p.d2 = [](double) { return 0.0; };
    p.d3 = [](double) { return 0.0; };
    return p;
}

const std::vector<double> plus1{1.0};

} // namespace

TEST(Phase, DiagonalIsZero)
{
    const auto sym = DispersionSymbol::homogeneous(2.0, 1);
    const auto s = tiny_schedule(std::log(4.0L), std::log(256.0L));
    const auto p = phase_at(sym, s, 1, target_of(s, 1), 10.0, plus1);
    EXPECT_EQ(p.F, 0.0);
    EXPECT_EQ(p.dF, 0.0);
    EXPECT_EQ(p.d2F, 0.0);
}

TEST(Phase, WorkedArithmetic)
{
    const auto sym = DispersionSymbol::homogeneous(2.0, 1);
    const auto s = tiny_schedule(std::log(4.0L), std::log(256.0L));
    const Target tg{{0.5}, 0.4};
    const auto p = phase_at(sym, s, 1, tg, 10.0, plus1);
    EXPECT_NEAR(p.F, 15.0, 1e-13);
    EXPECT_NEAR(p.dF, 2.5, 1e-14);
    EXPECT_NEAR(p.d2F, 0.2, 1e-15);
    EXPECT_THROW(phase_at(sym, s, 1, tg, 300.0, plus1), DomainError);
}

TEST(Phase, FiniteDifferenceOfF)
{
    const auto sym = DispersionSymbol::r_log_r(1);
    const auto s = tiny_schedule(std::log(4.0L), std::log(256.0L));
    const Target tg{{0.9}, 0.47};
    for (double r : {5.0, 20.0, 100.0}) {
        for (double w : {1.0, -1.0}) {
            const std::vector<double> om{w};
            const double h = 1e-5 * r;
            const double fd = (phase_at(sym, s, 1, tg, r + h, om).F - phase_at(sym, s, 1, tg, r - h, om).F) / (2 * h);
            const double d = phase_at(sym, s, 1, tg, r, om).dF;
            EXPECT_NEAR(fd, d, 1e-6 * std::abs(d));
        }
    }
}

TEST(Phase, LogOnlyTermsRaiseRegimeError)
{
    const auto sym = DispersionSymbol::homogeneous(2.0, 1);
    const auto s = tiny_schedule(std::log(4.0L), 800.0L);
    EXPECT_THROW(phase_at(sym, s, 2, target_of(s, 1), 10.0, plus1), RegimeError);
}

TEST(RadialDirect, ZeroPhaseClosedForm)
{
    const auto r = radial_direct(zero_phase(), 1.0L, 16.0L, 1e-12);
    EXPECT_NEAR(r.value.real(), 4.0, 1e-11);
    EXPECT_EQ(r.value.imag(), 0.0);
    EXPECT_LE(r.abs_error, 1e-12);
}

TEST(RadialDirect, LinearPhaseFixture)
{
    // reference from a 30-digit quadrature
    const cplx ref(-0.041512877993525521992, -0.015137360765635818367);
    const auto r = radial_direct(linear_phase(10.0), 1.0L, 2.0L, 1e-13);
    EXPECT_LT(std::abs(r.value - ref), 1e-12);
}

TEST(RadialDirect, Linearity)
{
    const auto a = radial_direct(linear_phase(10.0), 1.0L, 2.0L, 1e-13, 1.0);
    const auto b = radial_direct(linear_phase(10.0), 1.0L, 2.0L, 1e-13, 2.0);
    EXPECT_LE(std::abs(b.value - 2.0 * a.value), 1e-12 * std::abs(b.value));
}

TEST(RadialDirect, CapAndRepresentability)
{
    EXPECT_THROW(radial_direct(linear_phase(1.0), 1.0L, 20.0L, 1e-8), RegimeError);
    EXPECT_THROW(radial_direct(zero_phase(), 1.0L, 800.0L, 1e-8), RegimeError);
}

TEST(RadialDirect, ConjugationSymmetry)
{
    const auto sym = DispersionSymbol::homogeneous(2.0, 1);
    const auto p = schedule_phase(sym, 0.7, 0.05, plus1);
    const auto m = schedule_phase(sym, -0.7, -0.05, plus1);
    const auto a = radial_direct(p, 1.5L, 4.0L, 1e-13);
    const auto b = radial_direct(m, 1.5L, 4.0L, 1e-13);
    EXPECT_LT(std::abs(a.value - std::conj(b.value)), 1e-12);
}

TEST(RadialIbp, OracleEquivalenceRandom)
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const auto sym = DispersionSymbol::homogeneous(2.0, 1);
    int tight = 0;
    for (int c = 0; c < 50; ++c) {
        const LogReal la = 1.0L + U(rng);
        const LogReal lb = la + 0.5L + 2.5L * U(rng);
        const double sgn = U(rng) < 0.5 ? -1.0 : 1.0;
        const double scale = 1e4 / std::exp(2.0 * static_cast<double>(lb));
        const double dt = sgn * (0.05 + 0.4 * U(rng)) * scale;
        const double dxw = sgn * U(rng) * 10.0;
        const auto ph = schedule_phase(sym, dxw, dt, plus1);
        ASSERT_LE(phase_variation(ph, static_cast<double>(la), static_cast<double>(lb)), 1e4);
        const auto d = radial_direct(ph, la, lb, 1e-12);
        const auto i = radial_ibp(ph, la, lb, 2, 1e-12);
        EXPECT_LE(std::abs(d.value - i.value), d.abs_error + i.abs_error + 1e-15) << "case " << c;
        if (d.abs_error < 1e-10 && i.abs_error < 1e-10) {
            ++tight;
            EXPECT_LE(std::abs(d.value - i.value), 1e-8 * std::abs(d.value)) << "case " << c;
        }
    }
    EXPECT_GT(tight, 25);
}

TEST(RadialIbp, IdentityAgainstDirect)
{
    const auto sym = DispersionSymbol::homogeneous(2.0, 1);
    const auto ph = schedule_phase(sym, 1.0, 0.3, plus1);
    const auto d = radial_direct(ph, 1.0L, 3.0L, 1e-14);
    const auto i = radial_ibp(ph, 1.0L, 3.0L, 1, 1e-14);
    EXPECT_LE(std::abs(d.value - i.value), 1e-8 * std::abs(d.value));
}

TEST(RadialIbp, BoundaryMagnitude)
{
    const auto sym = DispersionSymbol::homogeneous(2.0, 1);
    const auto ph = schedule_phase(sym, 0.2, 0.01, plus1);
    const LogReal la = 2.0L, lb = 5.0L;
    const auto split = ibp_boundary(ph, la, lb, 1);
    const double a = std::exp(2.0), b = std::exp(5.0);
    const double expect = 1.0 / (a * std::pow(2.0, 0.75) * std::abs(ph.d1(a)))
                          + 1.0 / (b * std::pow(5.0, 0.75) * std::abs(ph.d1(b)));
    EXPECT_LE(split.boundary_magnitude, expect * (1 + 1e-12));
    EXPECT_LE(std::abs(split.boundary), expect * (1 + 1e-12));
}

TEST(RadialIbp, FrequencyRobustCost)
{
    const auto sym = DispersionSymbol::homogeneous(2.0, 1);
    const auto lo = radial_ibp(schedule_phase(sym, 1.0, 5.0, plus1), 2.0L, 8.0L, 2, 1e-6);
    const auto hi = radial_ibp(schedule_phase(sym, 1.0, 500.0, plus1), 2.0L, 8.0L, 2, 1e-6);
    EXPECT_LE(hi.abs_error, lo.abs_error);
    const double ratio = static_cast<double>(std::max(lo.node_count, hi.node_count))
                         / static_cast<double>(std::min(lo.node_count, hi.node_count));
    EXPECT_LE(ratio, 2.0);
}

TEST(RadialIbp, StationaryPhaseDetected)
{
    const auto sym = DispersionSymbol::homogeneous(2.0, 1);
    // F' = -20 + 2r vanishes at r = 10
    EXPECT_THROW(radial_ibp(schedule_phase(sym, -20.0, 1.0, plus1), 1.0L, 4.0L, 2, 1e-8),
                 StationaryPhaseError);
}

TEST(Enclosure, AbsoluteBelowDiagonal)
{
    const auto sym = DispersionSymbol::homogeneous(2.0, 1);
    auto s = tiny_schedule(1.0L, 16.0L);
    s.log_R = {1.0L, 20.0L};
    s.log_Rp = {16.0L, 320.0L};
    const auto e = term_enclosure(sym, s, 1, 2);
    EXPECT_EQ(e.chain, Chain::absolute_integrand);
    EXPECT_NEAR(e.bound(), 4.0 / std::numbers::pi, 1e-15);
    EXPECT_THROW(term_enclosure(sym, s, 2, 2), DomainError);
}

TEST(Enclosure, AcceptanceScheduleTailDecay)
{
    const auto sym = DispersionSymbol::homogeneous(2.0, 1);
    const auto s = build_annulus_schedule(sym, build_spatial_schedule(ApproachProfile::identity(), 1, 6), 81);
    const std::size_t k = 2;
    std::vector<LogReal> logs;
    for (std::size_t j = k + 1; j <= k + 6; ++j) {
        const auto e = term_enclosure(sym, s, j, k);
        EXPECT_EQ(e.chain, Chain::phase_gap_half);
        // |F'| >= (t_k - t_j) |phi'| / 2
        EXPECT_NEAR(static_cast<double>(e.log_phase_gap), std::log((s.time(k) - s.time(j)) / 2.0), 1e-12);
        const LogReal recomposed = std::log(static_cast<LogReal>(polar_constant(1)))
                                   + log_add(e.log_boundary, e.log_interior);
        EXPECT_LE(std::abs(e.log_bound - recomposed), 1e-15L * std::abs(recomposed));
        logs.push_back(e.log_bound);
    }
    for (std::size_t i = 1; i < logs.size(); ++i)
        EXPECT_LE(logs[i] - logs[i - 1], -std::log(2.0L));
}

TEST(Enclosure, SoundAgainstComputedTerms)
{
    const auto sym = DispersionSymbol::homogeneous(2.0, 1);
    const auto s = build_annulus_schedule(sym, build_spatial_schedule(ApproachProfile::identity(), 1, 1), 2);
    ASSERT_EQ(s.size(), 3u);
    int checked = 0;
    for (std::size_t j = 2; j <= 3; ++j) {
        if (s.log_only(j))
            continue;
        for (std::size_t k = 1; k < j; ++k) {
            const auto t = compute_term(sym, s, j, target_of(s, k), 1e-10);
            const auto e = term_enclosure(sym, s, j, k);
            EXPECT_LE(std::abs(t.value), e.bound() + t.abs_error) << j << "," << k;
            ++checked;
        }
    }
    EXPECT_GT(checked, 0);
}

TEST(Diagonal, ClosedFormExamples)
{
    auto s = tiny_schedule(1.0L, 16.0L);
    EXPECT_NEAR(diagonal_term_exact(s, 1), 4.0 / std::numbers::pi, 1e-15);
    s.n = 2;
    s.points = {{0.0, 0.0}, {0.5, 0.0}};
    EXPECT_NEAR(diagonal_term_exact(s, 1), 2.0 / std::numbers::pi, 1e-15);
}

TEST(Diagonal, ScalingConstant)
{
    const auto sym = DispersionSymbol::homogeneous(2.0, 1);
    const auto s = build_annulus_schedule(sym, build_spatial_schedule(ApproachProfile::identity(), 1, 2), 16);
    const double c = 4.0 / std::numbers::pi * (1.0 - std::pow(16.0, -0.25));
    for (std::size_t k = 1; k <= s.size(); ++k)
        EXPECT_NEAR(diagonal_term_exact(s, k) / log_power(s.log_Rp[k - 1], 0.25), c, 1e-12);
}

TEST(ComputeTerm, DiagonalMatchesClosedForm)
{
    const auto sym = DispersionSymbol::homogeneous(2.0, 1);
    const auto s = tiny_schedule(1.0L, 16.0L);
    const auto t = compute_term(sym, s, 1, target_of(s, 1), 1e-10);
    EXPECT_EQ(t.method, Method::closed_form);
    EXPECT_NEAR(t.value.real(), diagonal_term_exact(s, 1), 1e-10 * diagonal_term_exact(s, 1));
}

TEST(ComputeTerm, DirectAndIbpAgreeOnTwoDimensions)
{
    const auto sym = DispersionSymbol::homogeneous(2.0, 2);
    Schedule s;
    s.n = 2;
    s.points = {{0.0, 0.0}};
    s.times = {0.2};
    s.terms = {0};
    s.N = 2;
    s.log_R = {1.0L};
    s.log_Rp = {2.0L};
    const Target tg{{0.1, 0.05}, 0.25};
    const auto t = compute_term(sym, s, 1, tg, 1e-8);
    EXPECT_EQ(t.method, Method::direct);
    // same quantity with a 1-d angular parametrisation and the direct radial rule
    auto f = [&](std::span<const double> w) {
        const double dxw = 0.1 * w[0] + 0.05 * w[1];
        return radial_direct(schedule_phase(sym, dxw, 0.05, {w[0], w[1]}), 1.0L, 2.0L, 1e-12).value;
    };
    const auto ref = quad::integrate_sphere(2, f, 1e-11);
    EXPECT_LT(std::abs(t.value - polar_constant(2) * ref.value), t.abs_error + 1e-10);
}

TEST(ComputeTerm, LogOnlyIsRegimeError)
{
    const auto sym = DispersionSymbol::homogeneous(2.0, 1);
    const auto s = tiny_schedule(1.0L, 800.0L);
    EXPECT_THROW(compute_term(sym, s, 1, target_of(s, 2), 1e-8), RegimeError);
    // the diagonal needs only the logs
    const auto d = compute_term(sym, s, 1, target_of(s, 1), 1e-8);
    EXPECT_EQ(d.method, Method::closed_form);
    EXPECT_NEAR(d.value.real(), diagonal_term_exact(s, 1), 1e-12 * d.value.real());
}
