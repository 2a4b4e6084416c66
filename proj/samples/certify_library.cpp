// Library usage: build the phi = |xi|^2 schedule and print a few certificates.

#include <cstdio>

#include "divcert/evaluator.hpp"

int main()
{
    using namespace divcert;
    const auto sym = DispersionSymbol::homogeneous(2.0, 1);
    const auto sched = build_annulus_schedule(sym, build_spatial_schedule(ApproachProfile::identity(), 1, 6), 81.0);
    std::printf("%zu terms, target ratio %.6f\n", sched.size(), analytic_growth_target(1, 81.0));
    for (std::size_t k : {1, 2, 3, 10, 100}) {
        const auto c = blowup_certificate(sym, sched, k);
        std::printf("k=%3zu  L_k=%-12.6g ratio=%.6f  tail=%g\n", k, c.lower_bound, c.growth_ratio, c.tail_bound);
    }
}
