#ifndef DIVCERT_CONDITIONS_HPP
#define DIVCERT_CONDITIONS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "divcert/symbol.hpp"

namespace divcert {

enum class Verdict { theorem1, theorem2_strong, theorem2_weak };

inline const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::theorem1: return "theorem1";
    case Verdict::theorem2_strong: return "theorem2-strong";
    case Verdict::theorem2_weak: return "theorem2-weak";
    }
    return "?";
}

struct ConditionGrid {
    double r_min = 0.0;
    double r_max = 0.0;
    int radial_points = 0;
    std::size_t angular_points = 0;
    std::vector<double> radii; // geometric
};

// Finite-grid evidence for the growth hypotheses. Nothing here is a proof:
// "liminf = infinity" is replaced by a doubling test plus a threshold and the
// suprema are observed maxima over the recorded grid.
struct ConditionReport {
    bool grows_unboundedly = false;
    double bottom_decade_min = 0.0; // min |phi'| over nodes r <= 10 r_min
    double top_decade_min = 0.0;    // min |phi'| over nodes r >= r_max / 10
    double ratio_bound_C = 0.0;     // max r|phi''| / (|phi'|^2 (log r)^{3/4})
    double lower_bound_h = 0.0;     // min |phi'|
    std::optional<double> beta;
    std::optional<double> weak_ratio_bound; // max r^beta |phi''| / (log r)^{3/4}
    std::optional<double> leading_profile_inf;
    ConditionGrid grid;
    std::vector<Verdict> verdicts;

    bool has(Verdict v) const
    {
        return std::find(verdicts.begin(), verdicts.end(), v) != verdicts.end();
    }
};

inline constexpr double default_growth_threshold = 10.0;
// Sampled |profile| at or below this counts as vanishing.
inline constexpr double profile_floor = 1e-12;

inline ConditionReport verify_growth_conditions(const DispersionSymbol& sym, double r_max,
                                                int grid_points,
                                                std::optional<double> beta = std::nullopt,
                                                double threshold = default_growth_threshold)
{
    const double R = sym.validity_radius();
    if (!(r_max > R))
        throw DomainError("verify_growth_conditions: r_max must exceed the validity radius");
    if (grid_points < 16)
        throw InputError("verify_growth_conditions: need at least 16 grid points");
    if (beta && !(*beta > 0.0))
        throw InputError("verify_growth_conditions: beta must be positive");

    ConditionReport rep;
    rep.beta = beta;
    auto& g = rep.grid;
    g.r_min = R + 1.0;
    g.r_max = std::max(r_max, g.r_min * (1.0 + 1e-9));
    g.radial_points = grid_points;
    const auto omegas = sym.angular_grid();
    g.angular_points = omegas.size();

    const LogReal lo = std::log(static_cast<LogReal>(g.r_min));
    const LogReal hi = std::log(static_cast<LogReal>(g.r_max));
    LogReal log_min_d1 = std::numeric_limits<LogReal>::infinity();
    LogReal log_max_ratio = log_neg_inf;
    LogReal log_max_weak = log_neg_inf;
    LogReal bottom = std::numeric_limits<LogReal>::infinity();
    LogReal top = std::numeric_limits<LogReal>::infinity();
    const LogReal log_ten = std::log(10.0L);

    for (int i = 0; i < grid_points; ++i) {
        const LogRadius r{lo + (hi - lo) * i / (grid_points - 1)};
        g.radii.push_back(r.r());
        LogReal node_min = std::numeric_limits<LogReal>::infinity();
        for (const auto& w : omegas) {
            LogReal d1, ratio, weak = log_neg_inf;
            try {
                d1 = sym.log_abs_dphi(r, w);
                ratio = sym.log_curvature_ratio(r, w);
                if (beta)
                    weak = sym.log_weak_ratio(r, w, *beta);
            } catch (const Error& e) {
                std::string where = "r=" + std::to_string(r.r()) + " w=(";
                for (double c : w)
                    where += std::to_string(c) + ",";
                where.back() = ')';
                throw Error("verify_growth_conditions: evaluation failed at " + where + ": "
                            + e.what());
            }
            if (std::isnan(d1) || std::isnan(ratio) || std::isnan(weak))
                throw Error("verify_growth_conditions: NaN at r=" + std::to_string(r.r()));
            node_min = std::min(node_min, d1);
            log_max_ratio = std::max(log_max_ratio, ratio);
            log_max_weak = std::max(log_max_weak, weak);
        }
        log_min_d1 = std::min(log_min_d1, node_min);
        if (r.log_r <= lo + log_ten)
            bottom = std::min(bottom, node_min);
        if (r.log_r >= hi - log_ten)
            top = std::min(top, node_min);
    }

    rep.bottom_decade_min = static_cast<double>(std::exp(bottom));
    rep.top_decade_min = static_cast<double>(std::exp(top));
    rep.grows_unboundedly = top > bottom + std::log(2.0L)
                            && top > std::log(static_cast<LogReal>(threshold));
    rep.ratio_bound_C = static_cast<double>(std::exp(log_max_ratio));
    rep.lower_bound_h = static_cast<double>(std::exp(log_min_d1));
    if (beta)
        rep.weak_ratio_bound = static_cast<double>(std::exp(log_max_weak));
    rep.leading_profile_inf = sym.leading_profile_inf();

    const bool profile_ok = !rep.leading_profile_inf || *rep.leading_profile_inf > profile_floor;
    const bool c_finite = std::isfinite(rep.ratio_bound_C);
    if (profile_ok && rep.grows_unboundedly && c_finite)
        rep.verdicts.push_back(Verdict::theorem1);
    if (profile_ok && rep.lower_bound_h > 0.0 && c_finite)
        rep.verdicts.push_back(Verdict::theorem2_strong);
    if (profile_ok && rep.lower_bound_h > 0.0 && rep.weak_ratio_bound
        && std::isfinite(*rep.weak_ratio_bound))
        rep.verdicts.push_back(Verdict::theorem2_weak);
    return rep;
}

} // namespace divcert

#endif
