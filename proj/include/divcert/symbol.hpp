#ifndef DIVCERT_SYMBOL_HPP
#define DIVCERT_SYMBOL_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "divcert/errors.hpp"
#include "divcert/logmath.hpp"

namespace divcert {

using Direction = std::span<const double>;
using AngularProfile = std::function<double(Direction)>;
using RadialFunction = std::function<double(double, Direction)>;

// A radius given through its logarithm; log r may exceed the binary64 range.
struct LogRadius {
    LogReal log_r;

    static LogRadius from_r(double r) { return {std::log(static_cast<LogReal>(r))}; }
    LogReal loglog() const { return std::log(log_r); }
    bool representable() const { return log_r < 700.0L; }
    double r() const { return static_cast<double>(std::exp(log_r)); }
};

// phi(r, w) = r^a
struct Homogeneous {
    double a;
};

struct HomogeneousTerm {
    double a;
    AngularProfile profile;
    // Declared bounds of |profile| on the sphere.
    double inf_abs;
    double sup_abs;
    bool isotropic;
};

// phi = sum_i r^{a_i} profile_i(w), terms sorted by ascending a_i.
struct HomogeneousSum {
    std::vector<HomogeneousTerm> terms;
};

// phi(r, w) = r log r
struct RLogR {};

// phi(r, w) = exp(mu(w) r^beta)
struct Exponential {
    AngularProfile mu;
    double mu_inf;
    double beta;
    bool isotropic;
};

// Code-level symbols. d3phi may be empty, which caps integration-by-parts
// depth at one.
struct UserDefined {
    RadialFunction phi;
    RadialFunction dphi;
    RadialFunction d2phi;
    RadialFunction d3phi;
    bool radially_monotone = false;
    bool isotropic = false;
    std::string name = "user-defined";
};

class DispersionSymbol {
public:
    using Kind = std::variant<Homogeneous, HomogeneousSum, RLogR, Exponential, UserDefined>;

    static constexpr double default_validity_radius = 2.0;

    DispersionSymbol(Kind kind, int dimension, double validity_radius = default_validity_radius)
        : kind_(std::move(kind)), n_(dimension), R_(validity_radius)
    {
        if (n_ < 1)
            throw InputError("DispersionSymbol: dimension must be >= 1");
        if (!(R_ > 0.0) || !std::isfinite(R_))
            throw InputError("DispersionSymbol: validity radius must be positive and finite");
        std::visit([](auto& k) { validate(k); }, kind_);
        if (auto* s = std::get_if<HomogeneousSum>(&kind_))
            std::sort(s->terms.begin(), s->terms.end(),
                      [](const auto& x, const auto& y) { return x.a < y.a; });
    }

    static DispersionSymbol homogeneous(double a, int n, double R = default_validity_radius)
    {
        return {Homogeneous{a}, n, R};
    }
    static DispersionSymbol r_log_r(int n, double R = default_validity_radius)
    {
        return {RLogR{}, n, R};
    }
    static DispersionSymbol exponential(double mu, double beta, int n,
                                        double R = default_validity_radius)
    {
        return {Exponential{[mu](Direction) { return mu; }, mu, beta, true}, n, R};
    }

    int dimension() const { return n_; }
    double validity_radius() const { return R_; }
    const Kind& kind() const { return kind_; }

    std::string name() const
    {
        std::ostringstream os;
        std::visit(
            [&](const auto& k) {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, Homogeneous>)
                    os << "|xi|^" << k.a;
                else if constexpr (std::is_same_v<K, HomogeneousSum>) {
                    os << "sum(";
                    for (std::size_t i = 0; i < k.terms.size(); ++i)
                        os << (i ? "," : "") << "|xi|^" << k.terms[i].a;
                    os << ")";
                } else if constexpr (std::is_same_v<K, RLogR>)
                    os << "|xi|log|xi|";
                else if constexpr (std::is_same_v<K, Exponential>)
                    os << "exp(mu|xi|^" << k.beta << ")";
                else
                    os << k.name;
            },
            kind_);
        return os.str();
    }

    // True when phi does not depend on the direction, so one angular node
    // suffices for inf/sup over the sphere.
    bool isotropic() const
    {
        return std::visit(
            [](const auto& k) {
                using K = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<K, Homogeneous> || std::is_same_v<K, RLogR>)
                    return true;
                else if constexpr (std::is_same_v<K, HomogeneousSum>)
                    return std::all_of(k.terms.begin(), k.terms.end(),
                                       [](const auto& t) { return t.isotropic; });
                else
                    return k.isotropic;
            },
            kind_);
    }

    // |phi'| monotone in r beyond R, so its infimum over [a, b] sits at an
    // endpoint.
    bool radially_monotone() const
    {
        if (std::holds_alternative<Homogeneous>(kind_) || std::holds_alternative<RLogR>(kind_))
            return true;
        if (const auto* u = std::get_if<UserDefined>(&kind_))
            return u->radially_monotone;
        return false;
    }

    bool has_third_derivative() const
    {
        if (const auto* u = std::get_if<UserDefined>(&kind_))
            return static_cast<bool>(u->d3phi);
        return true;
    }

    double phi(double r, Direction w) const
    {
        check(r, w);
        return eval<0>(r, w);
    }
    double dphi(double r, Direction w) const
    {
        check(r, w);
        return eval<1>(r, w);
    }
    double d2phi(double r, Direction w) const
    {
        check(r, w);
        return eval<2>(r, w);
    }
    double d3phi(double r, Direction w) const
    {
        check(r, w);
        if (!has_third_derivative())
            throw InputError("d3phi: symbol '" + name() + "' has no third derivative");
        return eval<3>(r, w);
    }

    // log |phi'(r, w)|, valid for radii far beyond the binary64 range.
    LogReal log_abs_dphi(LogRadius r, Direction w) const
    {
        check_log(r, w);
        return std::visit([&](const auto& k) { return log_d1(k, r, w); }, kind_);
    }

    LogReal log_abs_d2phi(LogRadius r, Direction w) const
    {
        check_log(r, w);
        return std::visit([&](const auto& k) { return log_d2(k, r, w); }, kind_);
    }

    // log of r |phi''| / (|phi'|^2 (log r)^{3/4}).
    LogReal log_curvature_ratio(LogRadius r, Direction w) const
    {
        check_log(r, w);
        return std::visit([&](const auto& k) { return log_ratio(k, r, w); }, kind_);
    }

    // log of r^beta |phi''| / (log r)^{3/4}.
    LogReal log_weak_ratio(LogRadius r, Direction w, double beta) const
    {
        check_log(r, w);
        return beta * r.log_r + log_d2(kind_, r, w) - 0.75L * r.loglog();
    }

    // Nodes used for inf/sup over the sphere: {+1,-1}; 64 angles on S^1;
    // 32 x 64 (Gauss-Legendre polar x uniform azimuth) on S^2.
    std::vector<std::vector<double>> angular_grid() const
    {
        std::vector<std::vector<double>> nodes;
        if (n_ == 1) {
            nodes = {{1.0}, {-1.0}};
        } else if (n_ == 2) {
            for (int i = 0; i < 64; ++i) {
                const double th = 2.0 * std::numbers::pi * i / 64.0;
                nodes.push_back({std::cos(th), std::sin(th)});
            }
        } else if (n_ == 3) {
            for (int i = 0; i < 32; ++i) {
                const double z = std::cos(std::numbers::pi * (i + 0.5) / 32.0);
                const double s = std::sqrt(1.0 - z * z);
                for (int k = 0; k < 64; ++k) {
                    const double ph = 2.0 * std::numbers::pi * k / 64.0;
                    nodes.push_back({s * std::cos(ph), s * std::sin(ph), z});
                }
            }
        } else {
            throw InputError("angular_grid: only dimensions 1, 2, 3 are supported");
        }
        if (isotropic())
            nodes.resize(1);
        return nodes;
    }

    // inf over the sphere of log |phi'(r, .)|.
    LogReal log_inf_abs_dphi(LogRadius r) const
    {
        LogReal best = std::numeric_limits<LogReal>::infinity();
        for (const auto& w : angular_grid())
            best = std::min(best, log_abs_dphi(r, w));
        return best;
    }

    LogReal log_sup_curvature_ratio(LogRadius r) const
    {
        LogReal best = log_neg_inf;
        for (const auto& w : angular_grid())
            best = std::max(best, log_curvature_ratio(r, w));
        return best;
    }

    LogReal log_sup_weak_ratio(LogRadius r, double beta) const
    {
        LogReal best = log_neg_inf;
        for (const auto& w : angular_grid())
            best = std::max(best, log_weak_ratio(r, w, beta));
        return best;
    }

    // Smallest declared |profile| of the leading homogeneous term (sums only).
    std::optional<double> leading_profile_inf() const
    {
        if (const auto* s = std::get_if<HomogeneousSum>(&kind_)) {
            const auto& top = s->terms.back();
            double m = std::numeric_limits<double>::infinity();
            for (const auto& w : angular_grid_all())
                m = std::min(m, std::abs(top.profile(w)));
            return m;
        }
        return std::nullopt;
    }

private:
    Kind kind_;
    int n_;
    double R_;

    static void validate(const Homogeneous& k)
    {
        if (!(k.a > 0.0))
            throw InputError("homogeneous symbol: exponent a must be > 0");
    }
    static void validate(const HomogeneousSum& k)
    {
        if (k.terms.empty())
            throw InputError("homogeneous sum: at least one term required");
        for (const auto& t : k.terms)
            if (!(t.a > 0.0) || !t.profile)
                throw InputError("homogeneous sum: every term needs a > 0 and a profile");
    }
    static void validate(const RLogR&) {}
    static void validate(const Exponential& k)
    {
        if (!(k.beta > 0.0) || !(k.mu_inf > 0.0) || !k.mu)
            throw InputError("exponential symbol: need beta > 0 and inf mu > 0");
    }
    static void validate(const UserDefined& k)
    {
        if (!k.phi || !k.dphi || !k.d2phi)
            throw InputError("user-defined symbol: phi, dphi and d2phi are required");
    }

    std::vector<std::vector<double>> angular_grid_all() const
    {
        // Like angular_grid() but never collapsed; profiles may be anisotropic.
        if (n_ == 1)
            return {{1.0}, {-1.0}};
        std::vector<std::vector<double>> nodes;
        if (n_ == 2) {
            for (int i = 0; i < 64; ++i) {
                const double th = 2.0 * std::numbers::pi * i / 64.0;
                nodes.push_back({std::cos(th), std::sin(th)});
            }
            return nodes;
        }
        for (int i = 0; i < 32; ++i) {
            const double z = std::cos(std::numbers::pi * (i + 0.5) / 32.0);
            const double s = std::sqrt(1.0 - z * z);
            for (int k = 0; k < 64; ++k) {
                const double ph = 2.0 * std::numbers::pi * k / 64.0;
                nodes.push_back({s * std::cos(ph), s * std::sin(ph), z});
            }
        }
        return nodes;
    }

    void check_direction(Direction w) const
    {
        if (static_cast<int>(w.size()) != n_)
            throw InputError("direction has dimension " + std::to_string(w.size())
                             + ", symbol expects " + std::to_string(n_));
        double s = 0.0;
        for (double c : w)
            s += c * c;
        if (std::abs(std::sqrt(s) - 1.0) > 1e-12)
            throw InputError("direction is not a unit vector");
    }

    void check(double r, Direction w) const
    {
        if (!(r > R_))
            throw DomainError("symbol evaluated at r = " + std::to_string(r)
                              + " <= validity radius " + std::to_string(R_));
        check_direction(w);
    }

    void check_log(LogRadius r, Direction w) const
    {
        if (!(r.log_r > std::log(static_cast<LogReal>(R_))))
            throw DomainError("symbol evaluated at or inside the validity radius");
        check_direction(w);
    }

    template <int D>
    double eval(double r, Direction w) const
    {
        return std::visit([&](const auto& k) { return eval_kind<D>(k, r, w); }, kind_);
    }

    template <int D>
    static double eval_kind(const Homogeneous& k, double r, Direction)
    {
        const double a = k.a;
        if constexpr (D == 0)
            return std::pow(r, a);
        else if constexpr (D == 1)
            return a * std::pow(r, a - 1.0);
        else if constexpr (D == 2)
            return a * (a - 1.0) * std::pow(r, a - 2.0);
        else
            return a * (a - 1.0) * (a - 2.0) * std::pow(r, a - 3.0);
    }

    template <int D>
    static double eval_kind(const HomogeneousSum& k, double r, Direction w)
    {
        double s = 0.0;
        for (const auto& t : k.terms)
            s += t.profile(w) * eval_kind<D>(Homogeneous{t.a}, r, w);
        return s;
    }

    template <int D>
    static double eval_kind(const RLogR&, double r, Direction)
    {
        if constexpr (D == 0)
            return r * std::log(r);
        else if constexpr (D == 1)
            return std::log(r) + 1.0;
        else if constexpr (D == 2)
            return 1.0 / r;
        else
            return -1.0 / (r * r);
    }

    template <int D>
    static double eval_kind(const Exponential& k, double r, Direction w)
    {
        const double mu = k.mu(w);
        const double b = k.beta;
        const double rb = std::pow(r, b);
        const double e = std::exp(mu * rb);
        if constexpr (D == 0)
            return e;
        else if constexpr (D == 1)
            return mu * b * std::pow(r, b - 1.0) * e;
        else if constexpr (D == 2)
            return mu * b * std::pow(r, b - 2.0) * e * ((b - 1.0) + mu * b * rb);
        else
            return e
                   * (mu * b * (b - 1.0) * ((b - 2.0) * std::pow(r, b - 3.0)
                                             + mu * b * std::pow(r, 2.0 * b - 3.0))
                      + mu * mu * b * b
                            * ((2.0 * b - 2.0) * std::pow(r, 2.0 * b - 3.0)
                               + mu * b * std::pow(r, 3.0 * b - 3.0)));
    }

    template <int D>
    static double eval_kind(const UserDefined& k, double r, Direction w)
    {
        if constexpr (D == 0)
            return k.phi(r, w);
        else if constexpr (D == 1)
            return k.dphi(r, w);
        else if constexpr (D == 2)
            return k.d2phi(r, w);
        else
            return k.d3phi(r, w);
    }

    static LogReal safe_log_abs(LogReal v)
    {
        return v == 0 ? log_neg_inf : std::log(std::abs(v));
    }

    // Sum over terms of coeff_i * profile_i * r^{a_i - a_top}, with the
    // leading power factored out.
    template <class Coeff>
    static LogReal scaled_sum(const HomogeneousSum& k, LogRadius r, Direction w, Coeff coeff)
    {
        const double top = k.terms.back().a;
        LogReal s = 0;
        for (const auto& t : k.terms)
            s += coeff(t.a) * t.profile(w) * std::exp((t.a - top) * r.log_r);
        return s;
    }

    static LogReal log_d1(const Homogeneous& k, LogRadius r, Direction)
    {
        return std::log(static_cast<LogReal>(k.a)) + (k.a - 1.0) * r.log_r;
    }
    static LogReal log_d1(const HomogeneousSum& k, LogRadius r, Direction w)
    {
        const double top = k.terms.back().a;
        return (top - 1.0) * r.log_r
               + safe_log_abs(scaled_sum(k, r, w, [](double a) { return a; }));
    }
    static LogReal log_d1(const RLogR&, LogRadius r, Direction)
    {
        return std::log(r.log_r + 1.0L);
    }
    static LogReal log_d1(const Exponential& k, LogRadius r, Direction w)
    {
        const LogReal mu = k.mu(w);
        const LogReal e = mu * std::exp(k.beta * r.log_r);
        return std::log(mu * k.beta) + (k.beta - 1.0) * r.log_r + e;
    }
    static LogReal log_d1(const UserDefined& k, LogRadius r, Direction w)
    {
        return safe_log_abs(k.dphi(user_radius(r), w));
    }

    static LogReal log_d2(const Kind& kind, LogRadius r, Direction w)
    {
        return std::visit([&](const auto& k) { return log_d2(k, r, w); }, kind);
    }
    static LogReal log_d2(const Homogeneous& k, LogRadius r, Direction)
    {
        const LogReal c = static_cast<LogReal>(k.a) * (k.a - 1.0);
        if (c == 0)
            return log_neg_inf;
        return std::log(std::abs(c)) + (k.a - 2.0) * r.log_r;
    }
    static LogReal log_d2(const HomogeneousSum& k, LogRadius r, Direction w)
    {
        const double top = k.terms.back().a;
        return (top - 2.0) * r.log_r
               + safe_log_abs(scaled_sum(k, r, w, [](double a) { return a * (a - 1.0); }));
    }
    static LogReal log_d2(const RLogR&, LogRadius r, Direction)
    {
        return -r.log_r;
    }
    // log of the factor (beta-1) + mu beta r^beta in phi''.
    static LogReal log_exp_factor(const Exponential& k, LogRadius r, LogReal mu)
    {
        const LogReal p = mu * k.beta * std::exp(k.beta * r.log_r);
        if (std::isfinite(p))
            return safe_log_abs((k.beta - 1.0) + p);
        return std::log(mu * k.beta) + k.beta * r.log_r;
    }
    static LogReal log_d2(const Exponential& k, LogRadius r, Direction w)
    {
        const LogReal mu = k.mu(w);
        const LogReal e = mu * std::exp(k.beta * r.log_r);
        return std::log(mu * k.beta) + (k.beta - 2.0) * r.log_r + e
               + log_exp_factor(k, r, mu);
    }
    static LogReal log_d2(const UserDefined& k, LogRadius r, Direction w)
    {
        return safe_log_abs(k.d2phi(user_radius(r), w));
    }

    // The ratio is assembled from exponents analytically so that huge radii
    // never produce inf - inf.
    static LogReal log_ratio(const Homogeneous& k, LogRadius r, Direction)
    {
        const LogReal c = static_cast<LogReal>(k.a) * (k.a - 1.0);
        if (c == 0)
            return log_neg_inf;
        return std::log(std::abs(c)) - 2.0L * std::log(static_cast<LogReal>(k.a))
               + (1.0 - k.a) * r.log_r - 0.75L * r.loglog();
    }
    static LogReal log_ratio(const HomogeneousSum& k, LogRadius r, Direction w)
    {
        const double top = k.terms.back().a;
        const LogReal s2 = safe_log_abs(scaled_sum(k, r, w, [](double a) { return a * (a - 1.0); }));
        const LogReal s1 = safe_log_abs(scaled_sum(k, r, w, [](double a) { return a; }));
        if (s2 == log_neg_inf)
            return log_neg_inf;
        return (1.0 - top) * r.log_r + s2 - 2.0L * s1 - 0.75L * r.loglog();
    }
    static LogReal log_ratio(const RLogR&, LogRadius r, Direction)
    {
        return -2.0L * std::log(r.log_r + 1.0L) - 0.75L * r.loglog();
    }
    static LogReal log_ratio(const Exponential& k, LogRadius r, Direction w)
    {
        const LogReal mu = k.mu(w);
        const LogReal e = mu * std::exp(k.beta * r.log_r);
        if (!std::isfinite(e))
            return log_neg_inf;
        return (1.0 - k.beta) * r.log_r + log_exp_factor(k, r, mu) - std::log(mu * k.beta) - e
               - 0.75L * r.loglog();
    }
    static LogReal log_ratio(const UserDefined& k, LogRadius r, Direction w)
    {
        const double x = user_radius(r);
        const LogReal d1 = safe_log_abs(k.dphi(x, w));
        const LogReal d2 = safe_log_abs(k.d2phi(x, w));
        if (d2 == log_neg_inf)
            return log_neg_inf;
        return r.log_r + d2 - 2.0L * d1 - 0.75L * r.loglog();
    }

    static double user_radius(LogRadius r)
    {
        if (!r.representable())
            throw RegimeError("user-defined symbol cannot be evaluated beyond binary64 radii");
        return r.r();
    }
};

} // namespace divcert

#endif
