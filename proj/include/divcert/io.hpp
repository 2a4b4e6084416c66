#ifndef DIVCERT_IO_HPP
#define DIVCERT_IO_HPP

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "divcert/evaluator.hpp"
#include "divcert/sobolev.hpp"

namespace divcert {

using json = nlohmann::json;

// Reals ------------------------------------------------------------------

template <class T>
json real_string(T v)
{
    if (!std::isfinite(v))
        return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
    return shortest(v);
}

template <class T>
T real_from(const json& j, const char* what)
{
    if (!j.is_string())
        throw InputError(std::string("schedule json: ") + what + " must be a decimal string");
    const auto s = j.get<std::string>();
    if (s == "inf")
        return std::numeric_limits<T>::infinity();
    if (s == "-inf")
        return -std::numeric_limits<T>::infinity();
    return parse_number<T>(s, what);
}

template <class T>
json real_array(const std::vector<T>& v)
{
    json a = json::array();
    for (T x : v)
        a.push_back(real_string(x));
    return a;
}

template <class T>
std::vector<T> real_array_from(const json& j, const char* what)
{
    if (!j.is_array())
        throw InputError(std::string("schedule json: ") + what + " must be an array");
    std::vector<T> out;
    for (const auto& x : j)
        out.push_back(real_from<T>(x, what));
    return out;
}

// Schedule ---------------------------------------------------------------

inline Variant variant_from(const std::string& s)
{
    for (auto v : {Variant::theorem1, Variant::theorem2_strong, Variant::theorem2_weak})
        if (s == to_string(v))
            return v;
    throw InputError("unknown variant '" + s + "'");
}

inline ApproachProfile::Kind profile_kind_from(const std::string& s)
{
    if (s == "identity")
        return ApproachProfile::Kind::identity;
    if (s == "power")
        return ApproachProfile::Kind::power;
    if (s == "scaled")
        return ApproachProfile::Kind::scaled;
    throw InputError("unknown approach profile '" + s + "'");
}

inline json schedule_to_json(const Schedule& s)
{
    json j;
    j["n"] = s.n;
    j["K"] = s.K;
    j["gamma"] = {{"kind", s.gamma.name()}, {"param", real_string(s.gamma.param)}};
    j["delta"] = real_array(s.delta);
    json pts = json::array();
    for (const auto& p : s.points)
        pts.push_back(real_array(p));
    j["points"] = pts;
    j["times"] = real_array(s.times);
    j["block_bounds"] = s.block_bounds;
    j["times_policy"] = s.times_policy;
    j["variant"] = to_string(s.variant);
    j["N"] = real_string(s.N);
    j["validity_radius"] = real_string(s.validity_radius);
    j["terms"] = s.terms;
    j["log_R"] = real_array(s.log_R);
    j["log_Rp"] = real_array(s.log_Rp);
    j["center"] = real_array(s.center);
    j["h"] = real_string(s.h);
    j["beta"] = real_string(s.beta);
    return j;
}

inline Schedule schedule_from_json(const json& j)
{
    try {
        Schedule s;
        s.n = j.at("n").get<int>();
        s.K = j.at("K").get<int>();
        s.gamma.kind = profile_kind_from(j.at("gamma").at("kind").get<std::string>());
        s.gamma.param = real_from<double>(j.at("gamma").at("param"), "gamma.param");
        s.delta = real_array_from<double>(j.at("delta"), "delta");
        for (const auto& p : j.at("points"))
            s.points.push_back(real_array_from<double>(p, "points"));
        s.times = real_array_from<double>(j.at("times"), "times");
        s.block_bounds = j.at("block_bounds").get<std::vector<std::size_t>>();
        s.times_policy = j.at("times_policy").get<std::string>();
        s.variant = variant_from(j.at("variant").get<std::string>());
        s.N = real_from<double>(j.at("N"), "N");
        s.validity_radius = real_from<double>(j.at("validity_radius"), "validity_radius");
        s.terms = j.at("terms").get<std::vector<std::size_t>>();
        s.log_R = real_array_from<LogReal>(j.at("log_R"), "log_R");
        s.log_Rp = real_array_from<LogReal>(j.at("log_Rp"), "log_Rp");
        s.center = real_array_from<double>(j.at("center"), "center");
        s.h = real_from<double>(j.at("h"), "h");
        s.beta = real_from<double>(j.at("beta"), "beta");
        return s;
    } catch (const json::exception& e) {
        throw InputError(std::string("schedule json: ") + e.what());
    }
}

// Experiment config ---------------------------------------------------------

struct SymbolSpec {
    std::string kind = "homogeneous";
    double a = 2.0;
    double mu = 1.0;
    double beta = 1.0;
    std::vector<std::pair<double, double>> terms; // (a, c) for homogeneous_sum
    std::optional<double> R;
};

struct ExperimentConfig {
    SymbolSpec symbol;
    ApproachProfile gamma;
    int n = 1;
    int K = 5;
    double N = 81.0;
    Variant variant = Variant::theorem1;
    double beta = 1.0;
    std::vector<double> center; // defaults to the origin
    double tol = 1e-8;
    double c_min = 0.0;
    double r_max = 1e6;
    int grid_points = 64;
    std::optional<std::vector<std::size_t>> ks;
    std::optional<double> sobolev_s;      // defaults to n/2
    std::optional<std::size_t> sobolev_j_max; // defaults to min(K, J)
    double t_min_factor = 0.5;
    std::optional<double> x_max;          // defaults to K
    std::string blowup_csv = "blowup.csv";
    std::string certificates_json = "certificates.json";
};

namespace detail {

inline void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where)
{
    if (!j.is_object())
        throw ConfigError(where + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items())
        if (!ok.contains(key))
            throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
void read_opt(const json& j, const char* key, T& out)
{
    if (j.contains(key))
        out = j.at(key).get<T>();
}

} // namespace detail

inline ExperimentConfig config_from_json(const json& j)
{
    ExperimentConfig c;
    try {
        detail::reject_unknown(j,
                               {"symbol", "gamma", "n", "K", "N", "variant", "beta", "center", "tol", "c_min",
                                "r_max", "grid_points", "ks", "sobolev", "continuity", "outputs"},
                               "config");
        detail::read_opt(j, "n", c.n);
        detail::read_opt(j, "K", c.K);
        detail::read_opt(j, "N", c.N);
        detail::read_opt(j, "beta", c.beta);
        detail::read_opt(j, "tol", c.tol);
        detail::read_opt(j, "c_min", c.c_min);
        detail::read_opt(j, "r_max", c.r_max);
        detail::read_opt(j, "grid_points", c.grid_points);
        detail::read_opt(j, "center", c.center);
        if (j.contains("variant"))
            c.variant = variant_from(j.at("variant").get<std::string>());
        if (j.contains("ks"))
            c.ks = j.at("ks").get<std::vector<std::size_t>>();
        if (j.contains("symbol")) {
            const auto& s = j.at("symbol");
            detail::reject_unknown(s, {"kind", "a", "mu", "beta", "terms", "R"}, "symbol");
            c.symbol.kind = s.at("kind").get<std::string>();
            detail::read_opt(s, "a", c.symbol.a);
            detail::read_opt(s, "mu", c.symbol.mu);
            detail::read_opt(s, "beta", c.symbol.beta);
            if (s.contains("R"))
                c.symbol.R = s.at("R").get<double>();
            if (s.contains("terms")) {
                for (const auto& t : s.at("terms")) {
                    detail::reject_unknown(t, {"a", "c"}, "symbol.terms[]");
                    c.symbol.terms.emplace_back(t.at("a").get<double>(), t.at("c").get<double>());
                }
            }
        }
        if (j.contains("gamma")) {
            const auto& g = j.at("gamma");
            detail::reject_unknown(g, {"kind", "sigma", "c"}, "gamma");
            const auto kind = g.at("kind").get<std::string>();
            if (kind == "identity")
                c.gamma = ApproachProfile::identity();
            else if (kind == "power")
                c.gamma = ApproachProfile::power(g.at("sigma").get<double>());
            else if (kind == "scaled")
                c.gamma = ApproachProfile::scaled(g.at("c").get<double>());
            else
                throw ConfigError("unknown gamma kind '" + kind + "'");
        }
        if (j.contains("sobolev")) {
            const auto& s = j.at("sobolev");
            detail::reject_unknown(s, {"s", "j_max"}, "sobolev");
            if (s.contains("s"))
                c.sobolev_s = s.at("s").get<double>();
            if (s.contains("j_max"))
                c.sobolev_j_max = s.at("j_max").get<std::size_t>();
        }
        if (j.contains("continuity")) {
            const auto& s = j.at("continuity");
            detail::reject_unknown(s, {"t_min_factor", "x_max"}, "continuity");
            detail::read_opt(s, "t_min_factor", c.t_min_factor);
            if (s.contains("x_max"))
                c.x_max = s.at("x_max").get<double>();
        }
        if (j.contains("outputs")) {
            const auto& o = j.at("outputs");
            detail::reject_unknown(o, {"blowup_csv", "certificates_json"}, "outputs");
            detail::read_opt(o, "blowup_csv", c.blowup_csv);
            detail::read_opt(o, "certificates_json", c.certificates_json);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const InputError& e) {
        throw ConfigError(e.what());
    }
    if (c.n < 1 || c.n > 3)
        throw ConfigError("config: n must be 1, 2 or 3");
    if (c.K < 1)
        throw ConfigError("config: K must be positive");
    if (!(c.N > 1.0))
        throw ConfigError("config: N must exceed 1");
    if (!(c.tol > 0.0))
        throw ConfigError("config: tol must be positive");
    if (c.center.empty())
        c.center.assign(static_cast<std::size_t>(c.n), 0.0);
    if (static_cast<int>(c.center.size()) != c.n)
        throw ConfigError("config: center must have n entries");
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& p)
{
    std::ifstream in(p);
    if (!in)
        throw ConfigError("cannot open config " + p.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config " + p.string() + ": " + e.what());
    }
    return config_from_json(j);
}

inline DispersionSymbol make_symbol(const ExperimentConfig& c)
{
    const double R = c.symbol.R.value_or(DispersionSymbol::default_validity_radius);
    const auto& s = c.symbol;
    try {
        if (s.kind == "homogeneous")
            return DispersionSymbol::homogeneous(s.a, c.n, R);
        if (s.kind == "r_log_r")
            return DispersionSymbol::r_log_r(c.n, R);
        if (s.kind == "exponential")
            return DispersionSymbol::exponential(s.mu, s.beta, c.n, R);
        if (s.kind == "homogeneous_sum") {
            HomogeneousSum sum;
            for (auto [a, coef] : s.terms)
                sum.terms.push_back({a, [coef](Direction) { return coef; }, std::abs(coef), std::abs(coef), true});
            return DispersionSymbol(sum, c.n, R);
        }
    } catch (const InputError& e) {
        throw ConfigError(std::string("symbol: ") + e.what());
    }
    throw ConfigError("unknown symbol kind '" + s.kind + "'");
}

inline Schedule make_schedule(const ExperimentConfig& c, const DispersionSymbol& sym)
{
    if (c.variant == Variant::theorem1)
        return build_annulus_schedule(sym, build_spatial_schedule(c.gamma, c.n, c.K), c.N);
    return build_theorem2_schedule(sym, c.center, c.gamma, c.n, c.K, c.N, c.variant, c.beta);
}

// Reports ------------------------------------------------------------------

inline json to_json(const ConditionReport& r)
{
    json j;
    j["grows_unboundedly"] = r.grows_unboundedly;
    j["bottom_decade_min"] = r.bottom_decade_min;
    j["top_decade_min"] = r.top_decade_min;
    j["ratio_bound_C"] = r.ratio_bound_C;
    j["lower_bound_h"] = r.lower_bound_h;
    j["beta"] = r.beta ? json(*r.beta) : json(nullptr);
    j["weak_ratio_bound"] = r.weak_ratio_bound ? json(*r.weak_ratio_bound) : json(nullptr);
    j["leading_profile_inf"] = r.leading_profile_inf ? json(*r.leading_profile_inf) : json(nullptr);
    j["grid"] = {{"r_min", r.grid.r_min},
                 {"r_max", r.grid.r_max},
                 {"radial_points", r.grid.radial_points},
                 {"angular_points", r.grid.angular_points}};
    json v = json::array();
    for (auto x : r.verdicts)
        v.push_back(to_string(x));
    j["verdicts"] = v;
    return j;
}

inline json to_json(const Enclosure& e)
{
    return {{"j", e.j},
            {"chain", to_string(e.chain)},
            {"log_bound", real_string(e.log_bound)},
            {"log_boundary", real_string(e.log_boundary)},
            {"log_interior", real_string(e.log_interior)},
            {"log_phase_gap", real_string(e.log_phase_gap)},
            {"bound", e.bound()}};
}

inline json to_json(const BlowupCertificate& c)
{
    json tail = json::array();
    for (const auto& e : c.tail_terms)
        tail.push_back(to_json(e));
    return {{"k", c.k},
            {"t_k", c.t_k},
            {"log_Rp_k", real_string(c.log_Rp_k)},
            {"diagonal", c.diagonal},
            {"below_sum_bound", c.below_sum_bound},
            {"below_sum_route", "absolute_integrand"},
            {"tail_bound", c.tail_bound},
            {"log_tail_bound", real_string(c.log_tail_bound)},
            {"lower_bound", c.lower_bound},
            {"growth_ratio", c.growth_ratio},
            {"tail_terms", tail}};
}

inline json to_json(const SobolevReport& r)
{
    return {{"n", r.n},
            {"s", r.s},
            {"j_max", r.j_max},
            {"partial_norms", r.partial_norms},
            {"increment_bounds", r.increment_bounds},
            {"tail_bound", r.tail_bound},
            {"converged", r.converged},
            {"norm", r.norm()}};
}

inline json to_json(const OscillatoryTerm& t)
{
    return {{"re", t.value.real()},
            {"im", t.value.imag()},
            {"abs_error", t.abs_error},
            {"method", to_string(t.method)},
            {"node_count", t.node_count}};
}

inline json to_json(const TermTrace& t)
{
    json nodes = json::array();
    for (const auto& n : t.nodes) {
        json ph = json::array();
        for (auto [r, F] : n.phase_samples)
            ph.push_back({r, F});
        nodes.push_back({{"omega", n.omega}, {"radial", to_json(n.radial)}, {"phase_samples", ph}});
    }
    return {{"j", t.j}, {"nodes", nodes}};
}

// Files --------------------------------------------------------------------

// Write to a sibling temporary and rename over the target.
inline void atomic_write(const std::filesystem::path& p, const std::string& content)
{
    if (p.has_parent_path())
        std::filesystem::create_directories(p.parent_path());
    auto tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out)
            throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, p);
}

inline std::string dump(const json& j)
{
    return j.dump(2) + "\n";
}

} // namespace divcert

#endif
