// divcert command line: check-symbol | build-schedule | certify | sobolev | trace-term

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"

#include "divcert/io.hpp"

namespace fs = std::filesystem;
using namespace divcert;

namespace {

enum Exit : int {
    ok = 0,
    below_threshold = 1,
    verdict_missing = 2,
    stage_failed = 3,
    usage = 64,
};

// Raised for failures inside a named pipeline stage.
struct StageError : std::runtime_error {
    StageError(const std::string& stage, const std::string& what)
        : std::runtime_error(stage + ": " + what) {}
};

struct Options {
    std::string config;
    std::string out;
    std::string schedule_in;
    std::string schedule_out;
    unsigned jobs = 1;
    std::string trace_term;
    std::optional<int> K;
    std::optional<double> N;
    std::optional<double> tol;
    std::optional<double> c_min;
};

template <class F>
auto stage(const char* name, F&& f)
{
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

ExperimentConfig load(const Options& o)
{
    ExperimentConfig c = o.config.empty() ? config_from_json(json::object()) : load_config(o.config);
    if (o.K)
        c.K = *o.K;
    if (o.N)
        c.N = *o.N;
    if (o.tol)
        c.tol = *o.tol;
    if (o.c_min)
        c.c_min = *o.c_min;
    if (c.K < 1 || !(c.N > 1.0) || !(c.tol > 0.0))
        throw ConfigError("flag override out of range");
    return c;
}

void emit(const Options& o, const std::string& text)
{
    if (o.out.empty())
        std::cout << text;
    else
        atomic_write(o.out, text);
}

Schedule obtain_schedule(const Options& o, const ExperimentConfig& c, const DispersionSymbol& sym)
{
    Schedule s;
    if (!o.schedule_in.empty()) {
        s = stage("load-schedule", [&] {
            std::ifstream in(o.schedule_in);
            if (!in)
                throw InputError("cannot open " + o.schedule_in);
            return schedule_from_json(json::parse(in));
        });
        stage("validate-schedule", [&] {
            validate_or_throw(s, &sym);
            return 0;
        });
        spdlog::info("loaded schedule with {} terms from {}", s.size(), o.schedule_in);
    } else {
        s = stage("build-schedule", [&] { return make_schedule(c, sym); });
        spdlog::info("built {} schedule: K={} N={} terms={}", to_string(s.variant), c.K, c.N, s.size());
    }
    if (!o.schedule_out.empty())
        atomic_write(o.schedule_out, dump(schedule_to_json(s)));
    return s;
}

int cmd_check_symbol(const Options& o)
{
    const auto c = load(o);
    const auto sym = make_symbol(c);
    const auto rep = stage("check-symbol", [&] {
        return verify_growth_conditions(sym, c.r_max, c.grid_points,
                                        c.variant == Variant::theorem2_weak ? std::optional<double>(c.beta)
                                                                            : std::nullopt);
    });
    const Verdict want = c.variant == Variant::theorem1 ? Verdict::theorem1
                         : c.variant == Variant::theorem2_strong ? Verdict::theorem2_strong
                                                                  : Verdict::theorem2_weak;
    json j;
    j["symbol"] = sym.name();
    j["requested"] = to_string(want);
    j["satisfied"] = rep.has(want);
    j["report"] = to_json(rep);
    emit(o, dump(j));
    spdlog::info("{}: requested {} -> {}", sym.name(), to_string(want), rep.has(want));
    return rep.has(want) ? ok : verdict_missing;
}

int cmd_build_schedule(const Options& o)
{
    const auto c = load(o);
    const auto sym = make_symbol(c);
    const auto s = obtain_schedule(o, c, sym);
    if (o.schedule_out.empty() || !o.out.empty())
        emit(o, dump(schedule_to_json(s)));
    return ok;
}

int cmd_certify(const Options& o)
{
    const auto c = load(o);
    const auto sym = make_symbol(c);
    const auto s = obtain_schedule(o, c, sym);
    const auto ks = c.ks ? *c.ks : all_terms(s);
    const auto table = stage("certify", [&] {
        return blowup_table(sym, s, ks, {std::max(1u, o.jobs), c.tol, true});
    });

    fs::path csv = o.out.empty() ? fs::path(c.blowup_csv) : fs::path(o.out);
    fs::path cert = c.certificates_json;
    if (!o.out.empty())
        cert = fs::path(o.out).replace_extension(".certificates.json");

    std::ostringstream os;
    write_blowup_csv(os, table.rows);

    bool pass = true;
    std::optional<double> c0;
    json certs = json::array();
    for (const auto& cert_k : table.certificates) {
        certs.push_back(to_json(cert_k));
        if (cert_k.k >= 2) {
            c0 = c0 ? std::min(*c0, cert_k.growth_ratio) : cert_k.growth_ratio;
            pass = pass && cert_k.growth_ratio >= c.c_min;
        }
        spdlog::debug("k={} L={} ratio={}", cert_k.k, cert_k.lower_bound, cert_k.growth_ratio);
    }
    json j;
    j["symbol"] = sym.name();
    j["variant"] = to_string(s.variant);
    j["N"] = c.N;
    j["K"] = c.K;
    j["terms"] = s.size();
    j["c_min"] = c.c_min;
    j["c0"] = c0 ? json(*c0) : json(nullptr);
    j["analytic_target"] = analytic_growth_target(s.n, s.N);
    j["passed"] = pass;
    j["certificates"] = certs;

    stage("write-output", [&] {
        atomic_write(csv, os.str());
        atomic_write(cert, dump(j));
        return 0;
    });
    spdlog::info("wrote {} and {}; c0={} c_min={}", csv.string(), cert.string(), c0.value_or(0.0), c.c_min);
    return pass ? ok : below_threshold;
}

int cmd_sobolev(const Options& o)
{
    const auto c = load(o);
    const auto sym = make_symbol(c);
    const auto s = obtain_schedule(o, c, sym);
    const double order = c.sobolev_s.value_or(0.5 * c.n);
    const std::size_t j_max = c.sobolev_j_max.value_or(std::min<std::size_t>(static_cast<std::size_t>(c.K), s.size()));
    const auto rep = stage("sobolev", [&] { return sobolev_report(s, order, j_max); });
    emit(o, dump(to_json(rep)));
    return rep.converged ? ok : below_threshold;
}

int cmd_trace_term(const Options& o)
{
    std::size_t j = 0, k = 0;
    {
        char comma = 0;
        std::istringstream is(o.trace_term);
        if (!(is >> j >> comma >> k) || comma != ',' || !is.eof())
            throw ConfigError("--trace-term expects J,K");
    }
    const auto c = load(o);
    const auto sym = make_symbol(c);
    const auto s = obtain_schedule(o, c, sym);
    json out = stage("trace-term", [&] {
        s.check_term(j);
        s.check_term(k);
        json t;
        t["j"] = j;
        t["k"] = k;
        t["log_R"] = real_string(s.log_R[j - 1]);
        t["log_Rp"] = real_string(s.log_Rp[j - 1]);
        t["log_only"] = s.log_only(j);
        if (j != k)
            t["enclosure"] = to_json(term_enclosure(sym, s, j, k));
        if (j == k || !s.log_only(j)) {
            TermTrace trace;
            const auto term = compute_term(sym, s, j, target_of(s, k), c.tol, &trace);
            t["value"] = to_json(term);
            t["method"] = to_string(term.method);
            t["trace"] = to_json(trace);
        }
        return t;
    });
    emit(o, dump(out));
    return ok;
}

void setup_logging()
{
    auto logger = spdlog::stderr_color_mt("divcert");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char* env = std::getenv("DIVCERT_LOG");
    const std::string level = env ? env : "error";
    if (level == "debug")
        spdlog::set_level(spdlog::level::debug);
    else if (level == "info")
        spdlog::set_level(spdlog::level::info);
    else
        spdlog::set_level(spdlog::level::err);
}

} // namespace

int main(int argc, char** argv)
{
    setup_logging();
    CLI::App app{"divergence certificates for generalized Schrodinger evolutions"};
    app.require_subcommand(1);
    Options o;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "experiment config (JSON)")->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "output path (default stdout, or config outputs for certify)");
        sub->add_option("--schedule-in", o.schedule_in, "reload a schedule JSON instead of building");
        sub->add_option("--schedule-out", o.schedule_out, "write the schedule JSON");
        sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--K", o.K, "override K");
        sub->add_option("--N", o.N, "override N");
        sub->add_option("--tol", o.tol, "override tol");
        sub->add_option("--c-min", o.c_min, "override c_min");
    };
    auto* check = app.add_subcommand("check-symbol", "growth-condition verdicts for the configured symbol");
    auto* build = app.add_subcommand("build-schedule", "construct and validate the schedule");
    auto* certify = app.add_subcommand("certify", "blow-up table CSV and certificate JSON");
    auto* sobolev = app.add_subcommand("sobolev", "H^s partial norms and tail bound");
    auto* trace = app.add_subcommand("trace-term", "evaluate one term with a node trace");
    for (auto* sub : {check, build, certify, sobolev, trace})
        common(sub);
    trace->add_option("--trace-term", o.trace_term, "J,K")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : usage;
    }

    try {
        if (*check)
            return cmd_check_symbol(o);
        if (*build)
            return cmd_build_schedule(o);
        if (*certify)
            return cmd_certify(o);
        if (*sobolev)
            return cmd_sobolev(o);
        return cmd_trace_term(o);
    } catch (const ConfigError& e) {
        spdlog::error("config: {}", e.what());
        std::cerr << "divcert: config error: " << e.what() << "\n";
        return usage;
    } catch (const StageError& e) {
        spdlog::error("{}", e.what());
        std::cerr << "divcert: " << e.what() << "\n";
        return stage_failed;
    } catch (const std::exception& e) {
        std::cerr << "divcert: " << e.what() << "\n";
        return stage_failed;
    }
}
