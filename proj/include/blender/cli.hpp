#pragma once

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "blender/blender_cert.hpp"
#include "blender/errors.hpp"
#include "blender/historic.hpp"
#include "blender/io.hpp"
#include "blender/skew_system.hpp"

namespace blender::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kNoWitness = 3 };

/// Everything a command may read from a config file.
struct RunConfig {
    SystemParams system;
    ObservableSpec observable = ObservableSpec::defaults_for(SystemParams{});
    std::optional<Rational> distal_r;
    Rational c_hat_max{0};
    std::size_t N = 10;
    std::size_t depth = 1;
    Rational slack{1, 100};
    std::size_t horizon = 10000;
    std::size_t max_horizon = kDefaultMaxHorizon;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::size_t parse_count(const std::string& key, const std::string& value) {
    const Rational r = Rational::parse(value);
    if (r.denominator() != 1 || r.sign() < 0 || !r.numerator().fits_ulong_p())
        throw ConfigError(key + " must be a nonnegative integer, got '" + value + "'");
    return r.numerator().get_ui();
}

inline int parse_dim(const std::string& key, const std::string& value) {
    const std::size_t n = parse_count(key, value);
    if (n > 3) throw ConfigError(key + " must be at most 3");
    return static_cast<int>(n);
}

struct ParsedKeys {
    bool phi_one = false;
    bool phi_zero = false;
};

inline void apply(RunConfig& cfg, ParsedKeys& seen, const std::string& key, const std::string& value) {
    try {
        if (key == "lambda") cfg.system.lambda = Rational::parse(value);
        else if (key == "mu") cfg.system.mu = Rational::parse(value);
        else if (key == "eps") cfg.system.eps = Rational::parse(value);
        else if (key == "kappa") cfg.system.kappa = Rational::parse(value);
        else if (key == "rho") cfg.system.rho = Rational::parse(value);
        else if (key == "delta0") cfg.system.delta0 = Rational::parse(value);
        else if (key == "s_dim") cfg.system.s_dim = parse_dim(key, value);
        else if (key == "uu_dim") cfg.system.uu_dim = parse_dim(key, value);
        else if (key == "phi_one") cfg.observable.one = Rational::parse(value), seen.phi_one = true;
        else if (key == "phi_zero") cfg.observable.zero = Rational::parse(value), seen.phi_zero = true;
        else if (key == "distal_r") cfg.distal_r = Rational::parse(value);
        else if (key == "c_hat_max") cfg.c_hat_max = Rational::parse(value);
        else if (key == "N") cfg.N = parse_count(key, value);
        else if (key == "depth") cfg.depth = parse_count(key, value);
        else if (key == "slack") cfg.slack = Rational::parse(value);
        else if (key == "horizon") cfg.horizon = parse_count(key, value);
        else if (key == "max_horizon") cfg.max_horizon = parse_count(key, value);
        else throw ConfigError("unknown config key '" + key + "'");
    } catch (const ParseError& e) {
        throw ConfigError("bad value for " + key + ": " + e.what());
    } catch (const DivisionByZeroError& e) {
        throw ConfigError("bad value for " + key + ": " + e.what());
    }
}

inline std::pair<std::string, std::string> split_assignment(const std::string& line, std::size_t lineno) {
    const auto eq = line.find('=');
    if (eq == std::string::npos)
        throw ConfigError("line " + std::to_string(lineno) + ": expected key = value, got '" + line + "'");
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty() || value.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    return {key, value};
}

}  // namespace detail

/// Rejects anything the library would refuse later.
inline void validate(const RunConfig& cfg) {
    try {
        blender::validate(cfg.system);
        blender::validate(cfg.observable, cfg.system);
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    if (cfg.distal_r && cfg.distal_r->sign() <= 0) throw ConfigError("distal_r must be positive");
    if (cfg.c_hat_max.sign() < 0) throw ConfigError("c_hat_max must be nonnegative");
}

/// Parses `key = value` lines (rationals as "p/q", `#` starts a comment),
/// then `overrides` in the same syntax. Unknown or repeated keys are errors.
/// The observable defaults to (eps/4, eps/2) of the final eps.
inline RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {}) {
    RunConfig cfg;
    detail::ParsedKeys seen;
    std::vector<std::string> keys;
    auto take = [&](const std::string& raw, std::size_t lineno, bool is_override) {
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) return;
        auto [key, value] = detail::split_assignment(line, lineno);
        if (!is_override && std::find(keys.begin(), keys.end(), key) != keys.end())
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        keys.push_back(key);
        detail::apply(cfg, seen, key, value);
    };
    std::istringstream in{std::string(text)};
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) take(line, lineno, false);
    for (const std::string& o : overrides) take(o, 0, true);

    const ObservableSpec d = ObservableSpec::defaults_for(cfg.system);
    if (!seen.phi_one) cfg.observable.one = d.one;
    if (!seen.phi_zero) cfg.observable.zero = d.zero;
    validate(cfg);
    return cfg;
}

inline RunConfig load_config(const std::optional<std::string>& path, const std::vector<std::string>& overrides = {}) {
    if (!path) return parse_config("", overrides);
    std::ifstream in(*path);
    if (!in) throw ConfigError("cannot read config file '" + *path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), overrides);
}

/// Options shared by all commands.
struct CommonOptions {
    std::optional<std::string> config_path;
    std::vector<std::string> overrides;
    bool reproducible = false;
};

namespace detail {

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

inline io::Json header(const CommonOptions& opts, const char* kind) {
    io::Json j{{"kind", kind}};
    if (!opts.reproducible) j["generated_at"] = utc_timestamp();
    return j;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
    if (!out) throw Error("write to '" + path + "' failed");
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Loads the config, mapping every config problem to exit code 2.
inline std::optional<RunConfig> config_or_report(const CommonOptions& opts, std::ostream& err) {
    try {
        return load_config(opts.config_path, opts.overrides);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return std::nullopt;
    }
}

}  // namespace detail

// ---------------------------------------------------------------- certify

struct CertifyOptions {
    CommonOptions common;
    std::string report_path = "certify_report.json";
};

inline int cmd_certify(const CertifyOptions& opts, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    const auto cfg = detail::config_or_report(opts.common, err);
    if (!cfg) return kConfigError;
    try {
        const SkewSystem sys = build_system(cfg->system);
        const Rational r = cfg->distal_r.value_or(cfg->system.eps / Rational(2));
        const BlenderReport blender = covering_conditions_report(sys, cfg->c_hat_max, r);
        const HyperbolicityReport hyp = hyperbolicity_report(sys);
        const bool overall = blender.overall && hyp.chain_holds && blender.distal.is_distal;

        io::Json j = detail::header(opts.common, "certify");
        j["system"] = io::to_json(cfg->system);
        j["covering"] = io::to_json(blender.covering);
        j["hyperbolicity"] = io::to_json(hyp);
        j["distal"] = io::to_json(blender.distal);
        j["blender"] = io::to_json(blender);
        j["overall"] = overall;
        detail::write_text(opts.report_path, j.dump(2) + "\n");

        out << "covering: " << (blender.covering.covered ? "yes" : "no");
        if (blender.lebesgue_number) out << ", L = " << blender.lebesgue_number->str();
        if (blender.covering.witness) out << ", uncovered point " << blender.covering.witness->str();
        out << "\nhyperbolicity chain: " << (hyp.chain_holds ? "holds" : "fails")
            << "\ndistal: " << (blender.distal.is_distal ? "yes" : "no") << " (distance "
            << blender.distal.distance_to_family.str() << ", witness " << blender.distal.witness_word.str() << ")"
            << "\nblender: " << (overall ? "certified" : "not certified") << "\nreport: " << opts.report_path << '\n';
        return overall ? kOk : kFailure;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const Error& e) {
        err << "certify failed: " << e.what() << '\n';
        return kFailure;
    }
}

// ---------------------------------------------------------------- construct

struct ConstructOptions {
    CommonOptions common;
    std::string certificate_path = "certificate.json";
    std::string csv_path = "orbit.csv";
};

inline std::string orbit_csv(const SkewSystem& sys, const ObservableSpec& spec, const Point& z, std::size_t n) {
    std::ostringstream csv;
    csv << "step,symbol,fiber,phi,running_average\n";
    Rational sum(0);
    visit_orbit(sys, z, n, [&](std::size_t t, const Point& p, int symbol) {
        const Rational phi = observable_value(spec, p.fiber);
        sum += phi;
        csv << t << ',' << symbol << ',' << io::decimal(p.fiber) << ',' << io::decimal(phi) << ','
            << io::decimal(sum / Rational(static_cast<long>(t + 1))) << '\n';
    });
    return csv.str();
}

inline int cmd_construct(const ConstructOptions& opts, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    const auto cfg = detail::config_or_report(opts.common, err);
    if (!cfg) return kConfigError;
    try {
        const SkewSystem sys = build_system(cfg->system);
        const Schedule schedule =
            make_schedule(cfg->N, cfg->depth, cfg->slack, transit_bounds(sys, cfg->observable), cfg->max_horizon);
        const HistoricCertificate cert = construct_historic_point(sys, cfg->observable, schedule);
        const Verdict verdict = verify_certificate(sys, cfg->observable, cert);

        io::Json j = detail::header(opts.common, "historic_certificate");
        const io::Json body = io::to_json(cert);
        for (const auto& [k, v] : body.items()) j[k] = v;
        j["verified"] = verdict.passed;
        detail::write_text(opts.certificate_path, j.dump(2) + "\n");
        detail::write_text(opts.csv_path, orbit_csv(sys, cfg->observable, cert.chosen_point, cert.horizon()));

        out << "horizon " << cert.horizon() << ", " << cert.pairs.size() << " pair(s), gap ~ " << io::decimal(cert.gap)
            << '\n';
        for (const auto& p : cert.pairs)
            out << "  a(" << p.n1 << ") ~ " << io::decimal(p.avg1) << "   a(" << p.n2 << ") ~ " << io::decimal(p.avg2)
                << '\n';
        out << "certificate: " << opts.certificate_path << "\ncsv: " << opts.csv_path << '\n';
        if (!verdict) {
            err << "verification failed: " << verdict.reason << '\n';
            return kFailure;
        }
        return kOk;
    } catch (const SteeringError& e) {
        err << "construction failed at step " << e.step() << ": " << e.what() << '\n';
        return kFailure;
    } catch (const Error& e) {
        err << "construction failed: " << e.what() << '\n';
        return kFailure;
    }
}

// ---------------------------------------------------------------- verify

struct VerifyOptions {
    std::string certificate_path;
};

inline int cmd_verify(const VerifyOptions& opts, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    HistoricCertificate cert;
    try {
        cert = io::certificate_from(io::Json::parse(detail::read_text(opts.certificate_path)));
    } catch (const std::exception& e) {
        err << "config error: cannot load certificate: " << e.what() << '\n';
        return kConfigError;
    }
    try {
        const SkewSystem sys = build_system(cert.params);
        const Verdict v = verify_certificate(sys, cert.observable, cert);
        if (!v) {
            out << "rejected: " << v.reason << '\n';
            return kFailure;
        }
        out << "verified: " << cert.pairs.size() << " pair(s), gap ~ " << io::decimal(cert.gap) << '\n';
        return kOk;
    } catch (const Error& e) {
        err << "verify failed: " << e.what() << '\n';
        return kFailure;
    }
}

// ---------------------------------------------------------------- sweep

/// Grid axis: comma-separated rationals, or `lo:hi:step` (inclusive).
/// An empty string is an empty axis.
inline std::vector<Rational> parse_axis(const std::string& name, const std::string& text) {
    std::vector<Rational> out;
    const std::string s = detail::trim(text);
    if (s.empty()) return out;
    try {
        if (s.find(':') != std::string::npos) {
            std::vector<Rational> parts;
            std::stringstream ss(s);
            for (std::string piece; std::getline(ss, piece, ':');) parts.push_back(Rational::parse(detail::trim(piece)));
            if (parts.size() != 3 || parts[2].sign() <= 0)
                throw ConfigError(name + " range must be lo:hi:step with step > 0");
            for (Rational v = parts[0]; v <= parts[1]; v += parts[2]) out.push_back(v);
            return out;
        }
        std::stringstream ss(s);
        for (std::string piece; std::getline(ss, piece, ',');) out.push_back(Rational::parse(detail::trim(piece)));
    } catch (const ParseError& e) {
        throw ConfigError("bad " + name + " axis: " + e.what());
    }
    return out;
}

struct SweepRow {
    Rational lambda;
    Rational mu;
    Rational eps;
    bool covered = false;
    std::optional<Rational> L;
};

/// Covering outcome at one grid point. An empty B counts as not covered.
inline SweepRow sweep_point(const Rational& lambda, const Rational& mu, const Rational& eps) {
    SweepRow row{lambda, mu, eps, false, std::nullopt};
    const Rational hi = (mu + Rational(1)) / lambda - eps;
    if (!(eps < hi)) return row;
    const AffineIFS ifs({AffineMap{Rational(1) / lambda, Rational(0)}, AffineMap{Rational(1) / lambda, mu / lambda}});
    const CoveringCertificate c = check_covering(ifs, Interval::open(eps, hi));
    row.covered = c.covered;
    row.L = c.lebesgue_number;
    return row;
}

struct SweepOptions {
    CommonOptions common;
    std::optional<std::string> lambda_axis;
    std::optional<std::string> mu_axis;
    std::optional<std::string> eps_axis;
    std::string csv_path = "sweep.csv";
    unsigned threads = 0;  // 0: hardware concurrency
};

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string csv = "lambda,mu,eps,covered,L\n";
    for (const SweepRow& r : rows)
        csv += r.lambda.str() + ',' + r.mu.str() + ',' + r.eps.str() + ',' + (r.covered ? "true" : "false") + ',' +
               (r.L ? r.L->str() : std::string()) + '\n';
    return csv;
}

inline int cmd_sweep(const SweepOptions& opts, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    const auto cfg = detail::config_or_report(opts.common, err);
    if (!cfg) return kConfigError;
    std::vector<SweepRow> grid;
    try {
        const auto axis = [](const char* name, const std::optional<std::string>& text, const Rational& fallback) {
            return text ? parse_axis(name, *text) : std::vector<Rational>{fallback};
        };
        const auto lambdas = axis("lambda", opts.lambda_axis, cfg->system.lambda);
        const auto mus = axis("mu", opts.mu_axis, cfg->system.mu);
        const auto epss = axis("eps", opts.eps_axis, cfg->system.eps);
        for (const Rational& l : lambdas)
            if (!(Rational(1) < l && l < Rational(2))) throw ConfigError("grid lambda " + l.str() + " outside (1, 2)");
        for (const Rational& m : mus)
            if (!(Rational(0) < m && m < Rational(1))) throw ConfigError("grid mu " + m.str() + " outside (0, 1)");
        for (const Rational& e : epss)
            if (e.sign() <= 0) throw ConfigError("grid eps " + e.str() + " must be positive");
        for (const Rational& l : lambdas)
            for (const Rational& m : mus)
                for (const Rational& e : epss) grid.push_back({l, m, e, false, std::nullopt});
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    }

    // Independent grid points, strided over worker threads.
    const unsigned hw = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(hw, std::max<std::size_t>(grid.size(), 1));
    std::vector<std::future<void>> tasks;
    for (std::size_t w = 0; w < workers; ++w)
        tasks.push_back(std::async(std::launch::async, [&grid, w, workers] {
            for (std::size_t i = w; i < grid.size(); i += workers)
                grid[i] = sweep_point(grid[i].lambda, grid[i].mu, grid[i].eps);
        }));
    try {
        for (auto& t : tasks) t.get();
        detail::write_text(opts.csv_path, sweep_csv(grid));
    } catch (const Error& e) {
        err << "sweep failed: " << e.what() << '\n';
        return kFailure;
    }
    const auto covered = std::count_if(grid.begin(), grid.end(), [](const SweepRow& r) { return r.covered; });
    out << grid.size() << " grid point(s), " << covered << " covered\ncsv: " << opts.csv_path << '\n';
    return kOk;
}

// ---------------------------------------------------------------- detect

struct DetectOptions {
    CommonOptions common;
    bool fixed_point = false;
    std::optional<std::string> fiber;
    std::optional<std::string> base_s;   // comma-separated
    std::optional<std::string> base_uu;  // comma-separated
    std::optional<std::string> certificate_path;
    std::optional<std::size_t> N;
    std::optional<std::size_t> horizon;
};

inline int cmd_detect(const DetectOptions& opts, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    const auto cfg = detail::config_or_report(opts.common, err);
    if (!cfg) return kConfigError;

    SystemParams params = cfg->system;
    ObservableSpec spec = cfg->observable;
    std::size_t N = cfg->N;
    std::size_t horizon = cfg->horizon;
    Point z;
    try {
        const int sources = int(opts.fixed_point) + int(opts.fiber.has_value()) + int(opts.certificate_path.has_value());
        if (sources != 1) throw ConfigError("give exactly one of --point P, --fiber, --certificate");
        if (opts.certificate_path) {
            const HistoricCertificate cert = io::certificate_from(io::Json::parse(detail::read_text(*opts.certificate_path)));
            params = cert.params;
            spec = cert.observable;
            N = cert.N;
            horizon = cert.horizon();
            z = cert.chosen_point;
        }
        if (opts.N) N = *opts.N;
        if (opts.horizon) horizon = *opts.horizon;
        const SkewSystem sys = build_system(params);
        if (!opts.certificate_path) {
            z = sys.fixed_point();
            if (opts.fiber) {
                z.fiber = Rational::parse(*opts.fiber);
                if (opts.base_s) z.base_s = parse_axis("base_s", *opts.base_s);
                if (opts.base_uu) z.base_uu = parse_axis("base_uu", *opts.base_uu);
                if (z.base_s.size() != static_cast<std::size_t>(params.s_dim) ||
                    z.base_uu.size() != static_cast<std::size_t>(params.uu_dim))
                    throw ConfigError("point dimensions do not match s_dim/uu_dim");
            }
        }
        if (N == 0 || N > horizon) throw ConfigError("need 1 <= N <= horizon");

        const auto witness = detect_historic(sys, spec, z, N, horizon);
        if (!witness) {
            out << "no witness up to horizon " << horizon << '\n';
            return kNoWitness;
        }
        out << "witness n1=" << witness->n1 << " n2=" << witness->n2 << " gap ~ " << io::decimal(witness->gap) << '\n';
        return kOk;
    } catch (const OrbitEscapeError& e) {
        err << e.what() << '\n';
        return kFailure;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ParseError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: bad certificate: " << e.what() << '\n';
        return kConfigError;
    } catch (const Error& e) {
        err << "detect failed: " << e.what() << '\n';
        return kFailure;
    }
}

}  // namespace blender::cli
