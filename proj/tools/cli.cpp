#include "cli.hpp"

#include "divstats/analytic.hpp"
#include "divstats/errors.hpp"
#include "divstats/format.hpp"
#include "divstats/model.hpp"
#include "divstats/montecarlo.hpp"
#include "divstats/sweep.hpp"
#include "divstats/trace_io.hpp"
#include "divstats/validation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

namespace divstats::cli {
namespace {

using nlohmann::json;

struct SystemFlags {
    int m_s = 1;
    int m_i = 1;
    int n = 1;
    double omega_s = 1.0;
    double omega_i = 1.0;
    double sigma2 = 1.0;
    double snr_db = 0.0;
    double inr_db = 0.0;
    double fm0 = 1.0;
    double fmi = 1.0;
    bool sir_limited = false;
    bool awgn_only = false;
    std::string config_path;
    std::map<std::string, CLI::Option*> opt;

    bool given(const std::string& name) const { return opt.at(name)->count() > 0; }
};

struct SimFlags {
    double duration = 0.0;
    double rate = 0.0;
    int sinusoids = 64;
    std::uint64_t seed = 1;
    double warmup = 0.0;
    int segments = 20;
    std::map<std::string, CLI::Option*> opt;

    bool given(const std::string& name) const { return opt.at(name)->count() > 0; }
};

void add_system_flags(CLI::App* app, SystemFlags& f) {
    f.opt["m-s"] = app->add_option("--m-s", f.m_s, "Desired-signal Nakagami severity m_S");
    f.opt["m-i"] = app->add_option("--m-i", f.m_i, "Interferer Nakagami severity m_I");
    f.opt["n"] = app->add_option("--n", f.n, "Number of cochannel interferers");
    f.opt["omega-s"] = app->add_option("--omega-s", f.omega_s, "Average desired power per branch");
    f.opt["omega-i"] = app->add_option("--omega-i", f.omega_i, "Average power per interferer per branch");
    f.opt["sigma2"] = app->add_option("--sigma2", f.sigma2, "AWGN power");
    f.opt["snr-db"] = app->add_option("--snr-db", f.snr_db, "Average SNR per branch [dB]; sets sigma2 = 1");
    f.opt["inr-db"] = app->add_option("--inr-db", f.inr_db, "Average INR per interferer per branch [dB]; sets sigma2 = 1");
    f.opt["sir-limited"] = app->add_flag("--sir-limited", f.sir_limited, "Interference-limited link (sigma2 = 0)");
    f.opt["awgn-only"] = app->add_flag("--awgn-only", f.awgn_only, "No interference (omega_I = 0)");
    f.opt["fm0"] = app->add_option("--fm0", f.fm0, "Maximum Doppler of the desired signal [Hz]");
    f.opt["fmi"] = app->add_option("--fmi", f.fmi, "Maximum Doppler of the interferers [Hz]");
    f.opt["config"] = app->add_option("--config", f.config_path, "JSON file with SystemConfig fields");
    f.opt["snr-db"]->excludes(f.opt["omega-s"])->excludes(f.opt["sigma2"]);
    f.opt["inr-db"]->excludes(f.opt["omega-i"])->excludes(f.opt["sigma2"]);
    f.opt["sir-limited"]->excludes(f.opt["sigma2"])->excludes(f.opt["awgn-only"]);
    f.opt["awgn-only"]->excludes(f.opt["omega-i"])->excludes(f.opt["inr-db"]);
}

void add_sim_flags(CLI::App* app, SimFlags& f) {
    f.opt["duration"] = app->add_option("--duration", f.duration, "Simulated seconds (default 500 / f_m0)");
    f.opt["rate"] = app->add_option("--rate", f.rate, "Sample rate [Hz] (default 64 max(f_m0, f_mi))");
    f.opt["sinusoids"] = app->add_option("--sinusoids", f.sinusoids, "Sinusoids per Gaussian process");
    f.opt["seed"] = app->add_option("--seed", f.seed, "Random seed (default $DIVSTATS_SEED or 1)");
    f.opt["warmup"] = app->add_option("--warmup", f.warmup, "Discarded seconds (default 5 / f_m0)");
    f.opt["segments"] = app->add_option("--segments", f.segments, "Independent segments / batches");
}

/// Defaults, then the JSON config file, then explicit flags.
SystemConfig resolve_system(const SystemFlags& f) {
    SystemConfig cfg;
    if (f.given("config")) {
        std::ifstream in(f.config_path);
        if (!in) throw ValidationError({"cannot read config file '" + f.config_path + "'"});
        json j;
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ValidationError({std::string("config file is not valid JSON: ") + e.what()});
        }
        from_json(j, cfg);
    }
    if (f.given("m-s")) cfg.m_S = f.m_s;
    if (f.given("m-i")) cfg.m_I = f.m_i;
    if (f.given("n")) cfg.n = f.n;
    if (f.given("omega-s")) cfg.omega_S = f.omega_s;
    if (f.given("omega-i")) cfg.omega_I = f.omega_i;
    if (f.given("sigma2")) cfg.sigma2 = f.sigma2;
    if (f.given("fm0")) cfg.f_m0 = f.fm0;
    if (f.given("fmi")) cfg.f_mi = f.fmi;
    if (f.given("snr-db")) {
        cfg.omega_S = db_to_linear(f.snr_db);
        cfg.sigma2 = 1.0;
    }
    if (f.given("inr-db")) {
        cfg.omega_I = db_to_linear(f.inr_db);
        cfg.sigma2 = 1.0;
    }
    if (f.sir_limited) cfg.sigma2 = 0.0;
    if (f.awgn_only) cfg.omega_I = 0.0;
    validate(cfg);
    return cfg;
}

std::uint64_t parse_seed(const std::string& text) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) throw ValidationError({"DIVSTATS_SEED must be an unsigned integer"});
    return v;
}

montecarlo::SimulationConfig resolve_sim(const SimFlags& f, const SystemConfig& cfg) {
    montecarlo::SimulationConfig sim;
    sim.duration = f.given("duration") ? f.duration : 500.0 / cfg.f_m0;
    if (f.given("rate")) sim.sample_rate = f.rate;
    sim.num_sinusoids = f.sinusoids;
    if (f.given("seed")) {
        sim.seed = f.seed;
    } else if (const char* env = std::getenv("DIVSTATS_SEED"); env != nullptr && *env != '\0') {
        sim.seed = parse_seed(env);
    }
    if (f.given("warmup")) sim.warmup = f.warmup;
    sim.segments = f.segments;
    montecarlo::validate(sim, cfg);
    return sim;
}

json sim_json(const montecarlo::SimulationConfig& sim, const SystemConfig& cfg) {
    return json{{"sample_rate", montecarlo::effective_rate(sim, cfg)},
                {"duration", sim.duration},
                {"num_sinusoids", sim.num_sinusoids},
                {"seed", sim.seed},
                {"warmup", montecarlo::effective_warmup(sim, cfg)},
                {"segments", sim.segments}};
}

analytic::Grid parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() < 3 || parts.size() > 4) {
        throw ValidationError({"--grid must look like lo:hi:points[:log|lin]"});
    }
    analytic::Grid g;
    auto number = [&](const std::string& s, const char* what) {
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ValidationError({std::string("--grid: cannot parse ") + what + " '" + s + "'"});
        }
    };
    g.lo = number(parts[0], "lower bound");
    g.hi = number(parts[1], "upper bound");
    const double pts = number(parts[2], "point count");
    if (pts != std::floor(pts) || pts < 1 || pts > 1e6) throw ValidationError({"--grid: point count must be a positive integer"});
    g.points = static_cast<int>(pts);
    g.log = false;
    if (parts.size() == 4) {
        if (parts[3] == "log") g.log = true;
        else if (parts[3] != "lin") throw ValidationError({"--grid: spacing must be 'log' or 'lin'"});
    }
    g.validate();
    return g;
}

/// Writes to `path`, or to `out` when path is empty or "-".
class Sink {
public:
    Sink(const std::string& path, std::ostream& out) : path_(path) {
        if (path.empty() || path == "-") {
            os_ = &out;
        } else {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
            os_ = file_.get();
        }
    }
    std::ostream& stream() { return *os_; }
    bool is_file() const { return file_ != nullptr; }
    const std::string& path() const { return path_; }
    void close() {
        if (file_) {
            file_->close();
            if (!*file_) throw std::runtime_error("failed writing '" + path_ + "'");
        }
    }

private:
    std::string path_;
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_ = nullptr;
};

std::string cell(double v) { return format_double(v); }

void write_header(std::ostream& os, const std::string& command, const SystemConfig& cfg) {
    json j = cfg;
    os << "# divstats " << command << '\n';
    os << "# config: " << j.dump() << '\n';
}

// ---------------------------------------------------------------------------

int cmd_eval(const SystemFlags& sf, std::optional<double> z_over_mu, std::optional<double> z, std::ostream& out) {
    const SystemConfig cfg = resolve_system(sf);
    const auto d = derive(cfg);
    const double scale = threshold_scale(cfg);
    double zz = 0.0;
    double zn = 0.0;
    if (z_over_mu) {
        zn = *z_over_mu;
        zz = zn * scale;
    } else {
        zz = *z;
        zn = zz / scale;
    }
    if (!(zz >= 0.0) || !std::isfinite(zz)) throw ValidationError({"the threshold must be finite and nonnegative"});
    const auto p = analytic::evaluate_point(zz, cfg);
    const char* status = "regular";
    switch (p.afd.status) {
    case analytic::AfdStatus::Regular: break;
    case analytic::AfdStatus::ZeroThreshold: status = "zero_threshold"; break;
    case analytic::AfdStatus::LcrUnderflow: status = "lcr_underflow"; break;
    case analytic::AfdStatus::BothUnderflow: status = "both_underflow"; break;
    }
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    json rec = {{"z", zz},
                {"z_over_mu", zn},
                {"op", p.op},
                {"lcr", p.lcr},
                {"lcr_norm", p.lcr / cfg.f_m0},
                {"afd", num(p.afd.value)},
                {"afd_norm", num(p.afd.value * cfg.f_m0)},
                {"afd_status", status},
                {"regime", to_string(d.regime)},
                {"mu", num(d.mu)},
                {"c", num(d.c)},
                {"threshold_scale", scale}};
    out << rec.dump() << '\n';
    return kOk;
}

int cmd_sweep(const SystemFlags& sf, const std::string& axis, const std::optional<std::string>& grid_text,
              double z_over_mu, const std::string& out_path, int jobs, std::ostream& out, std::ostream& err) {
    const SystemConfig cfg = resolve_system(sf);
    std::vector<analytic::SweepRow> rows;
    if (axis == "z_over_mu") {
        const auto grid = grid_text ? parse_grid(*grid_text) : analytic::default_grid();
        rows = analytic::sweep_thresholds(cfg, grid.values(), jobs);
    } else {
        const auto grid = grid_text ? parse_grid(*grid_text) : analytic::Grid{1, 8, 8, false};
        std::vector<int> ns;
        for (double v : grid.values()) {
            if (v != std::round(v) || v < 1) throw ValidationError({"n grid values must be positive integers"});
            ns.push_back(static_cast<int>(std::lround(v)));
        }
        for (std::size_t i = 1; i < ns.size(); ++i) {
            if (ns[i] <= ns[i - 1]) throw ValidationError({"n grid values must be strictly increasing"});
        }
        rows = analytic::sweep_interferers(cfg, ns, z_over_mu, jobs);
    }

    Sink sink(out_path, out);
    auto& os = sink.stream();
    write_header(os, "sweep", cfg);
    if (axis == "n") os << "# z_over_mu: " << cell(z_over_mu) << '\n';
    os << axis << ",op,lcr_norm,afd_norm\n";
    std::vector<double> lcr(rows.size(), std::numeric_limits<double>::quiet_NaN());
    std::ostringstream diag;
    int failures = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        os << cell(r.axis) << ',';
        if (r.error) {
            os << ",,\n";
            diag << i << ',' << cell(r.axis) << ',' << *r.error << '\n';
            ++failures;
            continue;
        }
        lcr[i] = r.stats.lcr;
        os << cell(r.stats.op) << ',' << cell(r.stats.lcr / cfg.f_m0) << ',' << cell(r.stats.afd.value * cfg.f_m0)
           << '\n';
    }
    if (const auto peak = analytic::argmax_first(lcr)) {
        os << (axis == "n" ? "# lcr_peak_n: " : "# th0: ") << cell(rows[*peak].axis) << '\n';
    } else {
        os << "# th0: none\n";
    }
    sink.close();
    if (failures > 0) {
        const std::string side = sink.is_file() ? sink.path() + ".diagnostics.txt" : std::string();
        if (!side.empty()) {
            std::ofstream d(side);
            d << "index," << axis << ",message\n" << diag.str();
        }
        err << failures << " grid point(s) failed" << (side.empty() ? "" : "; see " + side) << '\n';
        if (side.empty()) err << diag.str();
    }
    return kOk;
}

int cmd_simulate(const SystemFlags& sf, const SimFlags& mf, const std::optional<std::string>& grid_text,
                 const std::string& out_path, const std::string& trace_path, std::ostream& out) {
    const SystemConfig cfg = resolve_system(sf);
    const auto sim = resolve_sim(mf, cfg);
    const auto grid = grid_text ? parse_grid(*grid_text) : analytic::Grid{1e-2, 1e2, 9, true};
    const auto zn = grid.values();
    const double scale = threshold_scale(cfg);
    std::vector<double> g;
    for (double v : zn) g.push_back(montecarlo::z_to_g(v * scale));

    const auto trace = montecarlo::simulate(cfg, sim);
    if (trace.size() < 2) throw InsufficientData("the trace holds fewer than two samples");
    const auto stats = montecarlo::measure(trace, g, sim.segments);

    if (!trace_path.empty()) {
        std::ofstream tf(trace_path, std::ios::binary);
        if (!tf) throw std::runtime_error("cannot open '" + trace_path + "' for writing");
        const bool csv = trace_path.size() >= 4 && trace_path.substr(trace_path.size() - 4) == ".csv";
        if (csv) montecarlo::write_trace_csv(tf, trace);
        else montecarlo::write_trace_binary(tf, trace);
    }

    Sink sink(out_path, out);
    auto& os = sink.stream();
    write_header(os, "simulate", cfg);
    os << "# simulation: " << sim_json(sim, cfg).dump() << '\n';
    os << "z_over_mu,op_hat,lcr_hat,afd_hat,lcr_smooth_hat,afd_smooth_hat,upcrossings,smooth_upcrossings,"
          "stderr_op,stderr_lcr_smooth,stderr_afd_smooth\n";
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const auto& s = stats[i];
        os << cell(zn[i]) << ',' << cell(s.op_hat) << ',' << cell(s.lcr_hat) << ',' << cell(s.afd_hat) << ','
           << cell(s.lcr_smooth_hat) << ',' << cell(s.afd_smooth_hat) << ',' << s.upcrossings << ','
           << s.smooth_upcrossings << ',' << cell(s.stderr_op) << ',' << cell(s.stderr_lcr_smooth) << ','
           << cell(s.stderr_afd_smooth) << '\n';
    }
    sink.close();
    return kOk;
}

int cmd_validate(const SystemFlags& sf, const SimFlags& mf, const std::optional<std::string>& grid_text,
                 const std::string& out_path, int jobs, std::ostream& out, std::ostream& err) {
    const SystemConfig cfg = resolve_system(sf);
    const auto sim = resolve_sim(mf, cfg);
    const auto grid = grid_text ? parse_grid(*grid_text) : analytic::Grid{1e-2, 1e2, 9, true};
    const auto rep = montecarlo::validate_against_analytic(cfg, sim, grid.values(), jobs);

    Sink sink(out_path, out);
    auto& os = sink.stream();
    write_header(os, "validate", cfg);
    os << "# simulation: " << sim_json(sim, cfg).dump() << '\n';
    os << "# empirical lcr/afd count crossings made by continuous motion; lcr_all also counts selection jumps\n";
    os << "z_over_mu,statistic,analytic,empirical,stderr,counted,pass\n";
    auto line = [&](const montecarlo::ValidationRow& r, const char* name, const montecarlo::Check& c) {
        os << cell(r.z_over_mu) << ',' << name << ',' << cell(c.analytic) << ',' << cell(c.empirical) << ','
           << cell(c.stderr_) << ',' << (r.counted ? 1 : 0) << ',' << (c.pass ? "pass" : "fail") << '\n';
    };
    for (const auto& r : rep.rows) {
        line(r, "op", r.op);
        line(r, "lcr", r.lcr);
        line(r, "afd", r.afd);
        os << cell(r.z_over_mu) << ",lcr_all," << cell(r.lcr.analytic) << ',' << cell(r.empirical.lcr_hat) << ','
           << cell(r.empirical.stderr_lcr) << ",0,info\n";
    }
    const char* verdict = rep.insufficient ? "INSUFFICIENT" : (rep.all_pass() ? "PASS" : "FAIL");
    os << "# counted: " << rep.counted << ", failed: " << rep.failed << ", result: " << verdict << '\n';
    if (rep.insufficient) os << "# note: " << rep.note << '\n';
    sink.close();
    if (rep.insufficient) {
        err << "insufficient data: " << rep.note << '\n';
        return kInsufficientData;
    }
    if (!rep.all_pass()) {
        err << rep.failed << " counted threshold(s) outside max(3 se, 5%)\n";
        return kValidationFailed;
    }
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Outage, level crossing rate and fade duration of dual selection combining with "
                 "cochannel interference and noise in Nakagami-m fading"};
    app.name(args.empty() ? "divstats" : args[0]);
    app.require_subcommand(1);

    SystemFlags eval_sys, sweep_sys, sim_sys, val_sys;
    SimFlags sim_mc, val_mc;

    auto* eval = app.add_subcommand("eval", "Evaluate OP, LCR and AFD at one threshold");
    add_system_flags(eval, eval_sys);
    double eval_zmu = 0.0;
    double eval_z = 0.0;
    auto* o_zmu = eval->add_option("--z-over-mu", eval_zmu, "Threshold normalized by mu");
    auto* o_z = eval->add_option("--z", eval_z, "Absolute SINR threshold");
    o_zmu->excludes(o_z);

    auto* sweep = app.add_subcommand("sweep", "Write OP, LCR and AFD curves as CSV");
    add_system_flags(sweep, sweep_sys);
    std::string axis = "z_over_mu";
    std::string sweep_grid, sweep_out;
    double sweep_zmu = 1.0;
    int sweep_jobs = 1;
    sweep->add_option("--axis", axis, "Sweep axis")->check(CLI::IsMember({"z_over_mu", "n"}));
    auto* o_sweep_grid = sweep->add_option("--grid", sweep_grid, "lo:hi:points[:log]");
    sweep->add_option("--z-over-mu", sweep_zmu, "Fixed normalized threshold for --axis n");
    sweep->add_option("--out", sweep_out, "Output CSV path (default stdout)");
    sweep->add_option("--jobs", sweep_jobs, "Concurrent grid points")->check(CLI::PositiveNumber);

    auto* simulate = app.add_subcommand("simulate", "Simulate the combiner and measure empirical statistics");
    add_system_flags(simulate, sim_sys);
    add_sim_flags(simulate, sim_mc);
    std::string sim_grid, sim_out, sim_trace;
    auto* o_sim_grid = simulate->add_option("--grid", sim_grid, "Thresholds z/mu, lo:hi:points[:log]");
    simulate->add_option("--out", sim_out, "Output CSV path (default stdout)");
    simulate->add_option("--trace", sim_trace, "Also export the trace (.csv, otherwise FTRC binary)");

    auto* validate_cmd = app.add_subcommand("validate", "Compare the closed forms with simulation");
    add_system_flags(validate_cmd, val_sys);
    add_sim_flags(validate_cmd, val_mc);
    std::string val_grid, val_out;
    int val_jobs = 1;
    auto* o_val_grid = validate_cmd->add_option("--grid", val_grid, "Thresholds z/mu, lo:hi:points[:log]");
    validate_cmd->add_option("--out", val_out, "Report path (default stdout)");
    validate_cmd->add_option("--jobs", val_jobs, "Concurrent segments")->check(CLI::PositiveNumber);

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidInput;
    }

    auto opt_grid = [](CLI::Option* o, const std::string& v) {
        return o->count() ? std::optional<std::string>(v) : std::nullopt;
    };
    try {
        if (*eval) {
            if (!o_zmu->count() && !o_z->count()) {
                err << "error: eval needs --z-over-mu or --z\n";
                return kInvalidInput;
            }
            return cmd_eval(eval_sys, o_zmu->count() ? std::optional(eval_zmu) : std::nullopt,
                            o_z->count() ? std::optional(eval_z) : std::nullopt, out);
        }
        if (*sweep) {
            return cmd_sweep(sweep_sys, axis, opt_grid(o_sweep_grid, sweep_grid), sweep_zmu, sweep_out, sweep_jobs,
                             out, err);
        }
        if (*simulate) return cmd_simulate(sim_sys, sim_mc, opt_grid(o_sim_grid, sim_grid), sim_out, sim_trace, out);
        if (*validate_cmd) {
            return cmd_validate(val_sys, val_mc, opt_grid(o_val_grid, val_grid), val_out, val_jobs, out, err);
        }
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const RegimeError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const InsufficientData& e) {
        err << "insufficient data: " << e.what() << '\n';
        return kInsufficientData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kInvalidInput;
}

} // namespace divstats::cli
