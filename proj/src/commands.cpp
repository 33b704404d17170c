#include "garchmc/commands.hpp"

#include "garchmc/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <functional>
#include <ostream>
#include <sstream>

namespace garchmc {

namespace {

std::string trimmed(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& raw) {
    const std::string value = trimmed(raw);
    T out{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ValidationError(fmt::format("invalid value '{}' for '{}'", raw, key));
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& raw) {
    const std::string v = trimmed(raw);
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ValidationError(fmt::format("invalid boolean '{}' for '{}'", raw, key));
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(raw);
    while (std::getline(in, item, ',')) {
        std::istringstream words(item);
        std::string word;
        while (words >> word) out.push_back(parse_number<double>(key, word));
    }
    if (out.empty()) throw ValidationError(fmt::format("'{}' needs at least one value", key));
    return out;
}

std::vector<std::vector<double>> to_rows(const Eigen::MatrixXd& m) {
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) rows[static_cast<std::size_t>(i)].push_back(m(i, j));
    }
    return rows;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void require_path(const std::string& value, const char* what) {
    if (value.empty()) throw ValidationError(fmt::format("missing required {}", what));
}

int guarded(const std::function<int()>& body, std::ostream& err) {
    try {
        return body();
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "I/O error: " << e.what() << '\n';
        return kExitIo;
    }
}

void print_summary(std::ostream& log, const ChainSummary& s) {
    log << fmt::format("{:<7} {:>12} {:>10} {:>11} {:>9} {:>8}\n", "param", "mean", "std_dev",
                       "stat_error", "2tau", "+/-");
    for (const auto& p : s.parameters) {
        if (p.degenerate) {
            log << fmt::format("{:<7} {:>12.6g} {:>10.3g}  degenerate (zero variance)\n", p.name, p.mean,
                               p.std_dev);
            continue;
        }
        log << fmt::format("{:<7} {:>12.6g} {:>10.3g} {:>11.3g} {:>9.4g} {:>8.3g}\n", p.name, p.mean,
                           p.std_dev, p.stat_error.value_or(0.0), p.two_tau.value_or(0.0),
                           p.two_tau_error.value_or(0.0));
    }
    log << fmt::format("draws {}  acceptance {:.4f}\n", s.draws, s.acceptance);
}

}  // namespace

std::size_t RunConfig::resolved_draws() const {
    if (draws) return *draws;
    return method == "metropolis" ? kMetropolisDefaultDraws : kAdaptiveDefaultDraws;
}

AdaptiveConfig RunConfig::adaptive() const {
    AdaptiveConfig a;
    a.burn_in = burn_in;
    a.pilot = pilot;
    a.refresh_interval = refresh_interval;
    a.analysis_draws = resolved_draws();
    a.nu = nu;
    a.seed = seed;
    return a;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "alpha", "beta",   "omega",    "n",       "seed",          "method", "nu",
        "burn-in", "pilot", "refresh-interval", "draws", "blocks", "nu-list", "max-lag",
        "record-timing", "input", "out", "chain-out"};
    return keys;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "alpha") cfg.alpha = parse_number<double>(key, value);
    else if (key == "beta") cfg.beta = parse_number<double>(key, value);
    else if (key == "omega") cfg.omega = parse_number<double>(key, value);
    else if (key == "n") cfg.n = parse_number<std::size_t>(key, value);
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "method") {
        const std::string m = trimmed(value);
        if (m != "adaptive" && m != "metropolis") {
            throw ValidationError("method must be 'adaptive' or 'metropolis', got '" + m + "'");
        }
        cfg.method = m;
    }
    else if (key == "nu") cfg.nu = parse_number<double>(key, value);
    else if (key == "burn-in") cfg.burn_in = parse_number<std::size_t>(key, value);
    else if (key == "pilot") cfg.pilot = parse_number<std::size_t>(key, value);
    else if (key == "refresh-interval") cfg.refresh_interval = parse_number<std::size_t>(key, value);
    else if (key == "draws") cfg.draws = parse_number<std::size_t>(key, value);
    else if (key == "blocks") cfg.blocks = parse_number<std::size_t>(key, value);
    else if (key == "nu-list") cfg.nu_list = parse_list(key, value);
    else if (key == "max-lag") cfg.max_lag = parse_number<std::size_t>(key, value);
    else if (key == "record-timing") cfg.record_timing = parse_bool(key, value);
    else if (key == "input") cfg.input = trimmed(value);
    else if (key == "out") cfg.out = trimmed(value);
    else if (key == "chain-out") cfg.chain_out = trimmed(value);
    else throw ValidationError("unknown configuration key '" + key + "'");
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trimmed(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ValidationError(fmt::format("config line {}: expected key=value", line_no));
        }
        std::string key = trimmed(t.substr(0, eq));
        if (key.rfind("--", 0) == 0) key.erase(0, 2);
        out[key] = trimmed(t.substr(eq + 1));
    }
    return out;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
    return parse_config_text(read_file(path));
}

RunConfig resolve_config(const std::map<std::string, std::string>& file_values,
                         const std::map<std::string, std::string>& flag_values) {
    RunConfig cfg;
    for (const auto& [k, v] : file_values) apply_setting(cfg, k, v);
    for (const auto& [k, v] : flag_values) apply_setting(cfg, k, v);
    return cfg;
}

double final_acceptance(const std::vector<double>& trace) {
    if (trace.empty()) return 0.0;
    const std::size_t k = std::min<std::size_t>(10, trace.size());
    double s = 0.0;
    for (std::size_t i = trace.size() - k; i < trace.size(); ++i) s += trace[i];
    return s / static_cast<double>(k);
}

FitOutcome fit(const ReturnSeries& y, const RunConfig& cfg) {
    if (cfg.method != "adaptive" && cfg.method != "metropolis") {
        throw ValidationError("method must be 'adaptive' or 'metropolis'");
    }
    if (cfg.blocks < 2) throw ValidationError("blocks must be >= 2");

    const TuneResult tuned = tune_step_widths(y, default_garch_metropolis_config(), cfg.seed);

    FitReport report;
    report.method = cfg.method;
    report.seed = cfg.seed;
    report.observations = y.size();
    report.schedule.burn_in = cfg.burn_in;
    report.schedule.draws = cfg.resolved_draws();
    report.schedule.step_widths = to_std(tuned.config.step_widths);
    report.schedule.tuning_converged = tuned.converged;
    report.schedule.tuning_acceptance = tuned.acceptance;

    std::optional<Chain> chain;
    if (cfg.method == "adaptive") {
        const AdaptiveConfig acfg = cfg.adaptive();
        AdaptiveResult result = run_adaptive(y, acfg, tuned.config);
        report.schedule.pilot = acfg.pilot;
        report.schedule.refresh_interval = acfg.refresh_interval;
        report.schedule.nu = acfg.nu;
        report.moment_mean = to_std(result.moments.mean());
        report.V = to_rows(result.moments.V());
        chain.emplace(std::move(result.chain));
    } else {
        chain.emplace(run_metropolis(y, tuned.config, cfg.burn_in, cfg.resolved_draws(), cfg.seed));
        MomentAccumulator moments(kGarchDim);
        for (std::size_t i = 0; i < chain->size(); ++i) moments.accumulate(chain->draw(i));
        report.moment_mean = to_std(moments.mean());
        report.V = to_rows(moments.V());
    }

    report.acceptance_trace = chain->acceptance_trace;
    report.final_acceptance = final_acceptance(report.acceptance_trace);
    report.summary = summarize(*chain, garch_parameter_names(), cfg.blocks);
    return FitOutcome{std::move(report), std::move(*chain)};
}

std::uint64_t sweep_seed(std::uint64_t base, std::size_t index) { return base + index; }

std::string sweep_report_name(double nu) { return fmt::format("report_nu{}.json", nu); }

int cmd_simulate(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
    return guarded([&] {
        if (cfg.n == 0) throw ValidationError("--n must be >= 1");
        const GarchParams params{cfg.omega, cfg.alpha, cfg.beta};
        params.validate();
        require_path(cfg.out, "--out path");

        const std::vector<double> y = simulate(params, cfg.n, cfg.seed);
        std::ostringstream body;
        write_returns(body, y,
                      fmt::format("garch(1,1) alpha={} beta={} omega={} n={} seed={}", cfg.alpha,
                                  cfg.beta, cfg.omega, cfg.n, cfg.seed));
        write_file_atomic(cfg.out, body.str());
        log << fmt::format("simulated {} returns with alpha={} beta={} omega={} seed={} -> {}\n", cfg.n,
                           cfg.alpha, cfg.beta, cfg.omega, cfg.seed, cfg.out);
        return static_cast<int>(kExitOk);
    }, err);
}

int cmd_fit(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
    return guarded([&] {
        require_path(cfg.input, "input returns file");
        require_path(cfg.out, "--out path");
        cfg.adaptive().validate();
        const ReturnSeries y = read_returns(cfg.input);

        const auto started = std::chrono::steady_clock::now();
        FitOutcome outcome = fit(y, cfg);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        if (cfg.record_timing) outcome.report.wall_clock_seconds = seconds;

        write_file_atomic(cfg.out, serialize(outcome.report));
        if (!cfg.chain_out.empty()) {
            std::ostringstream csv;
            write_chain_csv(csv, outcome.chain);
            write_file_atomic(cfg.chain_out, csv.str());
        }

        log << fmt::format("{} fit, seed {}, {} observations, {:.1f} s\n", cfg.method, cfg.seed,
                           y.size(), seconds);
        if (!outcome.report.schedule.tuning_converged) {
            err << fmt::format("warning: Metropolis width tuning did not reach the acceptance band "
                               "(best {:.3f})\n",
                               outcome.report.schedule.tuning_acceptance);
        }
        print_summary(log, outcome.report.summary);
        if (outcome.report.summary.degenerate()) {
            err << "degenerate chain: at least one parameter never moved; report written with "
                   "degenerate flags\n";
            return static_cast<int>(kExitNumeric);
        }
        return static_cast<int>(kExitOk);
    }, err);
}

int cmd_diagnose(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
    return guarded([&] {
        require_path(cfg.input, "input chain file");
        require_path(cfg.out, "--out directory");
        if (cfg.refresh_interval == 0) throw ValidationError("--refresh-interval must be >= 1");
        const Chain chain = read_chain_csv(cfg.input);
        if (chain.size() <= cfg.max_lag) {
            throw ValidationError(fmt::format("chain of {} draws is too short for max lag {}",
                                              chain.size(), cfg.max_lag));
        }
        const auto names = garch_parameter_names();

        std::vector<AcfSeries> acfs;
        std::vector<std::vector<double>> columns;
        for (std::size_t c = 0; c < kGarchDim; ++c) {
            columns.push_back(chain.column(c));
            acfs.push_back(acf(columns.back(), cfg.max_lag));
        }

        std::ostringstream acf_csv;
        acf_csv << "lag,alpha,beta,omega\n";
        for (std::size_t t = 0; t <= cfg.max_lag; ++t) {
            acf_csv << fmt::format("{},{},{},{}\n", t, acfs[0].values[t], acfs[1].values[t],
                                   acfs[2].values[t]);
        }

        auto strided = [&](std::size_t stride, bool with_step) {
            std::ostringstream csv;
            csv << (with_step ? "step,alpha,beta,omega\n" : "alpha,beta,omega\n");
            for (std::size_t i = 0; i < chain.size(); i += stride) {
                if (with_step) csv << (i + 1) << ',';
                csv << fmt::format("{},{},{}\n", chain.value(i, 0), chain.value(i, 1), chain.value(i, 2));
            }
            return csv.str();
        };
        const std::string history = strided(std::max<std::size_t>(1, chain.size() / 2000), true);
        const std::string scatter = strided(std::max<std::size_t>(1, chain.size() / 5000), false);

        std::ostringstream v_csv;
        v_csv << "draws,V11,V12,V13,V22,V23,V33\n";
        MomentAccumulator moments(kGarchDim);
        for (std::size_t i = 0; i < chain.size(); ++i) {
            moments.accumulate(chain.draw(i));
            if ((i + 1) % cfg.refresh_interval == 0 || i + 1 == chain.size()) {
                const Eigen::MatrixXd V = moments.V();
                v_csv << fmt::format("{},{},{},{},{},{},{}\n", i + 1, V(0, 0), V(0, 1), V(0, 2), V(1, 1),
                                     V(1, 2), V(2, 2));
            }
        }

        const std::filesystem::path dir(cfg.out);
        std::filesystem::create_directories(dir);
        write_file_atomic(dir / "acf.csv", acf_csv.str());
        write_file_atomic(dir / "history.csv", history);
        write_file_atomic(dir / "v_trace.csv", v_csv.str());
        write_file_atomic(dir / "scatter.csv", scatter);

        for (std::size_t c = 0; c < kGarchDim; ++c) {
            const double tau = integrated_autocorrelation_time(acfs[c]);
            log << fmt::format("{:<6} ACF(1)={:.4f} ACF({})={:.4f} 2tau(window<= {})={:.4g}\n", names[c],
                               acfs[c].values[1], cfg.max_lag, acfs[c].values[cfg.max_lag], cfg.max_lag,
                               2.0 * tau);
        }
        log << "wrote acf.csv history.csv v_trace.csv scatter.csv to " << dir.string() << '\n';
        return static_cast<int>(kExitOk);
    }, err);
}

int cmd_sweep_nu(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
    return guarded([&] {
        require_path(cfg.input, "input returns file");
        require_path(cfg.out, "--out directory");
        if (cfg.nu_list.empty()) throw ValidationError("--nu-list is empty");
        for (double nu : cfg.nu_list) {
            if (!(nu > 2.0)) throw ValidationError(fmt::format("every nu must be > 2 (got {})", nu));
        }
        RunConfig base = cfg;
        base.method = "adaptive";
        base.adaptive().validate();
        const ReturnSeries y = read_returns(cfg.input);
        const std::filesystem::path dir(cfg.out);
        std::filesystem::create_directories(dir);

        struct Row {
            double nu;
            std::uint64_t seed;
            FitReport report;
        };
        std::vector<Row> rows;
        int status = kExitOk;
        for (std::size_t i = 0; i < cfg.nu_list.size(); ++i) {
            RunConfig run = base;
            run.nu = cfg.nu_list[i];
            run.seed = sweep_seed(cfg.seed, i);
            try {
                FitOutcome outcome = fit(y, run);
                write_file_atomic(dir / sweep_report_name(run.nu), serialize(outcome.report));
                log << fmt::format("nu={} seed={} final acceptance {:.3f}\n", run.nu, run.seed,
                                   outcome.report.final_acceptance);
                rows.push_back(Row{run.nu, run.seed, std::move(outcome.report)});
            } catch (const std::exception& e) {
                err << fmt::format("nu={} failed: {}\n", run.nu, e.what());
                status = kExitNumeric;
            }
        }

        std::ostringstream table;
        table << "nu,seed";
        for (const auto& name : garch_parameter_names()) {
            table << fmt::format(",{0}_mean,{0}_std_dev,{0}_stat_error,{0}_mean_jackknife_error,{0}_two_tau,"
                                 "{0}_two_tau_error",
                                 name);
        }
        table << ",final_acceptance\n";
        for (const auto& row : rows) {
            table << fmt::format("{},{}", row.nu, row.seed);
            for (const auto& p : row.report.summary.parameters) {
                auto opt = [](const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string(); };
                table << fmt::format(",{},{},{},{},{},{}", p.mean, p.std_dev, opt(p.stat_error),
                                     opt(p.mean_jackknife_error), opt(p.two_tau), opt(p.two_tau_error));
            }
            table << fmt::format(",{}\n", row.report.final_acceptance);
        }

        std::ostringstream traces;
        traces << "window";
        std::size_t longest = 0;
        for (const auto& row : rows) {
            traces << fmt::format(",nu{}", row.nu);
            longest = std::max(longest, row.report.acceptance_trace.size());
        }
        traces << '\n';
        for (std::size_t w = 0; w < longest; ++w) {
            traces << (w + 1);
            for (const auto& row : rows) {
                traces << ',';
                if (w < row.report.acceptance_trace.size()) traces << fmt::format("{}", row.report.acceptance_trace[w]);
            }
            traces << '\n';
        }

        write_file_atomic(dir / "sweep.csv", table.str());
        write_file_atomic(dir / "acceptance.csv", traces.str());
        log << fmt::format("wrote {} reports, sweep.csv and acceptance.csv to {}\n", rows.size(), dir.string());
        return status;
    }, err);
}

}  // namespace garchmc
