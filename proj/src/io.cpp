#include "garchmc/io.hpp"

#include "garchmc/error.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace garchmc {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> to_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return in;
}

}  // namespace

ReturnSeries parse_returns(std::istream& in) {
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = trim(line);
        if (line_no == 1 && !text.empty() && text.front() == '#') continue;
        if (text.empty()) {
            throw ValidationError(fmt::format("returns file line {}: empty line", line_no));
        }
        const auto v = to_double(text);
        if (!v) {
            throw ValidationError(fmt::format("returns file line {}: cannot parse '{}' as a number",
                                              line_no, text));
        }
        if (!std::isfinite(*v)) {
            throw ValidationError(fmt::format("returns file line {}: non-finite value", line_no));
        }
        values.push_back(*v);
    }
    return ReturnSeries(std::move(values));
}

ReturnSeries read_returns(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_returns(in);
}

void write_returns(std::ostream& out, std::span<const double> values, std::string_view header) {
    if (!header.empty()) out << "# " << header << '\n';
    for (double v : values) out << fmt::format("{}\n", v);
}

void write_chain_csv(std::ostream& out, const Chain& chain) {
    if (chain.dim() != kGarchDim) throw ValidationError("chain CSV holds 3-parameter GARCH chains only");
    out << kChainHeader << '\n';
    for (std::size_t i = 0; i < chain.size(); ++i) {
        out << fmt::format("{},{},{},{},{}\n", i + 1, chain.value(i, kAlphaIndex),
                           chain.value(i, kBetaIndex), chain.value(i, kOmegaIndex),
                           chain.accepted(i) ? 1 : 0);
    }
}

Chain parse_chain_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kChainHeader) {
        throw ValidationError(fmt::format("chain file line 1: expected header '{}'", kChainHeader));
    }
    Chain chain(kGarchDim);
    Eigen::VectorXd theta(kGarchDim);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = trim(line);
        if (text.empty()) continue;
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = text.find(',', start);
            fields.push_back(text.substr(start, comma == std::string_view::npos ? comma : comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 5) {
            throw ValidationError(fmt::format("chain file line {}: expected 5 fields, got {}", line_no,
                                              fields.size()));
        }
        for (std::size_t c = 0; c < kGarchDim; ++c) {
            const auto v = to_double(fields[c + 1]);
            if (!v || !std::isfinite(*v)) {
                throw ValidationError(fmt::format("chain file line {}: bad value '{}'", line_no, fields[c + 1]));
            }
            theta[static_cast<Eigen::Index>(c)] = *v;
        }
        const std::string_view flag = trim(fields[4]);
        if (flag != "0" && flag != "1") {
            throw ValidationError(fmt::format("chain file line {}: accepted must be 0 or 1", line_no));
        }
        chain.push(theta, std::nan(""), flag == "1");
    }
    return chain;
}

Chain read_chain_csv(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_chain_csv(in);
}

// JSON mapping ---------------------------------------------------------------

namespace {

using nlohmann::json;

template <typename T>
json optional_to_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from_json(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    return v.get<T>();
}

json to_json(const ParameterSummary& p) {
    return json{{"name", p.name},
                {"mean", p.mean},
                {"std_dev", p.std_dev},
                {"tau", optional_to_json(p.tau)},
                {"stat_error", optional_to_json(p.stat_error)},
                {"two_tau", optional_to_json(p.two_tau)},
                {"two_tau_error", optional_to_json(p.two_tau_error)},
                {"mean_jackknife_error", optional_to_json(p.mean_jackknife_error)},
                {"degenerate", p.degenerate}};
}

ParameterSummary parameter_from_json(const json& j) {
    ParameterSummary p;
    p.name = j.at("name").get<std::string>();
    p.mean = j.at("mean").get<double>();
    p.std_dev = j.at("std_dev").get<double>();
    p.tau = optional_from_json<double>(j, "tau");
    p.stat_error = optional_from_json<double>(j, "stat_error");
    p.two_tau = optional_from_json<double>(j, "two_tau");
    p.two_tau_error = optional_from_json<double>(j, "two_tau_error");
    p.mean_jackknife_error = optional_from_json<double>(j, "mean_jackknife_error");
    p.degenerate = j.at("degenerate").get<bool>();
    return p;
}

}  // namespace

std::string serialize(const FitReport& r) {
    json params = json::array();
    for (const auto& p : r.summary.parameters) params.push_back(to_json(p));

    const json schedule{{"burn_in", r.schedule.burn_in},
                        {"pilot", r.schedule.pilot},
                        {"refresh_interval", r.schedule.refresh_interval},
                        {"draws", r.schedule.draws},
                        {"nu", optional_to_json(r.schedule.nu)},
                        {"step_widths", r.schedule.step_widths},
                        {"tuning_converged", r.schedule.tuning_converged},
                        {"tuning_acceptance", r.schedule.tuning_acceptance}};

    // nlohmann::json keeps keys sorted, so the layout is stable.
    json j{{"method", r.method},
           {"seed", r.seed},
           {"observations", r.observations},
           {"schedule", schedule},
           {"draws", r.summary.draws},
           {"acceptance", r.summary.acceptance},
           {"parameters", params},
           {"moment_mean", r.moment_mean},
           {"V", r.V},
           {"acceptance_trace", r.acceptance_trace},
           {"final_acceptance", r.final_acceptance}};
    if (r.wall_clock_seconds) j["wall_clock_seconds"] = *r.wall_clock_seconds;
    return j.dump(2) + "\n";
}

FitReport parse_fit_report(std::string_view text) {
    try {
        const json j = json::parse(text);
        FitReport r;
        r.method = j.at("method").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.observations = j.at("observations").get<std::size_t>();

        const json& s = j.at("schedule");
        r.schedule.burn_in = s.at("burn_in").get<std::size_t>();
        r.schedule.pilot = s.at("pilot").get<std::size_t>();
        r.schedule.refresh_interval = s.at("refresh_interval").get<std::size_t>();
        r.schedule.draws = s.at("draws").get<std::size_t>();
        r.schedule.nu = optional_from_json<double>(s, "nu");
        r.schedule.step_widths = s.at("step_widths").get<std::vector<double>>();
        r.schedule.tuning_converged = s.at("tuning_converged").get<bool>();
        r.schedule.tuning_acceptance = s.at("tuning_acceptance").get<double>();

        r.summary.draws = j.at("draws").get<std::size_t>();
        r.summary.acceptance = j.at("acceptance").get<double>();
        for (const auto& p : j.at("parameters")) r.summary.parameters.push_back(parameter_from_json(p));

        r.moment_mean = j.at("moment_mean").get<std::vector<double>>();
        r.V = j.at("V").get<std::vector<std::vector<double>>>();
        r.acceptance_trace = j.at("acceptance_trace").get<std::vector<double>>();
        r.final_acceptance = j.at("final_acceptance").get<double>();
        if (j.contains("wall_clock_seconds")) r.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed fit report: ") + e.what());
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out) throw IoError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into place at '" + path.string() + "'");
    }
}

std::string read_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace garchmc
