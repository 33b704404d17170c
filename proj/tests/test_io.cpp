#include "catch_amalgamated.hpp"

#include "garchmc/error.hpp"
#include "garchmc/io.hpp"

#include <filesystem>
#include <random>
#include <sstream>

using namespace garchmc;

namespace {

std::string error_of(const std::string& text) {
    std::istringstream in(text);
    try {
        (void)parse_returns(in);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

FitReport random_report(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FitReport r;
    r.method = "adaptive";
    r.seed = rng();
    r.observations = 2000;
    r.schedule = ScheduleEcho{3000, 1000, 1000, 199000, 10.0, {u(rng), u(rng), u(rng)}, true, 0.61};
    r.summary.draws = 199000;
    r.summary.acceptance = 0.79;
    for (const auto& name : garch_parameter_names()) {
        ParameterSummary p;
        p.name = name;
        p.mean = u(rng);
        p.std_dev = std::abs(u(rng));
        p.tau = 1.0 + std::abs(u(rng));
        p.two_tau = 2.0 * *p.tau;
        p.stat_error = u(rng) * 1e-5;
        p.two_tau_error = std::abs(u(rng)) / 3.0;
        p.mean_jackknife_error = std::nullopt;
        r.summary.parameters.push_back(p);
    }
    r.moment_mean = {u(rng), u(rng), u(rng)};
    r.V = {{u(rng) * 1e-4, u(rng), u(rng)}, {u(rng), 1e-300, u(rng)}, {u(rng), u(rng), 5e-324}};
    for (int i = 0; i < 50; ++i) r.acceptance_trace.push_back((u(rng) + 1.0) / 2.0);
    r.final_acceptance = 0.1 + 0.2;
    if (rng() % 2 == 0) r.wall_clock_seconds = 3.25;
    return r;
}

}  // namespace

TEST_CASE("returns file parsing", "[io]") {
    std::istringstream with_header("# garch(1,1) alpha=0.1\n0.5\n-1.25\n3e-2\n");
    const auto y = parse_returns(with_header);
    CHECK(y.size() == 3);
    CHECK(y[1] == -1.25);
    CHECK(y[2] == 0.03);

    std::istringstream crlf("1.0\r\n-2.0\r\n");
    CHECK(parse_returns(crlf).size() == 2);

    CHECK(error_of("0.1\nabc\n0.2\n").find("line 2") != std::string::npos);
    CHECK(error_of("0.1\n0.2\n\n0.3\n").find("line 3") != std::string::npos);
    CHECK(error_of("0.1\nnan\n").find("line 2") != std::string::npos);
    CHECK(error_of("0.1\ninf\n").find("line 2") != std::string::npos);
    CHECK(error_of("# h\n# second header\n").find("line 2") != std::string::npos);
    CHECK_FALSE(error_of("0\n0\n").empty());
    CHECK_FALSE(error_of("# only header\n").empty());

    CHECK_THROWS_AS(read_returns("/nonexistent/returns.txt"), IoError);
}

TEST_CASE("returns round trip is exact", "[io]") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    std::vector<double> values(500);
    for (auto& v : values) v = normal(rng) * std::pow(10.0, normal(rng) * 3);
    std::stringstream buf;
    write_returns(buf, values, "header text");
    CHECK(buf.str().rfind("# header text\n", 0) == 0);
    const auto back = parse_returns(buf);
    CHECK(std::vector<double>(back.values().begin(), back.values().end()) == values);
}

TEST_CASE("chain CSV round trip", "[io]") {
    Chain chain(3);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 300; ++i) chain.push(Eigen::Vector3d(u(rng), u(rng), u(rng) * 1e-7), 0.0, u(rng) < 0.7);
    std::stringstream buf;
    write_chain_csv(buf, chain);
    const std::string text = buf.str();
    CHECK(text.rfind("step,alpha,beta,omega,accepted\n1,", 0) == 0);

    const Chain back = parse_chain_csv(buf);
    REQUIRE(back.size() == chain.size());
    for (std::size_t k = 0; k < 3; ++k) CHECK(back.column(k) == chain.column(k));
    CHECK(back.accept_flags() == chain.accept_flags());

    std::istringstream bad_header("a,b,c\n");
    CHECK_THROWS_AS(parse_chain_csv(bad_header), ValidationError);
    std::istringstream bad_row("step,alpha,beta,omega,accepted\n1,0.1,0.8,0.1,1\n2,0.1,0.8\n");
    try {
        (void)parse_chain_csv(bad_row);
        FAIL("expected a parse error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    std::istringstream bad_flag("step,alpha,beta,omega,accepted\n1,0.1,0.8,0.1,2\n");
    CHECK_THROWS_AS(parse_chain_csv(bad_flag), ValidationError);

    Chain wrong_dim(2);
    CHECK_THROWS_AS(write_chain_csv(buf, wrong_dim), ValidationError);
}

TEST_CASE("fit report serialization is lossless", "[io]") {
    std::mt19937_64 rng(99);
    for (int rep = 0; rep < 20; ++rep) {
        const FitReport r = random_report(rng);
        const std::string text = serialize(r);
        const FitReport back = parse_fit_report(text);
        CHECK(back == r);
        CHECK(serialize(back) == text);
    }

    FitReport metro = random_report(rng);
    metro.method = "metropolis";
    metro.schedule.nu = std::nullopt;
    metro.summary.parameters[1] = ParameterSummary{"beta", 0.8, 0.0, {}, {}, {}, {}, {}, true};
    CHECK(parse_fit_report(serialize(metro)) == metro);

    CHECK_THROWS_AS(parse_fit_report("{not json"), ValidationError);
    CHECK_THROWS_AS(parse_fit_report("{\"method\": \"adaptive\"}"), ValidationError);
}

TEST_CASE("atomic writes", "[io]") {
    const auto dir = std::filesystem::temp_directory_path() / "garchmc_io_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "out.txt";
    write_file_atomic(path, "first\n");
    write_file_atomic(path, "second\n");
    CHECK(read_file(path) == "second\n");
    CHECK_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
    CHECK_THROWS_AS(write_file_atomic(dir / "missing" / "x.txt", "x"), IoError);
    CHECK_THROWS_AS(read_file(dir / "missing.txt"), IoError);
    std::filesystem::remove_all(dir);
}
