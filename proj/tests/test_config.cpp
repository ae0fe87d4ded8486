#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include "tube/config.hpp"
#include "tube/errors.hpp"

using namespace tube;

namespace {

std::string error_of(auto&& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("full tube config") {
    auto cfg = parse_config(R"(
mode = "spectrum"
[curve]
dim = 3
length = 2.0
kind = "sine"
amplitude = 1.0
frequency = 1.5
[[curve.higher]]
kind = "constant"
value = 0.5
[cross_section]
kind = "rectangle"
sides = [2.0, 2.0]
[sweep]
eps = [0.2, 0.1]
n = 2
[grid]
s_nodes = 50
t_nodes = [10, 12]
[solver]
tol = 1e-10
seed = 7
[output]
dir = "out/x"
export_matrices = true
floor = false
)");
    validate_run_config(cfg);
    CHECK(cfg.mode == "spectrum");
    const auto& s = cfg.sweep;
    REQUIRE(s.curve);
    CHECK(s.curve->dim() == 3);
    CHECK(s.curve->length() == 2.0);
    CHECK(s.curve->kappa(2, 0.3) == 0.5);
    CHECK(s.curve->kappa(1, 0.3) == doctest::Approx(std::sin(0.45)));
    CHECK(s.omega.sides() == std::vector<double>{2.0, 2.0});
    CHECK(s.eps == std::vector<double>{0.2, 0.1});
    CHECK(s.n == 2);
    CHECK(s.t_nodes == std::vector<std::size_t>{10, 12});
    CHECK(s.solver.tol == 1e-10);
    CHECK(s.solver.seed == 7);
    CHECK_FALSE(s.compute_floor);
    CHECK(s.check_bracket);
    CHECK(cfg.output.export_matrices);
    CHECK(cfg.output.dir == "out/x");
}

TEST_CASE("surface config") {
    auto cfg = parse_config(R"(
[surface]
length = 3.0
[surface.kappa]
kind = "constant"
value = 0.2
[surface.gauss]
kind = "product"
amplitude = 1.0
frequency = 2.0
slope = 0.5
[sweep]
eps = [0.2, 0.1, 0.05]
)");
    validate_run_config(cfg);
    CHECK(cfg.sweep.kind == GeometryKind::Surface);
    REQUIRE(cfg.sweep.surface);
    CHECK(cfg.sweep.surface->gauss.value(0.0, 1.0) == doctest::Approx(1.5));
    CHECK(cfg.sweep.length() == 3.0);
}

TEST_CASE("diagnostics carry line and field") {
    auto msg = error_of([] {
        parse_config("mode = \"sweep\"\n[curve]\nkind = \"constant\"\nvalue = \"one\"\n", ".", "bad.toml");
    });
    CHECK(msg.find("bad.toml:4") != std::string::npos);
    CHECK(msg.find("curve.value") != std::string::npos);

    auto syntax = error_of([] { parse_config("[curve\nkind = 1\n", ".", "broken.toml"); });
    CHECK(syntax.find("broken.toml:1") != std::string::npos);

    auto kind = error_of([] { parse_config("[curve]\nkind = \"spiral\"\n", ".", "k.toml"); });
    CHECK(kind.find("k.toml:2") != std::string::npos);
    CHECK(kind.find("curve.kind") != std::string::npos);
}

TEST_CASE("validation rules") {
    auto base = [] { return parse_config("[curve]\nkind = \"constant\"\nvalue = 1.0\n[sweep]\neps = [0.2, 0.1, 0.05]\n"); };
    CHECK_NOTHROW(validate_run_config(base()));

    auto c = base();
    c.sweep.eps = {0.1, 0.2, 0.05};
    CHECK(error_of([&] { validate_run_config(c); }).find("decreasing") != std::string::npos);
    c = base();
    c.sweep.eps = {0.2, 0.1, 0.1};
    CHECK_THROWS_AS(validate_run_config(c), ConfigError);
    c = base();
    c.sweep.eps = {0.2, 0.1, -0.05};
    CHECK_THROWS_AS(validate_run_config(c), ConfigError);
    c = base();
    c.sweep.n = 0;
    CHECK_THROWS_AS(validate_run_config(c), ConfigError);
    c = base();
    c.sweep.s_nodes = 7;
    CHECK_THROWS_AS(validate_run_config(c), ConfigError);
    c = base();
    c.sweep.t_nodes = {7};
    CHECK_THROWS_AS(validate_run_config(c), ConfigError);
    c = base();
    c.mode = "plot";
    CHECK_THROWS_AS(validate_run_config(c), ConfigError);
    c = base();
    c.sweep.eps = {0.2, 0.1};
    CHECK_THROWS_AS(validate_run_config(c), ConfigError);
    c.mode = "spectrum";
    CHECK_NOTHROW(validate_run_config(c));

    auto mismatch = parse_config("[curve]\ndim = 3\nkind = \"constant\"\n[[curve.higher]]\nvalue = 1.0\n"
                                 "[cross_section]\nkind = \"interval\"\n[sweep]\neps = [0.1]\n");
    mismatch.mode = "spectrum";
    CHECK(error_of([&] { validate_run_config(mismatch); }).find("cross_section") != std::string::npos);
}

TEST_CASE("sampled curvature from CSV") {
    auto dir = std::filesystem::temp_directory_path() / "tube_config_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream csv(dir / "kappa.csv");
        csv.precision(17);
        csv << "s,kappa\n";
        for (int i = 0; i <= 40; ++i) {
            double s = std::numbers::pi * i / 40.0;
            csv << s << ',' << std::sin(s) << '\n';
        }
    }
    {
        std::ofstream toml(dir / "run.toml");
        toml << "[curve]\nkind = \"sampled\"\nfile = \"kappa.csv\"\nlength = " << std::numbers::pi
             << "\n[sweep]\neps = [0.1]\n";
    }
    auto cfg = load_config(dir / "run.toml");
    CHECK(cfg.sweep.curve->kappa1().value(1.0) == doctest::Approx(std::sin(1.0)).epsilon(1e-5));

    std::ofstream(dir / "bad.toml") << "[curve]\nkind = \"sampled\"\nfile = \"missing.csv\"\n";
    CHECK(error_of([&] { load_config(dir / "bad.toml"); }).find("curve.file") != std::string::npos);
    CHECK_THROWS_AS(load_config(dir / "nope.toml"), ConfigError);
}

TEST_CASE("eps lists from the command line") {
    CHECK(parse_eps_list("0.2,0.1, 0.05") == std::vector<double>{0.2, 0.1, 0.05});
    CHECK_THROWS_AS(parse_eps_list("0.2,abc"), ConfigError);
    CHECK_THROWS_AS(parse_eps_list("0.2,-1"), ConfigError);
}

}
