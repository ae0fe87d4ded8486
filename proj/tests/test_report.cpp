#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <sstream>
#include <string>

#include "tube/format.hpp"
#include "tube/report.hpp"

using namespace tube;

namespace {

SweepConfig small_config() {
    SweepConfig c;
    c.curve = CurveSpec(2, std::numbers::pi, CurvatureProfile::constant(1.0));
    c.eps = {0.2, 0.1, 0.05};
    c.n = 2;
    c.s_nodes = 40;
    c.t_nodes = {12};
    c.check_bracket = false;
    return c;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("number formatting round-trips") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_double(1e-300).find(',') == std::string::npos);
    CHECK(format_shortest(0.025) == "0.025");
}

TEST_CASE("sweep CSV layout") {
    auto cfg = small_config();
    auto report = sweep_epsilon(cfg);
    std::ostringstream out;
    write_report_csv(out, report, cfg);
    auto l = lines(out.str());
    REQUIRE(l.size() == 3 + 1 + 6);
    CHECK(l[0].rfind("# ", 0) == 0);
    CHECK(l[2].find("grid=40x12") != std::string::npos);
    CHECK(l[2].find("seed=20240607") != std::string::npos);
    CHECK(l[3].rfind("epsilon,n,grid,tol,seed,sigma,sigma0,mu,lambda,gap,", 0) == 0);
    const auto columns = std::count(l[3].begin(), l[3].end(), ',');
    for (std::size_t i = 4; i < l.size(); ++i) {
        CHECK(std::count(l[i].begin(), l[i].end(), ',') == columns);
        CHECK(l[i].find(",40x12,") != std::string::npos);
    }
    CHECK(l[4].rfind("0.20000000000000001,1,", 0) == 0);
    CHECK(grid_label(cfg.grid()) == "40x12");
}

TEST_CASE("identical runs give identical text") {
    auto cfg = small_config();
    std::ostringstream a, b;
    write_report_csv(a, sweep_epsilon(cfg), cfg);
    write_report_csv(b, sweep_epsilon(cfg), cfg);
    CHECK(a.str() == b.str());
}

TEST_CASE("JSON summary and nodal output") {
    auto cfg = small_config();
    auto report = sweep_epsilon(cfg);
    auto j = summary_json(report, cfg);
    CHECK(j.contains("slopes"));
    CHECK(j["rows"] == 6);
    CHECK(j["config"]["grid"] == "40x12");
    bool found = false;
    for (const auto& s : j["slopes"])
        if (s["metric"] == "gap" && s["n"] == 1) {
            found = true;
            CHECK(s["slope"].is_number());
        }
    CHECK(found);

    auto a = analyze_epsilon(cfg, 0.1);
    std::ostringstream nodal, dat, spectrum;
    write_nodal_csv(nodal, {a}, 2, cfg);
    auto l = lines(nodal.str());
    CHECK(l.size() > 4);
    write_eigenfunction_dat(dat, a, 1);
    CHECK(lines(dat.str()).size() >= cfg.grid().size());
    write_spectrum_csv(spectrum, a, cfg);
    CHECK(lines(spectrum.str()).size() == 4 + 2);
    CHECK(spectrum_json(a, cfg)["rows"].size() == 2);
}

}
