#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "ergodic/errors.hpp"
#include "ergodic/experiment.hpp"
#include "ergodic/measure_designer.hpp"
#include "support.hpp"

using namespace ergodic;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("registry is sorted and aliases resolve") {
    const auto& reg = check_registry();
    CHECK(reg.size() == 12);
    CHECK(std::is_sorted(reg.begin(), reg.end(), [](const CheckInfo& a, const CheckInfo& b) { return a.id < b.id; }));
    CHECK(resolve_check("identity") == "lemma13_identity");
    CHECK(resolve_check("thm16") == "thm16_exponents");
    CHECK(resolve_check("cor18") == "cor18");
    CHECK(resolve_check("thm99").empty());
}

TEST_CASE("config defaults") {
    const ExperimentConfig cfg = parse_config(R"({"measure": {"type": "power_law", "alpha": 0.5}})");
    CHECK(cfg.K_grid.front() == 16.0);
    CHECK(cfg.K_grid.back() == std::ldexp(1.0, 20));
    CHECK(cfg.eps_grid.size() == 37);
    CHECK(cfg.eps_grid.back() == std::ldexp(1.0, -40));
    CHECK(cfg.params.at("alpha").get<double>() == 0.5);
    CHECK(*cfg.power_law_c == doctest::Approx(0.5 / (2.0 * std::sqrt(kPi))));
    CHECK(cfg.formats.size() == 3);
    CHECK(cfg.out_dir == "out");
}

TEST_CASE("overrides win over the document") {
    ConfigOverrides o;
    o.seed = 9;
    o.out_dir = "elsewhere";
    const ExperimentConfig cfg = parse_config(
        R"({"model": {"type": "random_diagonal", "dim": 8}, "seed": 1, "output": {"dir": "x"}})", o);
    CHECK(cfg.seed == 9);
    CHECK(cfg.out_dir == "elsewhere");
}

TEST_CASE("random diagonal models follow the seed") {
    const std::string doc = R"({"model": {"type": "random_diagonal", "dim": 32, "gamma": 0.4}, "seed": 5})";
    const auto a = std::get<DiagonalModel>(parse_config(doc).model);
    const auto b = std::get<DiagonalModel>(parse_config(doc).model);
    CHECK(a.U.phases() == b.U.phases());
    CHECK(a.psi.norm_sq() == doctest::Approx(1.0));
    for (double t : a.U.phases()) CHECK((t == 0.0 || std::abs(t) > 0.4));
    ConfigOverrides o;
    o.seed = 6;
    CHECK(std::get<DiagonalModel>(parse_config(doc, o).model).U.phases() != a.U.phases());
}

TEST_CASE("config errors name the field and line") {
    CHECK(error_of("{\n  \"measure\": {\"type\": \"power_law\", \"alpha\": 0.5},\n  \"checks\": [\"nope\"]\n}")
              .find("line 3") != std::string::npos);
    CHECK(error_of("{\"measure\": {\"type\": \"power_law\", \"alpha\": 0.5}, \"checks\": [\"nope\"]}")
              .find("/checks/nope") != std::string::npos);
    CHECK(error_of("{\n\"measure\": {\"type\": \"power_law\",\n \"alpha\": \"x\"}}").find("/measure/alpha (line 3)") !=
          std::string::npos);
    CHECK(error_of("{\n\n  \"measure\": [1,,]}").find("line 3") != std::string::npos);
    CHECK(error_of(R"({"measure": {"type": "power_law", "alpha": 0.5}, "model": {"type": "diagonal"}})")
              .find("exactly one") != std::string::npos);
    CHECK(error_of(R"({"measure": {"type": "cantor"}})").find("/measure/type") != std::string::npos);
    CHECK(error_of(R"({"measure": {"type": "power_law", "alpha": 0.5}, "colour": 1})").find("/colour") !=
          std::string::npos);
    CHECK(error_of(R"({"measure": {"type": "lacunary", "depth": 2}})").find("/measure") != std::string::npos);
}

TEST_CASE("checks are validated against the model") {
    CHECK(error_of(R"({"measure": {"type": "power_law", "alpha": 0.5}, "checks": ["thm12_gap_bound"]})")
              .find("gamma") != std::string::npos);
    CHECK(error_of(R"({"measure": {"type": "power_law", "alpha": 0.5}, "checks": ["thm17_truncation"]})")
              .find("atomic") != std::string::npos);
    CHECK(error_of(R"({"measure": {"type": "power_law", "alpha": 0.5}, "K_grid": {"min_exp": 4, "max_exp": 30}})")
              .find("/K_grid") != std::string::npos);
    CHECK(error_of(R"({"measure": {"type": "power_law", "alpha": 0.5}, "params": {"alpha": 2.5},
                      "checks": ["thm15_forward"]})")
              .find("/params/alpha") != std::string::npos);
    CHECK(error_of(R"({"model": {"type": "koopman", "map": "rotation", "alpha": 0.3, "observable": [[1, 1, 0]]},
                      "checks": ["cor18"]})")
              .empty());
}

TEST_CASE("measure JSON round trip") {
    const CircleMeasure mixed = CircleMeasure::mixture({test::random_atomic(3, 12), unit_power_law(0.7)});
    const CircleMeasure back = measure_from_json(measure_to_json(mixed));
    for (double eps : {1.0, 0.1, 1e-3, 1e-6}) CHECK(arc_mass(back, eps) == arc_mass(mixed, eps));
    CHECK(fejer_functional(back, 64) == fejer_functional(mixed, 64));

    const ExperimentConfig cfg = parse_config(R"({"measure": {"kind": "atomic", "atoms": [[0.5, 1.0], [-2.0, 0.25]]}})");
    CHECK(std::get<SpectralModel>(cfg.model).mu.total_mass() == 1.25);
    CHECK_THROWS_AS(measure_from_json(nlohmann::json{{"kind", "fractal"}}), UsageError);
}

TEST_CASE("report JSON keeps non-finite values as strings") {
    VerificationReport r;
    r.claim = "x";
    r.holds = true;
    r.witness_kind = "K";
    r.constants = {{"c", 2.0}};
    const nlohmann::json j = report_to_json(r);
    CHECK(j.at("worst_margin") == "inf");
    CHECK(j.at("witness") == "nan");
    CHECK(j.at("constants").at("c") == 2.0);
    CHECK_FALSE(j.contains("advisory"));
}

TEST_CASE("power-law experiment") {
    const ExperimentConfig cfg = parse_config(
        R"({"measure": {"type": "power_law", "alpha": 0.5}, "K_grid": {"min_exp": 4, "max_exp": 14},
            "checks": ["identity", "thm16", "thm15_reverse", "sec31_lower_bound"]})");
    const ExperimentResult res = run_experiment(cfg);
    CHECK(res.all_hold);
    REQUIRE(res.reports.size() == 4);
    CHECK(res.reports[0].claim == "lemma13_identity");
    REQUIRE(res.arc.has_value());
    CHECK(res.arc->d_minus == doctest::Approx(0.5).epsilon(0.05));
    CHECK(res.series.entries.size() == 11);
}

TEST_CASE("CSV and SVG writers") {
    RateSeries s;
    s.entries = {{16, 0.25}, {32, 0.125}, {64, 0.0625}};
    const std::string csv = decay_csv(s);
    CHECK(csv.rfind("K,b,log_ratio\n16,0.25,0.5\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    const std::string svg = loglog_svg({{16, 0.25}, {32, 0.125}, {64, 0.0625}}, "t", "K", "b", "note");
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("tail slope -1") != std::string::npos);
    CHECK(svg.find("<line") != std::string::npos);
    CHECK(loglog_svg({}, "t", "x", "y", "").find("no positive data") != std::string::npos);
}
