#include "airis/channel.hpp"
#include "airis/harness/commands.hpp"
#include "airis/harness/config.hpp"
#include "airis/harness/output.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace airis;
using namespace airis::harness;

namespace {

std::filesystem::path scratch(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("airis_harness_" + name);
    std::filesystem::remove_all(p);
    return p;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

ExperimentConfig from_text(const std::string& text) { return parse_config_text(text); }

std::string field_of(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<no error>";
}

}  // namespace

TEST_CASE("config defaults") {
    const ExperimentConfig cfg = from_text("{}");
    CHECK(cfg.scenario.m_antennas == 2);
    CHECK(cfg.scenario.n_elements == 128);
    CHECK(cfg.scenario.p_max_dbm == 30.0);
    CHECK(cfg.scenario.sigma2_irs_dbm == -100.0);
    CHECK(cfg.scenario.sigma2_user_dbm == -100.0);
    CHECK(cfg.scenario.alpha_bi == 2.1);
    CHECK(cfg.scenario.alpha_iu == 2.1);
    CHECK(cfg.scenario.alpha_bu == 4.0);
    CHECK(cfg.regression.j_samples == 201);
    CHECK(cfg.regression.q_order == 3);
    CHECK(cfg.seeds == 50);
    CHECK(cfg.algorithms.size() == 8);

    const Scenario scn = cfg.scenario.to_scenario();
    CHECK(scn.p_max == doctest::Approx(1.0));
    CHECK(scn.sigma2_user == doctest::Approx(1e-13));
}

TEST_CASE("config validation") {
    CHECK(field_of(R"({"bogus": 1})") == "/bogus");
    CHECK(field_of(R"({"scenario": {"n_elements": -1}})") == "/scenario/n_elements");
    CHECK(field_of(R"({"scenario": {"m_antenas": 2}})") == "/scenario/m_antenas");
    CHECK(field_of(R"({"algorithms": [{"id": "max_snr_pa"}, {"id": "magic"}]})") == "/algorithms/1/id");
    CHECK(field_of(R"({"algorithms": [{"id": "fixed_beta", "beta": 1.5}]})") == "/algorithms/0/beta");
    CHECK(field_of(R"({"algorithms": [{"id": "no_irs", "beta": 0.5}]})") == "/algorithms/0/beta");
    CHECK(field_of(R"({"regression": {"j": 10, "q": 3}})") != "<no error>");
    CHECK(field_of(R"({"sweep": {"axis": "sideways", "values": [1]}})") == "/sweep/axis");
    CHECK(field_of(R"({"seeds": {"count": "many"}})") == "/seeds/count");
    CHECK_THROWS_AS(from_text("{\"seeds\": "), ConfigError);
}

TEST_CASE("config round trip and hash") {
    const ExperimentConfig cfg = from_text(
        R"({"scenario": {"n_elements": 64, "alpha_bu": 3.0},
            "algorithms": [{"id": "max_ar_cffp", "variant": "standard_fp"}, {"id": "fixed_beta", "beta": 0.8}],
            "sweep": {"axis": "p_max_dbm", "values": [20, 25]}, "seeds": {"count": 3, "base": 7}})");
    const ExperimentConfig back = parse_config(to_json(cfg));
    CHECK(to_json(back) == to_json(cfg));
    CHECK(config_sha256(back) == config_sha256(cfg));
    CHECK(config_sha256(cfg).size() == 64);
    CHECK(config_sha256(cfg) != config_sha256(default_config()));
    CHECK(cfg.algorithms[1].label() == "fixed_beta_0.8");
    CHECK(cfg.algorithms[0].label() == "max_ar_cffp_standard_fp");
}

TEST_CASE("cmd_run") {
    SUBCASE("one seed, one scheme, one row") {
        ExperimentConfig cfg = from_text(R"({"algorithms": [{"id": "no_irs"}], "seeds": {"count": 1}})");
        const auto out = scratch("one_row");
        const CommandResult res = cmd_run(cfg, out, 1);
        const auto rows = read_csv(out / "results.csv");
        REQUIRE(rows.size() == 2);
        CHECK(rows[0][0] == "algorithm");
        CHECK(rows[1][0] == "no_irs");
        CHECK(!res.solver_failure);
        CHECK(std::filesystem::exists(out / "manifest.json"));
    }
    SUBCASE("byte determinism across runs and thread counts") {
        ExperimentConfig cfg = default_config();
        cfg.seeds = 4;
        cfg.scenario.n_elements = 32;
        const auto a = scratch("det_a"), b = scratch("det_b");
        cmd_run(cfg, a, 1);
        cmd_run(cfg, b, 3);
        for (const char* f : {"results.csv", "traces.csv", "summary.csv", "manifest.json"}) {
            CHECK(slurp(a / f) == slurp(b / f));
        }
    }
    SUBCASE("manifest round trip reproduces outputs") {
        ExperimentConfig cfg = from_text(
            R"({"algorithms": [{"id": "max_snr_pa"}, {"id": "random_phase"}], "seeds": {"count": 3, "base": 11},
                "scenario": {"n_elements": 16}})");
        const auto a = scratch("manifest_a"), b = scratch("manifest_b");
        cmd_run(cfg, a, 1);
        const ExperimentConfig again = load_config(a / "manifest.json");
        cmd_run(again, b, 1);
        CHECK(slurp(a / "results.csv") == slurp(b / "results.csv"));
    }
    SUBCASE("tampered manifest is rejected") {
        ExperimentConfig cfg = from_text(R"({"algorithms": [{"id": "no_irs"}], "seeds": {"count": 1}})");
        const auto a = scratch("tamper");
        cmd_run(cfg, a, 1);
        std::string text = slurp(a / "manifest.json");
        text.replace(text.find("\"count\": 1"), 10, "\"count\": 2");
        CHECK_THROWS_AS(parse_config_text(text), ConfigError);
    }
    SUBCASE("floats carry 17 significant digits") { CHECK(format_double(0.1) == "0.10000000000000001"); }
}

TEST_CASE("cmd_sweep") {
    SUBCASE("empty axis") {
        ExperimentConfig cfg = from_text(R"({"algorithms": [{"id": "no_irs"}], "seeds": {"count": 1}})");
        CHECK_THROWS_AS(cmd_sweep(cfg, scratch("empty_axis"), 1), ConfigError);
    }
    SUBCASE("no IRS is flat in N") {
        ExperimentConfig cfg = from_text(R"({"algorithms": [{"id": "no_irs"}], "seeds": {"count": 5},
                                             "sweep": {"axis": "n_elements", "values": [32, 64, 128]}})");
        const auto out = scratch("flat");
        const CommandResult res = cmd_sweep(cfg, out, 1);
        const auto stats = summarize(cfg, res.rows);
        REQUIRE(stats.size() == 3);
        CHECK(stats[0].mean == stats[1].mean);
        CHECK(stats[1].mean == stats[2].mean);
        CHECK(std::filesystem::exists(out / "sweep.svg"));
    }
    SUBCASE("every scheme grows with P_max, Max-SNR-PA grows with N") {
        ExperimentConfig cfg = default_config();
        cfg.seeds = 10;
        cfg.scenario.n_elements = 32;
        cfg.axis = SweepAxis::PMaxDbm;
        cfg.axis_values = {20, 25, 30, 35};
        const auto stats = summarize(cfg, cmd_sweep(cfg, scratch("pmax"), 1).rows);
        for (std::size_t i = 1; i < stats.size(); ++i) {
            if (stats[i].algorithm_index == stats[i - 1].algorithm_index) {
                CHECK(stats[i].mean >= stats[i - 1].mean - 2.0 * std::max(stats[i].stderr_mean, stats[i - 1].stderr_mean));
            }
        }
        ExperimentConfig n_cfg = from_text(R"({"algorithms": [{"id": "max_snr_pa"}], "seeds": {"count": 10},
                                              "sweep": {"axis": "n_elements", "values": [16, 32, 64, 128]}})");
        const auto n_stats = summarize(n_cfg, cmd_sweep(n_cfg, scratch("nsweep"), 1).rows);
        for (std::size_t i = 1; i < n_stats.size(); ++i) CHECK(n_stats[i].mean >= n_stats[i - 1].mean);
    }
}

TEST_CASE("cmd_fit_beta") {
    const ExperimentConfig cfg = default_config();
    const auto out = scratch("fit");
    cmd_fit_beta(cfg, 1, out);
    const auto rows = read_csv(out / "fit_beta.csv");
    std::map<std::string, int> per_curve;
    for (std::size_t i = 1; i < rows.size(); ++i) ++per_curve[rows[i][0]];
    REQUIRE(per_curve.size() == 5);
    for (const auto& [name, count] : per_curve) CHECK(count == 1001);
    CHECK(rows[1][0] == "true");
    CHECK(std::stod(rows[1][1]) == 0.0);
    CHECK(std::stod(rows[1][3]) == 0.0);

    int better = 0;
    Scenario scn = cfg.scenario.to_scenario();
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const FitBetaResult fit = run_fit_beta(scn, channel::generate(scn, seed));
        const auto find = [&fit](int j, int q) {
            for (const auto& c : fit.fits)
                if (c.j_samples == j && c.q_order == q) return c.max_abs_err;
            return -1.0;
        };
        better += find(201, 3) <= find(101, 2) ? 1 : 0;
    }
    CHECK(better >= 16);
}

TEST_CASE("cmd_convergence") {
    ExperimentConfig cfg = from_text(R"({"algorithms": [{"id": "max_snr_pa"}], "seeds": {"count": 20}})");
    const auto out = scratch("conv");
    const CommandResult res = cmd_convergence(cfg, out, 1);

    // file-level monotonicity and the stopping rule
    const auto rows = read_csv(out / "traces.csv");
    std::map<std::string, std::vector<double>> traces;
    for (std::size_t i = 1; i < rows.size(); ++i) traces[rows[i][2] + "/" + rows[i][3]].push_back(std::stod(rows[i][6]));
    CHECK(traces.size() == 40);
    for (const auto& [key, t] : traces) {
        for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] >= t[i - 1] - 1e-6);
        REQUIRE(t.size() >= 2);
        CHECK(std::abs(t.back() - t[t.size() - 2]) <= 1e-3);
    }

    const auto curves = mean_convergence(res.rows);
    REQUIRE(curves.size() == 2);
    CHECK(curves[0].n_elements == 32);
    CHECK(curves[1].n_elements == 128);
    CHECK(curves[1].mean_ar.back() >= curves[0].mean_ar.back());
    CHECK(std::filesystem::exists(out / "convergence.svg"));
    CHECK(std::filesystem::exists(out / "convergence_mean.csv"));
}
