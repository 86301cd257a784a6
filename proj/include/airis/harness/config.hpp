#pragma once

// Experiment configuration: one JSON document per experiment. Powers are in
// dBm here and converted to watts only when a Scenario is built.

#include "airis/error.hpp"
#include "airis/max_ar_cffp.hpp"
#include "airis/pa_beta.hpp"
#include "airis/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace airis::harness {

// Invalid configuration; `field` is a JSON pointer or empty for syntax errors.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& msg)
        : Error(field.empty() ? msg : field + ": " + msg), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct ScenarioConfig {
    int m_antennas = 2;
    int n_elements = 128;
    double p_max_dbm = 30.0;
    double sigma2_irs_dbm = -100.0;
    double sigma2_user_dbm = -100.0;
    Point3 bs_pos{0.0, 30.0, 0.0};
    Point3 irs_pos{50.0, 0.0, 10.0};
    Point3 user_pos{25.0, 30.0, 0.0};
    double alpha_bi = 2.1;
    double alpha_iu = 2.1;
    double alpha_bu = 4.0;
    double pl0_db = -30.0;

    Scenario to_scenario() const;
};

enum class AlgorithmKind { MaxSnrPa, MaxArCffp, FixedBeta, PassiveIrs, RandomPhase, NoIrs };

struct AlgorithmSpec {
    AlgorithmKind kind = AlgorithmKind::MaxSnrPa;
    // Max-SNR-PA and fixed beta
    double eps = 1e-3;
    double xi = 1e-6;
    int max_outer = 100;
    int max_inner = 50;
    double beta = 0.5;
    // Max-AR-CFFP
    cffp::CffpVariant variant = cffp::CffpVariant::PaperFaithful;
    double zeta = 1e-3;
    int max_iters = 200;
    // passive IRS
    int passive_iters = 3;

    std::string id() const;       // kind name
    std::string label() const;    // unique per configured scheme, e.g. fixed_beta_0.8
    std::string variant_name() const;
};

enum class SweepAxis { None, NElements, PMaxDbm };

struct ExperimentConfig {
    ScenarioConfig scenario;
    std::vector<AlgorithmSpec> algorithms;
    SweepAxis axis = SweepAxis::None;
    std::vector<double> axis_values;
    int seeds = 50;
    std::uint64_t base_seed = 1;
    pa_beta::RegressionConfig regression;
    std::vector<int> convergence_n{32, 128};
    std::string output_dir = "out";

    // Throws ConfigError.
    void validate() const;

    // Scenario at one point of the sweep axis (the base scenario when the axis is None).
    Scenario scenario_at(double axis_value) const;
    std::vector<double> sweep_points() const;
};

// Default scenario with all eight schemes.
ExperimentConfig default_config();

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_text(const std::string& text);
// Accepts a plain config or a manifest written by a previous run.
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const ExperimentConfig& cfg);
std::string config_sha256(const ExperimentConfig& cfg);

std::string to_string(SweepAxis axis);

}  // namespace airis::harness
