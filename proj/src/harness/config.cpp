#include "airis/harness/config.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace airis::harness {

namespace {

using nlohmann::json;

class ObjectReader {
public:
    ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
    }

    bool has(const char* key) const { return obj_.contains(key); }

    std::string where(const char* key) const { return path_ + "/" + key; }

    const json* find(const char* key) {
        auto it = obj_.find(key);
        if (it == obj_.end()) return nullptr;
        seen_.insert(key);
        return &*it;
    }

    void number(const char* key, double& out) {
        if (const json* v = find(key)) out = as_number(*v, where(key));
    }

    void integer(const char* key, int& out) {
        if (const json* v = find(key)) {
            const std::int64_t x = as_integer(*v, where(key));
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
                throw ConfigError(where(key), "integer out of range");
            }
            out = static_cast<int>(x);
        }
    }

    void unsigned64(const char* key, std::uint64_t& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0)) {
                throw ConfigError(where(key), "expected a nonnegative integer");
            }
            out = v->get<std::uint64_t>();
        }
    }

    void string(const char* key, std::string& out) {
        if (const json* v = find(key)) {
            if (!v->is_string()) throw ConfigError(where(key), "expected a string");
            out = v->get<std::string>();
        }
    }

    void point(const char* key, Point3& out) {
        if (const json* v = find(key)) {
            if (!v->is_array() || v->size() != 3) throw ConfigError(where(key), "expected an array of 3 numbers");
            for (int i = 0; i < 3; ++i) out(i) = as_number((*v)[static_cast<std::size_t>(i)], where(key));
        }
    }

    void numbers(const char* key, std::vector<double>& out) {
        if (const json* v = find(key)) {
            if (!v->is_array()) throw ConfigError(where(key), "expected an array of numbers");
            out.clear();
            for (const json& x : *v) out.push_back(as_number(x, where(key)));
        }
    }

    void integers(const char* key, std::vector<int>& out) {
        if (const json* v = find(key)) {
            if (!v->is_array()) throw ConfigError(where(key), "expected an array of integers");
            out.clear();
            for (const json& x : *v) out.push_back(static_cast<int>(as_integer(x, where(key))));
        }
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError(path_ + "/" + it.key(), "unknown key");
        }
    }

    static double as_number(const json& v, const std::string& where) {
        if (!v.is_number()) throw ConfigError(where, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(where, "expected a finite number");
        return x;
    }

    static std::int64_t as_integer(const json& v, const std::string& where) {
        if (!v.is_number_integer()) throw ConfigError(where, "expected an integer");
        return v.get<std::int64_t>();
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

AlgorithmKind kind_from_string(const std::string& s, const std::string& where) {
    if (s == "max_snr_pa") return AlgorithmKind::MaxSnrPa;
    if (s == "max_ar_cffp") return AlgorithmKind::MaxArCffp;
    if (s == "fixed_beta") return AlgorithmKind::FixedBeta;
    if (s == "passive_irs") return AlgorithmKind::PassiveIrs;
    if (s == "random_phase") return AlgorithmKind::RandomPhase;
    if (s == "no_irs") return AlgorithmKind::NoIrs;
    throw ConfigError(where, "unknown algorithm '" + s + "'");
}

AlgorithmSpec parse_algorithm(const json& j, const std::string& path) {
    ObjectReader rd(j, path);
    std::string id;
    rd.string("id", id);
    if (id.empty()) throw ConfigError(path + "/id", "missing algorithm id");
    AlgorithmSpec a;
    a.kind = kind_from_string(id, path + "/id");
    switch (a.kind) {
        case AlgorithmKind::FixedBeta:
            if (!rd.has("beta")) throw ConfigError(path + "/beta", "fixed_beta needs a beta value");
            rd.number("beta", a.beta);
            [[fallthrough]];
        case AlgorithmKind::MaxSnrPa:
            rd.number("eps", a.eps);
            rd.number("xi", a.xi);
            rd.integer("max_outer", a.max_outer);
            rd.integer("max_inner", a.max_inner);
            break;
        case AlgorithmKind::MaxArCffp: {
            std::string variant = cffp::to_string(a.variant);
            rd.string("variant", variant);
            try {
                a.variant = cffp::variant_from_string(variant);
            } catch (const DomainError& e) {
                throw ConfigError(path + "/variant", e.what());
            }
            rd.number("zeta", a.zeta);
            rd.integer("max_iters", a.max_iters);
            break;
        }
        case AlgorithmKind::PassiveIrs:
            rd.integer("iters", a.passive_iters);
            break;
        case AlgorithmKind::RandomPhase:
        case AlgorithmKind::NoIrs:
            break;
    }
    rd.finish();
    return a;
}

json algorithm_json(const AlgorithmSpec& a) {
    json j;
    j["id"] = a.id();
    switch (a.kind) {
        case AlgorithmKind::FixedBeta:
            j["beta"] = a.beta;
            [[fallthrough]];
        case AlgorithmKind::MaxSnrPa:
            j["eps"] = a.eps;
            j["xi"] = a.xi;
            j["max_outer"] = a.max_outer;
            j["max_inner"] = a.max_inner;
            break;
        case AlgorithmKind::MaxArCffp:
            j["variant"] = cffp::to_string(a.variant);
            j["zeta"] = a.zeta;
            j["max_iters"] = a.max_iters;
            break;
        case AlgorithmKind::PassiveIrs:
            j["iters"] = a.passive_iters;
            break;
        case AlgorithmKind::RandomPhase:
        case AlgorithmKind::NoIrs:
            break;
    }
    return j;
}

json point_json(const Point3& p) { return json::array({p(0), p(1), p(2)}); }

}  // namespace

Scenario ScenarioConfig::to_scenario() const {
    Scenario s;
    s.m_antennas = m_antennas;
    s.n_elements = n_elements;
    s.p_max = dbm_to_watt(p_max_dbm);
    s.sigma2_irs = dbm_to_watt(sigma2_irs_dbm);
    s.sigma2_user = dbm_to_watt(sigma2_user_dbm);
    s.bs_pos = bs_pos;
    s.irs_pos = irs_pos;
    s.user_pos = user_pos;
    s.alpha_bi = alpha_bi;
    s.alpha_iu = alpha_iu;
    s.alpha_bu = alpha_bu;
    s.pl0_db = pl0_db;
    return s;
}

std::string AlgorithmSpec::id() const {
    switch (kind) {
        case AlgorithmKind::MaxSnrPa:
            return "max_snr_pa";
        case AlgorithmKind::MaxArCffp:
            return "max_ar_cffp";
        case AlgorithmKind::FixedBeta:
            return "fixed_beta";
        case AlgorithmKind::PassiveIrs:
            return "passive_irs";
        case AlgorithmKind::RandomPhase:
            return "random_phase";
        case AlgorithmKind::NoIrs:
            return "no_irs";
    }
    return "unknown";
}

std::string AlgorithmSpec::label() const {
    if (kind == AlgorithmKind::FixedBeta) return fmt::format("fixed_beta_{}", beta);
    if (kind == AlgorithmKind::MaxArCffp) return "max_ar_cffp_" + cffp::to_string(variant);
    return id();
}

std::string AlgorithmSpec::variant_name() const {
    switch (kind) {
        case AlgorithmKind::MaxArCffp:
            return cffp::to_string(variant);
        case AlgorithmKind::FixedBeta:
            return fmt::format("beta={}", beta);
        case AlgorithmKind::RandomPhase:
            return "active_random_phase";
        default:
            return "default";
    }
}

void ExperimentConfig::validate() const {
    if (scenario.m_antennas < 1) throw ConfigError("/scenario/m_antennas", "must be >= 1");
    if (scenario.n_elements < 0) throw ConfigError("/scenario/n_elements", "must be >= 0");
    for (const auto& [name, alpha] : {std::pair{"alpha_bi", scenario.alpha_bi}, std::pair{"alpha_iu", scenario.alpha_iu},
                                      std::pair{"alpha_bu", scenario.alpha_bu}}) {
        if (!(alpha > 0.0)) throw ConfigError(std::string("/scenario/") + name, "path-loss exponent must be > 0");
    }
    try {
        scenario_at(axis_values.empty() ? 0.0 : axis_values.front()).validate();
        scenario.to_scenario().validate();
    } catch (const DomainError& e) {
        throw ConfigError("/scenario", e.what());
    }
    if (algorithms.empty()) throw ConfigError("/algorithms", "at least one algorithm is required");
    std::set<std::string> labels;
    for (std::size_t i = 0; i < algorithms.size(); ++i) {
        const AlgorithmSpec& a = algorithms[i];
        const std::string path = "/algorithms/" + std::to_string(i);
        if (!labels.insert(a.label()).second) throw ConfigError(path, "duplicate scheme '" + a.label() + "'");
        if (!(a.eps > 0.0) || !(a.xi > 0.0) || !(a.zeta > 0.0)) throw ConfigError(path, "tolerances must be > 0");
        if (a.max_outer < 1 || a.max_inner < 1 || a.max_iters < 1 || a.passive_iters < 1) {
            throw ConfigError(path, "iteration caps must be >= 1");
        }
        if (a.kind == AlgorithmKind::FixedBeta && !(a.beta > 0.0 && a.beta < 1.0)) {
            throw ConfigError(path + "/beta", "beta must lie in (0, 1)");
        }
    }
    if (axis != SweepAxis::None && axis_values.empty()) throw ConfigError("/sweep/values", "empty sweep axis");
    if (axis == SweepAxis::NElements) {
        for (double v : axis_values) {
            if (!(v >= 0.0) || v != std::floor(v) || v > 1e6) {
                throw ConfigError("/sweep/values", "n_elements values must be nonnegative integers");
            }
        }
    }
    if (seeds < 1) throw ConfigError("/seeds/count", "need at least one seed");
    try {
        regression.validate();
    } catch (const DomainError& e) {
        throw ConfigError("/regression", e.what());
    }
    if (convergence_n.empty()) throw ConfigError("/convergence/n_elements", "need at least one N");
    for (int n : convergence_n) {
        if (n < 0) throw ConfigError("/convergence/n_elements", "N must be nonnegative");
    }
    if (output_dir.empty()) throw ConfigError("/output_dir", "must not be empty");
}

Scenario ExperimentConfig::scenario_at(double axis_value) const {
    ScenarioConfig sc = scenario;
    if (axis == SweepAxis::NElements) sc.n_elements = static_cast<int>(axis_value);
    if (axis == SweepAxis::PMaxDbm) sc.p_max_dbm = axis_value;
    return sc.to_scenario();
}

std::vector<double> ExperimentConfig::sweep_points() const {
    if (axis == SweepAxis::None) return {0.0};
    return axis_values;
}

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    AlgorithmSpec a;
    a.kind = AlgorithmKind::MaxSnrPa;
    cfg.algorithms.push_back(a);
    a.kind = AlgorithmKind::MaxArCffp;
    cfg.algorithms.push_back(a);
    for (double b : {0.5, 0.8, 0.99}) {
        a.kind = AlgorithmKind::FixedBeta;
        a.beta = b;
        cfg.algorithms.push_back(a);
    }
    a.beta = 0.5;
    for (AlgorithmKind k : {AlgorithmKind::PassiveIrs, AlgorithmKind::RandomPhase, AlgorithmKind::NoIrs}) {
        a.kind = k;
        cfg.algorithms.push_back(a);
    }
    return cfg;
}

ExperimentConfig parse_config(const json& doc) {
    ExperimentConfig cfg = default_config();
    ObjectReader root(doc, "");

    if (const json* s = root.find("scenario")) {
        ObjectReader rd(*s, "/scenario");
        ScenarioConfig& sc = cfg.scenario;
        rd.integer("m_antennas", sc.m_antennas);
        rd.integer("n_elements", sc.n_elements);
        rd.number("p_max_dbm", sc.p_max_dbm);
        rd.number("sigma2_irs_dbm", sc.sigma2_irs_dbm);
        rd.number("sigma2_user_dbm", sc.sigma2_user_dbm);
        rd.point("bs_pos", sc.bs_pos);
        rd.point("irs_pos", sc.irs_pos);
        rd.point("user_pos", sc.user_pos);
        rd.number("alpha_bi", sc.alpha_bi);
        rd.number("alpha_iu", sc.alpha_iu);
        rd.number("alpha_bu", sc.alpha_bu);
        rd.number("pl0_db", sc.pl0_db);
        rd.finish();
    }
    if (const json* a = root.find("algorithms")) {
        if (!a->is_array()) throw ConfigError("/algorithms", "expected an array");
        cfg.algorithms.clear();
        for (std::size_t i = 0; i < a->size(); ++i) {
            cfg.algorithms.push_back(parse_algorithm((*a)[i], "/algorithms/" + std::to_string(i)));
        }
    }
    if (const json* s = root.find("sweep")) {
        ObjectReader rd(*s, "/sweep");
        std::string axis = "none";
        rd.string("axis", axis);
        if (axis == "none") {
            cfg.axis = SweepAxis::None;
        } else if (axis == "n_elements") {
            cfg.axis = SweepAxis::NElements;
        } else if (axis == "p_max_dbm") {
            cfg.axis = SweepAxis::PMaxDbm;
        } else {
            throw ConfigError("/sweep/axis", "expected none, n_elements or p_max_dbm");
        }
        rd.numbers("values", cfg.axis_values);
        rd.finish();
    }
    if (const json* s = root.find("seeds")) {
        ObjectReader rd(*s, "/seeds");
        rd.integer("count", cfg.seeds);
        rd.unsigned64("base", cfg.base_seed);
        rd.finish();
    }
    if (const json* r = root.find("regression")) {
        ObjectReader rd(*r, "/regression");
        rd.integer("j", cfg.regression.j_samples);
        rd.integer("q", cfg.regression.q_order);
        rd.finish();
    }
    if (const json* c = root.find("convergence")) {
        ObjectReader rd(*c, "/convergence");
        rd.integers("n_elements", cfg.convergence_n);
        rd.finish();
    }
    root.string("output_dir", cfg.output_dir);
    root.finish();
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", e.what());
    }
    if (doc.is_object() && doc.contains("config_sha256") && doc.contains("config")) {
        ExperimentConfig cfg = parse_config(doc["config"]);
        if (!doc["config_sha256"].is_string() || doc["config_sha256"].get<std::string>() != config_sha256(cfg)) {
            throw ConfigError("/config_sha256", "manifest hash does not match its config");
        }
        return cfg;
    }
    return parse_config(doc);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

json to_json(const ExperimentConfig& cfg) {
    const ScenarioConfig& sc = cfg.scenario;
    json j;
    j["scenario"] = {{"m_antennas", sc.m_antennas},
                     {"n_elements", sc.n_elements},
                     {"p_max_dbm", sc.p_max_dbm},
                     {"sigma2_irs_dbm", sc.sigma2_irs_dbm},
                     {"sigma2_user_dbm", sc.sigma2_user_dbm},
                     {"bs_pos", point_json(sc.bs_pos)},
                     {"irs_pos", point_json(sc.irs_pos)},
                     {"user_pos", point_json(sc.user_pos)},
                     {"alpha_bi", sc.alpha_bi},
                     {"alpha_iu", sc.alpha_iu},
                     {"alpha_bu", sc.alpha_bu},
                     {"pl0_db", sc.pl0_db}};
    j["algorithms"] = json::array();
    for (const AlgorithmSpec& a : cfg.algorithms) j["algorithms"].push_back(algorithm_json(a));
    j["sweep"] = {{"axis", to_string(cfg.axis)}, {"values", cfg.axis_values}};
    j["seeds"] = {{"count", cfg.seeds}, {"base", cfg.base_seed}};
    j["regression"] = {{"j", cfg.regression.j_samples}, {"q", cfg.regression.q_order}};
    j["convergence"] = {{"n_elements", cfg.convergence_n}};
    j["output_dir"] = cfg.output_dir;
    return j;
}

std::string config_sha256(const ExperimentConfig& cfg) {
    const std::string text = to_json(cfg).dump();
    std::array<unsigned char, 32> md{};
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error("config_sha256: SHA-256 failed");
    }
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
    return hex;
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::None:
            return "none";
        case SweepAxis::NElements:
            return "n_elements";
        case SweepAxis::PMaxDbm:
            return "p_max_dbm";
    }
    return "none";
}

}  // namespace airis::harness
