#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "basket/market_model.hpp"
#include "basket/mc.hpp"
#include "basket/pide.hpp"
#include "basket/results.hpp"

namespace basket {

struct VolatilityConfig {
    std::string type;  // black_scholes | cev | term_structure
    double sigma = 0.0;
    double alpha = 0.0;
    double beta = 1.0;
    std::vector<double> times;
    std::vector<double> sigmas;
};

struct AssetConfig {
    double spot = 0.0;
    double jump_size = 0.0;
    VolatilityConfig vol;
};

struct LbaSettings {
    std::string truncation = "adaptive";  // adaptive | paper_compat
    bool paper_literal_a0 = false;
};

// Declarative form of one pricing experiment. Parsing is strict: unknown
// keys are rejected so silent typos cannot change a run.
struct ExperimentConfig {
    int schema_version = 1;
    std::string name;
    std::vector<AssetConfig> assets;
    std::vector<double> weights;
    bool correlation_scalar = true;
    double correlation_off_diag = 0.0;
    std::vector<std::vector<double>> correlation_matrix;
    double intensity = 0.0;
    double maturity = 1.0;
    std::optional<double> strike;
    std::vector<double> moneyness;  // used when strike is absent
    std::vector<Method> methods;
    McConfig mc;
    PideConfig pide;
    LbaSettings lba;
    std::string output = "csv";
};

struct ConfigError {
    int line = 0;  // 1-based; 0 when no position is known
    std::string message;
};

struct ParseOutcome {
    std::optional<ExperimentConfig> config;
    std::vector<ConfigError> errors;

    bool ok() const { return config.has_value() && errors.empty(); }
};

namespace detail {

inline int line_of_offset(const std::string& text, std::size_t offset) {
    int line = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

inline int line_of_key(const std::string& text, const std::string& key) {
    const auto pos = text.find("\"" + key + "\"");
    return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

class ConfigReader {
public:
    ConfigReader(const std::string& text, std::vector<ConfigError>& errors)
        : text_(text), errors_(errors) {}

    void fail(const std::string& key, const std::string& message) {
        errors_.push_back({line_of_key(text_, key), message});
    }

    void check_keys(const nlohmann::json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
        for (const auto& item : obj.items()) {
            if (!allowed.count(item.key()))
                fail(item.key(), "unknown key \"" + item.key() + "\" in " + where);
        }
    }

    template <typename T>
    bool require(const nlohmann::json& obj, const std::string& key, T& out) {
        if (!obj.contains(key)) {
            errors_.push_back({0, "missing required field \"" + key + "\""});
            return false;
        }
        return read_into(obj.at(key), key, out);
    }

    template <typename T>
    void optional(const nlohmann::json& obj, const std::string& key, T& out) {
        if (obj.contains(key)) read_into(obj.at(key), key, out);
    }

    template <typename T>
    bool read_into(const nlohmann::json& value, const std::string& key, T& out) {
        try {
            out = value.get<T>();
            return true;
        } catch (const nlohmann::json::exception& e) {
            fail(key, "field \"" + key + "\": " + e.what());
            return false;
        }
    }

private:
    const std::string& text_;
    std::vector<ConfigError>& errors_;
};

inline void parse_vol(ConfigReader& reader, const nlohmann::json& obj, VolatilityConfig& vol,
                      std::vector<ConfigError>& errors) {
    if (!obj.is_object()) {
        errors.push_back({0, "\"vol\" must be an object"});
        return;
    }
    if (!reader.require(obj, "type", vol.type)) return;
    if (vol.type == "black_scholes") {
        reader.check_keys(obj, "vol", {"type", "sigma"});
        reader.require(obj, "sigma", vol.sigma);
    } else if (vol.type == "cev") {
        reader.check_keys(obj, "vol", {"type", "alpha", "beta"});
        reader.require(obj, "alpha", vol.alpha);
        reader.require(obj, "beta", vol.beta);
    } else if (vol.type == "term_structure") {
        reader.check_keys(obj, "vol", {"type", "times", "sigmas"});
        reader.require(obj, "times", vol.times);
        reader.require(obj, "sigmas", vol.sigmas);
        if (vol.times.size() != vol.sigmas.size() || vol.times.empty())
            reader.fail("times", "term_structure needs matching non-empty times/sigmas");
    } else {
        reader.fail("type", "unknown vol type \"" + vol.type +
                                "\" (black_scholes, cev, term_structure)");
    }
}

}  // namespace detail

inline ParseOutcome parse_config(const std::string& text) {
    ParseOutcome outcome;
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        outcome.errors.push_back(
            {detail::line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), e.what()});
        return outcome;
    }
    if (!root.is_object()) {
        outcome.errors.push_back({1, "top level must be a JSON object"});
        return outcome;
    }

    ExperimentConfig cfg;
    detail::ConfigReader reader(text, outcome.errors);
    reader.check_keys(root, "config",
                      {"schema_version", "name", "assets", "weights", "correlation", "intensity",
                       "maturity", "strike", "moneyness", "methods", "mc", "pide", "lba",
                       "output"});

    if (reader.require(root, "schema_version", cfg.schema_version) && cfg.schema_version != 1)
        reader.fail("schema_version", "unsupported schema_version (expected 1)");
    reader.optional(root, "name", cfg.name);

    if (root.contains("assets") && root.at("assets").is_array()) {
        for (const auto& item : root.at("assets")) {
            if (!item.is_object()) {
                outcome.errors.push_back({0, "asset entries must be objects"});
                continue;
            }
            reader.check_keys(item, "asset", {"spot", "jump_size", "vol"});
            AssetConfig asset;
            reader.require(item, "spot", asset.spot);
            reader.require(item, "jump_size", asset.jump_size);
            if (item.contains("vol"))
                detail::parse_vol(reader, item.at("vol"), asset.vol, outcome.errors);
            else
                outcome.errors.push_back({0, "missing required field \"vol\" in asset"});
            cfg.assets.push_back(std::move(asset));
        }
    } else {
        outcome.errors.push_back({0, "missing required field \"assets\""});
    }

    reader.require(root, "weights", cfg.weights);
    reader.require(root, "intensity", cfg.intensity);
    reader.require(root, "maturity", cfg.maturity);

    if (root.contains("correlation")) {
        const auto& corr = root.at("correlation");
        if (corr.is_number()) {
            cfg.correlation_scalar = true;
            cfg.correlation_off_diag = corr.get<double>();
        } else if (corr.is_array()) {
            cfg.correlation_scalar = false;
            reader.read_into(corr, "correlation", cfg.correlation_matrix);
        } else {
            reader.fail("correlation", "correlation must be a number or a square matrix");
        }
    } else {
        outcome.errors.push_back({0, "missing required field \"correlation\""});
    }

    if (root.contains("strike")) {
        double k = 0.0;
        if (reader.read_into(root.at("strike"), "strike", k)) cfg.strike = k;
    }
    reader.optional(root, "moneyness", cfg.moneyness);
    if (!cfg.strike.has_value() && cfg.moneyness.empty())
        outcome.errors.push_back({0, "one of \"strike\" or \"moneyness\" is required"});
    if (cfg.strike.has_value() && !cfg.moneyness.empty())
        reader.fail("moneyness", "\"strike\" and \"moneyness\" are mutually exclusive");

    std::vector<std::string> method_names;
    if (reader.require(root, "methods", method_names)) {
        for (const auto& nm : method_names) {
            if (auto m = method_from_name(nm))
                cfg.methods.push_back(*m);
            else
                reader.fail("methods", "unknown method \"" + nm + "\"");
        }
        if (cfg.methods.empty()) reader.fail("methods", "methods list is empty");
    }

    if (root.contains("mc")) {
        const auto& mc = root.at("mc");
        reader.check_keys(mc, "mc",
                          {"paths", "steps_per_year", "seed", "control_variate", "antithetic",
                           "threads"});
        reader.optional(mc, "paths", cfg.mc.n_paths);
        reader.optional(mc, "steps_per_year", cfg.mc.steps_per_year);
        reader.optional(mc, "seed", cfg.mc.seed);
        reader.optional(mc, "control_variate", cfg.mc.control_variate);
        reader.optional(mc, "antithetic", cfg.mc.antithetic);
        reader.optional(mc, "threads", cfg.mc.threads);
    }
    if (root.contains("pide")) {
        const auto& pd = root.at("pide");
        reader.check_keys(pd, "pide",
                          {"strike_cells", "time_cells_per_year", "strike_max_mult",
                           "paper_literal_sigma_c"});
        reader.optional(pd, "strike_cells", cfg.pide.strike_cells);
        reader.optional(pd, "time_cells_per_year", cfg.pide.time_cells_per_year);
        reader.optional(pd, "strike_max_mult", cfg.pide.strike_max_mult);
        reader.optional(pd, "paper_literal_sigma_c", cfg.pide.paper_literal_sigma_c);
    }
    if (root.contains("lba")) {
        const auto& lb = root.at("lba");
        reader.check_keys(lb, "lba", {"truncation", "paper_literal_a0"});
        reader.optional(lb, "truncation", cfg.lba.truncation);
        reader.optional(lb, "paper_literal_a0", cfg.lba.paper_literal_a0);
        if (cfg.lba.truncation != "adaptive" && cfg.lba.truncation != "paper_compat")
            reader.fail("truncation", "truncation must be \"adaptive\" or \"paper_compat\"");
    }
    reader.optional(root, "output", cfg.output);
    if (cfg.output != "csv" && cfg.output != "markdown")
        reader.fail("output", "output must be \"csv\" or \"markdown\"");

    // Cross-field checks that mirror solver preconditions (fail fast).
    const bool wants_aea =
        std::find(cfg.methods.begin(), cfg.methods.end(), Method::Aea) != cfg.methods.end();
    if (wants_aea && !cfg.assets.empty()) {
        const double h0 = cfg.assets.front().jump_size;
        for (const auto& a : cfg.assets)
            if (std::abs(a.jump_size - h0) > 1e-14) {
                reader.fail("methods", "method \"aea\" requires one common jump size");
                break;
            }
    }

    if (outcome.errors.empty()) outcome.config = std::move(cfg);
    return outcome;
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
    nlohmann::json root;
    root["schema_version"] = cfg.schema_version;
    if (!cfg.name.empty()) root["name"] = cfg.name;
    for (const auto& asset : cfg.assets) {
        nlohmann::json a;
        a["spot"] = asset.spot;
        a["jump_size"] = asset.jump_size;
        nlohmann::json v;
        v["type"] = asset.vol.type;
        if (asset.vol.type == "black_scholes") v["sigma"] = asset.vol.sigma;
        if (asset.vol.type == "cev") {
            v["alpha"] = asset.vol.alpha;
            v["beta"] = asset.vol.beta;
        }
        if (asset.vol.type == "term_structure") {
            v["times"] = asset.vol.times;
            v["sigmas"] = asset.vol.sigmas;
        }
        a["vol"] = v;
        root["assets"].push_back(a);
    }
    root["weights"] = cfg.weights;
    if (cfg.correlation_scalar)
        root["correlation"] = cfg.correlation_off_diag;
    else
        root["correlation"] = cfg.correlation_matrix;
    root["intensity"] = cfg.intensity;
    root["maturity"] = cfg.maturity;
    if (cfg.strike.has_value()) root["strike"] = *cfg.strike;
    if (!cfg.moneyness.empty()) root["moneyness"] = cfg.moneyness;
    std::vector<std::string> names;
    names.reserve(cfg.methods.size());
    for (const auto m : cfg.methods) names.push_back(method_name(m));
    root["methods"] = names;
    root["mc"] = {{"paths", cfg.mc.n_paths},
                  {"steps_per_year", cfg.mc.steps_per_year},
                  {"seed", cfg.mc.seed},
                  {"control_variate", cfg.mc.control_variate},
                  {"antithetic", cfg.mc.antithetic},
                  {"threads", cfg.mc.threads}};
    root["pide"] = {{"strike_cells", cfg.pide.strike_cells},
                    {"time_cells_per_year", cfg.pide.time_cells_per_year},
                    {"strike_max_mult", cfg.pide.strike_max_mult},
                    {"paper_literal_sigma_c", cfg.pide.paper_literal_sigma_c}};
    root["lba"] = {{"truncation", cfg.lba.truncation},
                   {"paper_literal_a0", cfg.lba.paper_literal_a0}};
    root["output"] = cfg.output;
    return root.dump(2) + "\n";
}

// Materialize the immutable basket from the declarative form.
inline BasketSpec to_basket_spec(const ExperimentConfig& cfg) {
    std::vector<JumpDiffusionAsset> assets;
    assets.reserve(cfg.assets.size());
    for (const auto& a : cfg.assets) {
        LocalVolatility vol;
        if (a.vol.type == "black_scholes")
            vol = LocalVolatility::black_scholes(a.vol.sigma);
        else if (a.vol.type == "cev")
            vol = LocalVolatility::cev(a.vol.alpha, a.vol.beta);
        else
            vol = LocalVolatility::term_structure(a.vol.times, a.vol.sigmas);
        assets.push_back({a.spot, a.jump_size, vol});
    }

    const std::size_t n = assets.size();
    SquareMatrix rho;
    if (cfg.correlation_scalar) {
        rho = SquareMatrix::equicorrelation(n, cfg.correlation_off_diag);
    } else {
        rho = SquareMatrix(n);
        for (std::size_t i = 0; i < n && i < cfg.correlation_matrix.size(); ++i)
            for (std::size_t j = 0; j < n && j < cfg.correlation_matrix[i].size(); ++j)
                rho(i, j) = cfg.correlation_matrix[i][j];
    }
    return BasketSpec(std::move(assets), cfg.weights, std::move(rho), cfg.intensity);
}

}  // namespace basket
