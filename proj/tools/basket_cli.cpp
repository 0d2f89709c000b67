// Command-line interface: single-price runs from JSON configs, table
// reproduction with golden values, config validation.
//
// Exit codes: 0 success, 2 config error, 3 numerical failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "basket/config.hpp"
#include "basket/report.hpp"
#include "basket/run.hpp"
#include "basket/tables.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int env_threads() {
    if (const char* raw = std::getenv("BASKET_THREADS")) {
        const int n = std::atoi(raw);
        if (n > 0) return n;
    }
    return 0;  // auto
}

std::string read_file(const std::string& path, bool& ok) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        ok = false;
        return {};
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    ok = true;
    return buf.str();
}

basket::ParseOutcome load_config(const std::string& path, int& exit_code) {
    bool ok = false;
    const std::string text = read_file(path, ok);
    if (!ok) {
        std::cerr << "error: cannot read config file " << path << "\n";
        exit_code = kExitConfig;
        return {};
    }
    auto outcome = basket::parse_config(text);
    if (!outcome.ok()) {
        for (const auto& err : outcome.errors)
            std::cerr << path << ":" << err.line << ": " << err.message << "\n";
        exit_code = kExitConfig;
    }
    return outcome;
}

int run_price_command(const std::string& config_path, double strike_override,
                      double maturity_override, const std::string& methods_override,
                      std::int64_t seed_override, bool paper_literal_a0,
                      bool paper_literal_sigma_c, const std::string& format_override) {
    int exit_code = 0;
    auto outcome = load_config(config_path, exit_code);
    if (exit_code != 0) return exit_code;
    auto cfg = *outcome.config;

    if (strike_override > 0.0) {
        cfg.strike = strike_override;
        cfg.moneyness.clear();
    }
    if (maturity_override > 0.0) cfg.maturity = maturity_override;
    if (seed_override >= 0) cfg.mc.seed = static_cast<std::uint64_t>(seed_override);
    if (!methods_override.empty()) {
        cfg.methods.clear();
        std::stringstream ss(methods_override);
        std::string token;
        while (std::getline(ss, token, ',')) {
            if (auto m = basket::method_from_name(token)) {
                cfg.methods.push_back(*m);
            } else {
                std::cerr << "error: unknown method \"" << token << "\"\n";
                return kExitConfig;
            }
        }
    }
    cfg.lba.paper_literal_a0 = cfg.lba.paper_literal_a0 || paper_literal_a0;
    cfg.pide.paper_literal_sigma_c = cfg.pide.paper_literal_sigma_c || paper_literal_sigma_c;
    if (cfg.mc.threads == 0) cfg.mc.threads = env_threads();
    if (!format_override.empty()) cfg.output = format_override;

    try {
        const auto runs = basket::run_price(cfg);
        std::vector<basket::ComparisonRow> rows;
        bool any_result = false;
        std::optional<double> mc_price;
        for (const auto& run : runs)
            for (const auto& res : run.results)
                if (res.method == basket::Method::Mc) mc_price = res.price;
        for (const auto& run : runs) {
            for (const auto& res : run.results) {
                any_result = true;
                basket::ComparisonRow row;
                row.config_id = run.config_id;
                row.method = basket::method_name(res.method);
                row.price = res.price;
                row.std_error = res.std_error;
                row.implied_vol = res.implied_vol;
                if (res.method != basket::Method::Mc && mc_price && *mc_price > 0.0)
                    row.rel_err = std::abs(res.price - *mc_price) / *mc_price;
                rows.push_back(std::move(row));
                for (const auto& w : res.warnings)
                    std::cerr << "warning: " << run.config_id << ": " << w << "\n";
            }
            for (const auto& err : run.errors)
                std::cerr << "error: " << run.config_id << ": " << err << "\n";
        }
        const auto format = cfg.output == "markdown" ? basket::ReportFormat::Markdown
                                                     : basket::ReportFormat::Csv;
        std::cout << basket::emit_report(rows, format);
        return any_result ? 0 : kExitNumerical;
    } catch (const basket::ModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

int run_reproduce_command(int table, std::int64_t paths, std::int64_t seed,
                          const std::string& format) {
    try {
        basket::ReproduceOptions opts;
        if (paths > 0) opts.paths = paths;
        if (seed >= 0) opts.seed = static_cast<std::uint64_t>(seed);
        opts.threads = env_threads();
        const auto result = basket::reproduce_table(table, opts);
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

        std::vector<basket::ComparisonRow> rows = result.rows;
        rows.insert(rows.end(), result.summary.begin(), result.summary.end());
        const auto fmt = format == "markdown" ? basket::ReportFormat::Markdown
                                              : basket::ReportFormat::Csv;
        std::cout << basket::emit_report(rows, fmt);
        return 0;
    } catch (const basket::ModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

int run_validate_command(const std::string& config_path) {
    int exit_code = 0;
    auto outcome = load_config(config_path, exit_code);
    if (exit_code != 0) return exit_code;

    const auto spec = basket::to_basket_spec(*outcome.config);
    const auto report = basket::validate_basket(spec);
    if (report.ok) {
        std::cout << "ok\n";
        return 0;
    }
    for (const auto& v : report.violations) std::cout << "violation: " << v << "\n";
    return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Basket option pricing engine (local volatility jump-diffusion)"};
    app.require_subcommand(1);

    std::string config_path;
    double strike = -1.0, maturity = -1.0;
    std::string methods, format;
    std::int64_t seed = -1;
    bool literal_a0 = false, literal_sigma_c = false;

    auto* price = app.add_subcommand("price", "price one config");
    price->add_option("--config", config_path, "JSON config file")->required();
    price->add_option("--strike", strike, "override strike");
    price->add_option("--maturity", maturity, "override maturity");
    price->add_option("--methods", methods, "comma-separated method list");
    price->add_option("--seed", seed, "override Monte Carlo seed");
    price->add_option("--format", format, "csv or markdown");
    price->add_flag("--paper-literal-a0", literal_a0,
                    "use the printed intercept formula (comparison only)");
    price->add_flag("--paper-literal-sigma-c", literal_sigma_c,
                    "use the printed sigma_c^2 reading (comparison only)");

    int table = 1;
    std::int64_t paths = -1, rseed = -1;
    std::string rformat = "csv";
    auto* reproduce = app.add_subcommand("reproduce", "reproduce a published table");
    reproduce->add_option("--table", table, "table id (1-4)")->required()
        ->check(CLI::Range(1, 4));
    reproduce->add_option("--paths", paths, "Monte Carlo paths per row");
    reproduce->add_option("--seed", rseed, "Monte Carlo seed");
    reproduce->add_option("--format", rformat, "csv or markdown");

    std::string vconfig;
    auto* validate = app.add_subcommand("validate", "validate a config file");
    validate->add_option("--config", vconfig, "JSON config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    if (price->parsed())
        return run_price_command(config_path, strike, maturity, methods, seed, literal_a0,
                                 literal_sigma_c, format);
    if (reproduce->parsed()) return run_reproduce_command(table, paths, rseed, rformat);
    if (validate->parsed()) return run_validate_command(vconfig);
    return kExitConfig;
}
