#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "basket/config.hpp"
#include "basket/report.hpp"
#include "basket/run.hpp"
#include "basket/tables.hpp"

using Catch::Approx;
using namespace basket;

namespace {

const char* kMinimalConfig = R"json({
  "schema_version": 1,
  "name": "base",
  "assets": [
    {"spot": 100.0, "jump_size": -0.2212, "vol": {"type": "black_scholes", "sigma": 0.2}},
    {"spot": 100.0, "jump_size": -0.2212, "vol": {"type": "black_scholes", "sigma": 0.2}},
    {"spot": 100.0, "jump_size": -0.2212, "vol": {"type": "black_scholes", "sigma": 0.2}},
    {"spot": 100.0, "jump_size": -0.2212, "vol": {"type": "black_scholes", "sigma": 0.2}}
  ],
  "weights": [0.25, 0.25, 0.25, 0.25],
  "correlation": 0.3,
  "intensity": 0.3,
  "maturity": 1.0,
  "strike": 100.0,
  "methods": ["lba"]
})json";

}  // namespace

TEST_CASE("minimal config parses", "[harness]") {
    const auto outcome = parse_config(kMinimalConfig);
    REQUIRE(outcome.ok());
    const auto& cfg = *outcome.config;
    CHECK(cfg.assets.size() == 4);
    CHECK(cfg.strike == 100.0);
    CHECK(cfg.methods.size() == 1);

    const auto spec = to_basket_spec(cfg);
    CHECK(validate_basket(spec).ok);
    CHECK(spec.correlation(0, 1) == 0.3);
    CHECK(spec.correlation(2, 2) == 1.0);
}

TEST_CASE("missing weights is reported by name", "[harness]") {
    std::string text = kMinimalConfig;
    const auto pos = text.find("\"weights\"");
    text.erase(pos, text.find('\n', pos) - pos + 1);
    const auto outcome = parse_config(text);
    REQUIRE_FALSE(outcome.ok());
    bool found = false;
    for (const auto& err : outcome.errors)
        if (err.message.find("weights") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("unknown keys are rejected with a position", "[harness]") {
    std::string text = kMinimalConfig;
    text.insert(text.rfind('}'), ",\n  \"lamda\": 0.3\n");
    const auto outcome = parse_config(text);
    REQUIRE_FALSE(outcome.ok());
    REQUIRE(outcome.errors.size() == 1);
    CHECK(outcome.errors[0].message.find("lamda") != std::string::npos);
    CHECK(outcome.errors[0].line > 1);
}

TEST_CASE("syntax errors carry the line number", "[harness]") {
    std::string text = kMinimalConfig;
    text.insert(text.find("\"intensity\""), "garbage ");
    const auto outcome = parse_config(text);
    REQUIRE_FALSE(outcome.ok());
    CHECK(outcome.errors[0].line > 1);
}

TEST_CASE("aea with unequal jump sizes is rejected at parse time", "[harness]") {
    std::string text = kMinimalConfig;
    text.replace(text.find("-0.2212"), 7, "-0.1000");
    text.replace(text.find("[\"lba\"]"), 7, "[\"aea\"]");
    const auto outcome = parse_config(text);
    REQUIRE_FALSE(outcome.ok());
    bool found = false;
    for (const auto& err : outcome.errors)
        if (err.message.find("common jump size") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("parse, serialize, parse round-trips identically", "[harness]") {
    const auto first = parse_config(kMinimalConfig);
    REQUIRE(first.ok());
    const std::string serialized = serialize_config(*first.config);
    const auto second = parse_config(serialized);
    REQUIRE(second.ok());
    CHECK(serialize_config(*second.config) == serialized);
}

TEST_CASE("run_price keeps going when one method fails", "[harness]") {
    auto outcome = parse_config(kMinimalConfig);
    REQUIRE(outcome.ok());
    auto cfg = *outcome.config;
    cfg.assets[0].vol.type = "cev";
    cfg.assets[0].vol.alpha = 0.2;
    cfg.assets[0].vol.beta = 0.8;
    cfg.methods = {Method::Pea, Method::Lba};  // pea needs lognormal vols

    const auto runs = run_price(cfg);
    REQUIRE(runs.size() == 1);
    CHECK(runs[0].results.size() == 1);
    CHECK(runs[0].results[0].method == Method::Lba);
    REQUIRE(runs[0].errors.size() == 1);
    CHECK(runs[0].errors[0].find("pea") == 0);
}

TEST_CASE("moneyness sweep prices several strikes", "[harness]") {
    auto outcome = parse_config(kMinimalConfig);
    REQUIRE(outcome.ok());
    auto cfg = *outcome.config;
    cfg.strike.reset();
    cfg.moneyness = {0.9, 1.0, 1.1};
    const auto runs = run_price(cfg);
    REQUIRE(runs.size() == 3);
    CHECK(runs[0].strike == Approx(90.0));
    CHECK(runs[0].results[0].price > runs[2].results[0].price);
}

TEST_CASE("csv report is empty-safe and round-trips", "[harness]") {
    CHECK(emit_csv({}) == "config,method,price,stderr,iv,rel_err\r\n");

    ComparisonRow row;
    row.config_id = "table1/lambda=0.3,eta=-0.25,T=1";  // comma forces quoting
    row.method = "lba";
    row.price = 7.372391;
    row.implied_vol = 0.185321;
    const auto text = emit_csv({row});
    CHECK(text.find("\"table1/lambda=0.3,eta=-0.25,T=1\"") != std::string::npos);

    const auto parsed = parse_csv_report(text);
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].config_id == row.config_id);
    CHECK(*parsed[0].price == Approx(7.372391));
    CHECK_FALSE(parsed[0].std_error.has_value());
    CHECK(emit_csv(parsed) == text);
}

TEST_CASE("markdown report has the pinned column order", "[harness]") {
    ComparisonRow row;
    row.config_id = "cfg";
    row.method = "mc";
    row.price = 7.35;
    row.std_error = 0.01;
    const auto text = emit_markdown({row});
    CHECK(text.find("| config | method | price | stderr | iv | rel_err |") == 0);
    CHECK(text.find("| cfg | mc | 7.350000 | 0.010000 |  |  |") != std::string::npos);
}

TEST_CASE("table definitions carry the published grids", "[harness]") {
    CHECK(table_rows(1).size() == 12);
    CHECK(table_rows(2).size() == 10);
    CHECK(table_rows(3).size() == 12);
    CHECK(table_rows(4).size() == 12);
    CHECK_THROWS_AS(table_rows(5), ModelError);

    for (const auto& row : table_rows(1)) {
        CHECK(row.spec.size() == 4);
        CHECK(row.strike == 100.0);
        CHECK(row.paper.count(Method::Mc) == 1);
        CHECK(row.paper.count(Method::Lba) == 1);
    }
    // moneyness sweep of the stress table
    CHECK(table_rows(2).front().strike == Approx(70.0));
    CHECK(table_rows(2).back().strike == Approx(130.0));
}

TEST_CASE("reproduce emits engine and paper rows side by side", "[harness]") {
    ReproduceOptions opts;
    opts.paths = 4000;  // keep the unit test fast; accuracy is acceptance's job
    opts.seed = 1;
    opts.threads = 1;
    const auto result = reproduce_table(4, opts);
    // 12 rows x (mc, mc(paper), lba, lba(paper))
    CHECK(result.rows.size() == 48);
    CHECK(result.rows[0].method == "mc");
    CHECK(result.rows[1].method == "mc(paper)");
    CHECK(result.rows[2].method == "lba");
    CHECK(result.rows[3].method == "lba(paper)");
    REQUIRE(result.summary.size() == 1);
    CHECK(result.summary[0].method == "lba");
    CHECK(result.summary[0].rel_err.has_value());
}
