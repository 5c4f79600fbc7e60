#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "tngpricer/commands.hpp"
#include "tngpricer/errors.hpp"
#include "tngpricer/scenario.hpp"

namespace tngpricer {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json minimal() {
    return json::parse(R"({
      "schema": "tngpricer.scenario/1",
      "curve": {"r": 0.05},
      "firms": [
        {"id": "a", "v0": 100, "sigma": 0.3, "barrier": 60, "alpha": 0.4},
        {"id": "b", "v0": 80, "sigma": 0.25, "barrier": 50, "alpha": 0.5},
        {"id": "c", "v0": 120, "sigma": 0.2, "barrier": 90, "alpha": 0.3}
      ],
      "contracts": [
        {"id": "t-a", "obligor_id": "a", "guarantor_id": "g", "tax_amount": 50, "maturity": 2},
        {"id": "t-b", "obligor_id": "b", "guarantor_id": "g", "tax_amount": 30, "maturity": 2, "contract_rate": 0.01},
        {"id": "t-c", "obligor_id": "c", "guarantor_id": "g", "tax_amount": 20, "maturity": 2}
      ],
      "perpetual": [{"firm_id": "a", "coupon_rate": 4}],
      "pde": {"face": 100, "sigma": 0.2, "dv": 1.0, "dtau": 0.01},
      "cdo": {"tranches": [{"attachment": 0, "detachment": 0.1, "label": "equity"},
                           {"attachment": 0.1, "detachment": 1, "label": "senior"}],
              "recovery": 0.4, "maturity": 2},
      "sim": {"paths": 2000, "steps": 24}
    })");
}

template <class E>
E expect_throw(const json& doc) {
    try {
        parse_scenario(doc.dump());
    } catch (const E& e) {
        return e;
    } catch (const std::exception& e) {
        ADD_FAILURE() << "wrong exception: " << e.what();
        throw;
    }
    ADD_FAILURE() << "no exception";
    throw std::logic_error("unreachable");
}

struct Csv {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

Csv read_csv(const fs::path& path) {
    std::ifstream in(path);
    Csv csv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.starts_with("#")) csv.comments.push_back(line);
        else if (csv.header.empty()) csv.header = split(line);
        else csv.rows.push_back(split(line));
    }
    return csv;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

class CommandTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("tngpricer_cmd_" + std::to_string(std::random_device{}()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    RunFlags flags(const std::string& sub, std::optional<std::uint64_t> seed = 7) const {
        RunFlags f;
        f.out_dir = dir_ / sub;
        f.seed = seed;
        f.threads = 1;
        return f;
    }
    fs::path dir_;
};

TEST(ScenarioParsing, AcceptsMinimalAndAppliesDefaults) {
    const Scenario s = parse_scenario(minimal().dump());
    ASSERT_EQ(s.firms.size(), 3u);
    EXPECT_EQ(s.firms[0].mu, 0.05);  // risk-neutral drift by default
    EXPECT_EQ(s.contracts[0].contract_rate, 0.0);
    EXPECT_EQ(s.contracts[0].initiation, 0.0);
    EXPECT_EQ(s.firm("b").v0, 80.0);
    EXPECT_THROW(s.firm("zz"), ReferenceError);
    ASSERT_TRUE(s.cdo.has_value());
    EXPECT_EQ(s.cdo->tranches[1].label, TrancheLabel::senior);
    EXPECT_EQ(*s.sim.paths, 2000u);
}

TEST(ScenarioParsing, SchemaErrorsNameTheField) {
    json doc = minimal();
    doc["firms"][1]["sigma"] = -0.1;
    EXPECT_EQ(expect_throw<SchemaError>(doc).field(), "firms[1].sigma");

    doc = minimal();
    doc["firms"][2].erase("barrier");
    EXPECT_EQ(expect_throw<SchemaError>(doc).field(), "firms[2].barrier");

    doc = minimal();
    doc["firms"][0]["alpha"] = 1.5;
    EXPECT_EQ(expect_throw<SchemaError>(doc).field(), "firms[0].alpha");

    doc = minimal();
    doc["firms"][0]["v0"] = "big";
    EXPECT_EQ(expect_throw<SchemaError>(doc).field(), "firms[0].v0");

    doc = minimal();
    doc["contracts"][1]["tax_amount"] = 0;
    EXPECT_EQ(expect_throw<SchemaError>(doc).field(), "contracts[1].tax_amount");

    doc = minimal();
    doc["cdo"]["tranches"][1]["attachment"] = 0.2;
    EXPECT_EQ(expect_throw<SchemaError>(doc).field(), "cdo.tranches[1].attachment");

    doc = minimal();
    doc["schema"] = "something/2";
    EXPECT_EQ(expect_throw<SchemaError>(doc).field(), "schema");

    doc = minimal();
    doc["sim"]["paths"] = 0;
    EXPECT_EQ(expect_throw<SchemaError>(doc).field(), "sim.paths");
}

TEST(ScenarioParsing, ReferenceErrorsNameTheId) {
    json doc = minimal();
    doc["contracts"][0]["obligor_id"] = "ghost";
    const auto e = expect_throw<ReferenceError>(doc);
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
    EXPECT_EQ(e.category(), ErrorCategory::validation);

    doc = minimal();
    doc["perpetual"][0]["firm_id"] = "phantom";
    EXPECT_NE(std::string(expect_throw<ReferenceError>(doc).what()).find("phantom"), std::string::npos);
}

TEST(ScenarioParsing, MalformedInput) {
    EXPECT_THROW(parse_scenario("{\"schema\": "), ParseError);
    EXPECT_THROW(parse_scenario("[1, 2]"), SchemaError);
    EXPECT_THROW(load_scenario("/nonexistent/dir/scenario.json"), IoError);
}

TEST(ScenarioParsing, MatrixCsv) {
    const fs::path path = fs::temp_directory_path() / "tngpricer_matrix_test.csv";
    {
        std::ofstream out(path);
        out << "# three names\n1,0.12,0.21\n0.12,1,0.28\n0.21,0.28,1\n";
    }
    const Matrix m = load_matrix_csv(path);
    EXPECT_EQ(m.rows(), 3u);
    EXPECT_EQ(m(1, 2), 0.28);
    {
        std::ofstream out(path);
        out << "1,0.1\n0.1\n";
    }
    EXPECT_THROW(load_matrix_csv(path), SchemaError);
    {
        std::ofstream out(path);
        out << "1,x\nx,1\n";
    }
    EXPECT_THROW(load_matrix_csv(path), ParseError);
    fs::remove(path);
}

TEST(ExitStatus, CategoriesMapToCodes) {
    EXPECT_EQ(exit_status(SchemaError("x", "y")), kExitValidation);
    EXPECT_EQ(exit_status(ReferenceError("x")), kExitValidation);
    EXPECT_EQ(exit_status(ParseError("x")), kExitValidation);
    EXPECT_EQ(exit_status(DomainError("x")), kExitValidation);
    EXPECT_EQ(exit_status(NumericError("x")), kExitNumeric);
    EXPECT_EQ(exit_status(IoError("x")), kExitIo);
}

TEST_F(CommandTest, PriceBondWritesVersionedCsvAndSummary) {
    const Scenario s = parse_scenario(minimal().dump());
    run_command("price-bond", s, flags("bond", std::nullopt));
    const Csv csv = read_csv(dir_ / "bond" / "prices.csv");
    ASSERT_GE(csv.comments.size(), 2u);
    EXPECT_EQ(csv.comments[0], std::string("# schema: ") + kPricesSchema);
    EXPECT_TRUE(csv.comments[1].starts_with("# params: {"));
    EXPECT_EQ(csv.rows.size(), 3u);
    const json summary = json::parse(slurp(dir_ / "bond" / "summary.json"));
    EXPECT_EQ(summary["schema"], kSummarySchema);
    for (const auto& row : summary["prices"]) {
        EXPECT_GT(row["price"].get<double>(), 0.0);
        EXPECT_GE(row["spread"].get<double>(), 0.0);
    }
}

TEST_F(CommandTest, EveryCommandRuns) {
    const Scenario s = parse_scenario(minimal().dump());
    run_command("price-perpetual", s, flags("perp"));
    EXPECT_TRUE(fs::exists(dir_ / "perp" / "prices.csv"));
    run_command("check-pde", s, flags("pde"));
    const json pde = json::parse(slurp(dir_ / "pde" / "summary.json"));
    EXPECT_LT(pde["max_relative_residual"].get<double>(), 1e-3);
    run_command("simulate", s, flags("sim"));
    const Csv survival = read_csv(dir_ / "sim" / "survival.csv");
    EXPECT_EQ(survival.rows.size(), 3u * 24u);
    run_command("price-cdo", s, flags("cdo"));
    EXPECT_EQ(read_csv(dir_ / "cdo" / "tranches.csv").rows.size(), 2u);
}

TEST_F(CommandTest, RandomizedCommandsNeedASeed) {
    const Scenario s = parse_scenario(minimal().dump());
    EXPECT_TRUE(is_randomized("simulate"));
    EXPECT_FALSE(is_randomized("price-bond"));
    try {
        run_command("simulate", s, flags("x", std::nullopt));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(exit_status(e), kExitValidation);
    }
    EXPECT_THROW(run_command("price-cdo", s, flags("x", std::nullopt)), Error);
    EXPECT_THROW(run_command("bogus", s, flags("x")), DomainError);
    EXPECT_THROW(run_command("price-bond", std::nullopt, flags("x")), SchemaError);
}

TEST_F(CommandTest, SeededRunsAreByteIdenticalAcrossThreads) {
    const Scenario s = parse_scenario(minimal().dump());
    RunFlags one = flags("one", 99), four = flags("four", 99), other = flags("other", 100);
    four.threads = 4;
    for (const auto& f : {one, four, other}) run_command("price-cdo", s, f);
    for (const char* file : {"tranches.csv", "path_losses.csv", "summary.json"}) {
        EXPECT_EQ(slurp(dir_ / "one" / file), slurp(dir_ / "four" / file)) << file;
    }
    EXPECT_NE(slurp(dir_ / "one" / "path_losses.csv"), slurp(dir_ / "other" / "path_losses.csv"));
}

TEST_F(CommandTest, PathLossesReconcileWithTranches) {
    const Scenario s = parse_scenario(minimal().dump());
    RunFlags f = flags("cdo", 5);
    f.paths = 3000;
    run_command("price-cdo", s, f);
    const Csv losses = read_csv(dir_ / "cdo" / "path_losses.csv");
    ASSERT_EQ(losses.rows.size(), 3000u);
    ASSERT_EQ(losses.header, (std::vector<std::string>{"path_id", "pool_loss", "tranche_0_loss", "tranche_1_loss"}));
    const double widths[2] = {0.1, 0.9};
    double mean_terminal[2] = {0, 0};
    for (std::size_t p = 0; p < losses.rows.size(); ++p) {
        const auto& row = losses.rows[p];
        EXPECT_EQ(std::stoul(row[0]), p);
        const double pool = std::stod(row[1]);
        double recombined = 0.0;
        for (int k = 0; k < 2; ++k) {
            const double tl = std::stod(row[2 + k]);
            recombined += widths[k] * tl;
            mean_terminal[k] += tl;
        }
        EXPECT_NEAR(recombined, pool, 1e-12);
    }
    const Csv tranches = read_csv(dir_ / "cdo" / "tranches.csv");
    for (int k = 0; k < 2; ++k) EXPECT_NEAR(std::stod(tranches.rows[k][5]), mean_terminal[k] / 3000.0, 1e-12);
    const json summary = json::parse(slurp(dir_ / "cdo" / "summary.json"));
    EXPECT_EQ(summary["params"]["sim"]["seed"], 5);
    EXPECT_EQ(summary["params"]["sim"]["paths"], 3000);
}

TEST_F(CommandTest, CalibrateRecoversPlantedLoadings) {
    const fs::path matrix = dir_ / "m.csv";
    {
        std::ofstream out(matrix);
        out << "1,0.12,0.21\n0.12,1,0.28\n0.21,0.28,1\n";
    }
    RunFlags f = flags("cal", std::nullopt);
    f.matrix = matrix;
    run_command("calibrate", std::nullopt, f);
    const json summary = json::parse(slurp(dir_ / "cal" / "summary.json"));
    const auto alphas = summary["alphas"].get<std::vector<double>>();
    EXPECT_NEAR(alphas[0], 0.3, 1e-8);
    EXPECT_NEAR(alphas[1], 0.4, 1e-8);
    EXPECT_NEAR(alphas[2], 0.7, 1e-8);
    EXPECT_EQ(read_csv(dir_ / "cal" / "alphas.csv").rows.size(), 3u);
}

}  // namespace
}  // namespace tngpricer
