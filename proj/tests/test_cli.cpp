#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "qaoalab/cli.hpp"
#include "qaoalab/compiler.hpp"

namespace fs = std::filesystem;
using namespace qaoalab;

namespace {

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("qaoalab_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(dir_);
        write("triangle.csp", "csp 3 3\n2 0 1 01,10\n2 1 2 01,10\n2 0 2 01,10\n");
        write("oracle.txt", "oracle 3\n101\n011\n111\n");
        std::mt19937_64 rng(3);
        std::ostringstream qc;
        write_circuit(qc, random_circuit(3, 12, rng));
        write("random.qc", qc.str());
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path path(const std::string& name) const { return dir_ / name; }
    void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }
    std::string read(const std::string& name) const {
        std::ifstream in(path(name));
        return {std::istreambuf_iterator<char>(in), {}};
    }

    int run(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        return cli::run(args, out_, err_);
    }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

}  // namespace

TEST_F(CliTest, fourier_count_triangle) {
    EXPECT_EQ(run({"fourier-count", path("triangle.csp").string()}), 0);
    EXPECT_EQ(out_.str(), "0\n");
}

TEST_F(CliTest, verify_writes_report) {
    const auto report = path("report.json").string();
    EXPECT_EQ(run({"verify", path("random.qc").string(), "--tol", "1e-9", "--out", report}), 0) << err_.str();
    EXPECT_EQ(out_.str().rfind("PASS", 0), 0u);
    const auto j = nlohmann::json::parse(read("report.json"));
    EXPECT_EQ(j.at("tool").get<std::string>(), cli::kToolName);
    EXPECT_TRUE(j.contains("config"));
    EXPECT_TRUE(j.at("result").at("passed").get<bool>());
}

TEST_F(CliTest, zero_shots_is_validation_error) {
    EXPECT_EQ(run({"qaoa-sample", path("triangle.csp").string(), "--p", "1", "--gamma", "0.5", "--beta", "0.3", "--shots", "0"}), 1);
    EXPECT_NE(err_.str().find("--shots"), std::string::npos);
}

TEST_F(CliTest, bad_invocations) {
    EXPECT_EQ(run({"no-such-command"}), 1);
    EXPECT_EQ(run({}), 1);
    EXPECT_EQ(run({"fourier-count", path("missing.csp").string()}), 1);
    write("broken.csp", "csp 2 1\n2 0 1 012\n");
    EXPECT_EQ(run({"fourier-count", path("broken.csp").string()}), 1);
    EXPECT_NE(err_.str().find("line 2"), std::string::npos);
    EXPECT_EQ(run({"pimc", path("triangle.csp").string(), "--beta", "-1"}), 1);
    EXPECT_EQ(run({"fourier-count", path("triangle.csp").string(), "--format", "xml"}), 1);
}

TEST_F(CliTest, same_seed_same_output) {
    const auto csp = path("triangle.csp").string();
    ASSERT_EQ(run({"qaoa-sample", csp, "--gamma", "0.7", "--beta", "0.4", "--shots", "200", "--seed", "5", "--out", path("a.json").string()}), 0);
    ASSERT_EQ(run({"qaoa-sample", csp, "--gamma", "0.7", "--beta", "0.4", "--shots", "200", "--seed", "5", "--out", path("b.json").string()}), 0);
    ASSERT_EQ(run({"qaoa-sample", csp, "--gamma", "0.7", "--beta", "0.4", "--shots", "200", "--seed", "6", "--out", path("c.json").string()}), 0);
    EXPECT_EQ(read("a.json"), read("b.json"));
    EXPECT_NE(read("a.json"), read("c.json"));
    EXPECT_EQ(nlohmann::json::parse(read("a.json")).at("config").at("seed").get<int>(), 5);
}

TEST_F(CliTest, grover_count_and_csv) {
    EXPECT_EQ(run({"grover-count", path("oracle.txt").string()}), 0);
    EXPECT_EQ(out_.str(), "3\n");
    EXPECT_EQ(run({"grover-count", path("oracle.txt").string(), "--threshold", "2"}), 0);
    EXPECT_EQ(out_.str(), "greater\n");
    ASSERT_EQ(run({"pimc", path("triangle.csp").string(), "--sweeps", "500", "--format", "csv", "--out", path("p.csv").string()}), 0);
    const auto csv = read("p.csv");
    EXPECT_EQ(csv.rfind("# qaoalab", 0), 0u);
}

TEST_F(CliTest, compile_writes_csp) {
    write("hth.qc", "circuit 1\nh 0\nt 0\nh 0\n");
    ASSERT_EQ(run({"compile", path("hth.qc").string(), "--csp-out", path("out.csp").string()}), 0) << err_.str();
    EXPECT_EQ(out_.str().rfind("n_total 2 aux 1", 0), 0u);
    EXPECT_EQ(read("out.csp").rfind("csp 2", 0), 0u);
}
