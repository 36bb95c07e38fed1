#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "qnes/analysis.hpp"

namespace fs = std::filesystem;

namespace
{
    int invoke(std::vector<std::string> args)
    {
        args.insert(args.begin(), "qnes");
        std::vector<char *> argv;
        for (auto &a : args)
            argv.push_back(a.data());
        argv.push_back(nullptr);
        return qnes::cli::cli_main(static_cast<int>(args.size()), argv.data());
    }

    fs::path scratch_dir(const std::string &name)
    {
        const fs::path dir = fs::temp_directory_path() / "qnes_test_cli" / name;
        fs::remove_all(dir);
        fs::create_directories(dir);
        return dir;
    }

    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
}

TEST_CASE("run writes a CSV")
{
    const fs::path dir = scratch_dir("run");
    const fs::path out = dir / "sphere.csv";
    CHECK(invoke({"run", "--benchmark", "sphere", "--dim", "5", "--algo", "qnes", "--seed", "1", "--out",
                  out.string()}) == 0);
    REQUIRE(fs::exists(out));
    const qnes::RunLog log = qnes::read_csv(out);
    REQUIRE_FALSE(log.records.empty());
    CHECK(log.records.back().gap <= 1e-20);
}

TEST_CASE("bad input fails with a nonzero status")
{
    const fs::path dir = scratch_dir("bad");
    CHECK(invoke({"run", "--benchmark", "nosuch", "--dim", "5", "--out", (dir / "x.csv").string()}) != 0);
    CHECK_FALSE(fs::exists(dir / "x.csv"));
    CHECK(invoke({"run", "--benchmark", "ellipsoid", "--dim", "1", "--out", (dir / "x.csv").string()}) != 0);
    CHECK(invoke({"run", "--no-such-flag"}) != 0);
    CHECK(invoke({"run", "--benchmark", "sphere", "--kappa", "0.5", "--out", (dir / "x.csv").string()}) != 0);
    CHECK(invoke({"run", "--benchmark", "sphere", "--algo", "cma", "--out", (dir / "x.csv").string()}) != 0);
    CHECK(invoke({"rate", (dir / "missing.csv").string()}) != 0);
    CHECK(invoke({}) != 0);
}

TEST_CASE("rate reads a run")
{
    const fs::path dir = scratch_dir("rate");
    const fs::path out = dir / "rb.csv";
    REQUIRE(invoke({"run", "--benchmark", "rosenbrock", "--dim", "4", "--seed", "2", "--out", out.string()}) == 0);
    CHECK(invoke({"rate", out.string()}) == 0);
    CHECK(invoke({"rate", out.string(), "--series"}) == 0);
}

TEST_CASE("suite output is reproducible across thread counts")
{
    const fs::path a = scratch_dir("suite_a");
    const fs::path b = scratch_dir("suite_b");
    const std::vector<std::string> common{"suite", "--benchmarks", "sphere", "cigar", "--dims", "3", "--algos",
                                          "qnes", "hees", "--seeds", "1", "2"};
    auto args_a = common;
    args_a.insert(args_a.end(), {"--out-dir", a.string(), "--jobs", "1"});
    auto args_b = common;
    args_b.insert(args_b.end(), {"--out-dir", b.string(), "--jobs", "3"});
    REQUIRE(invoke(args_a) == 0);
    REQUIRE(invoke(args_b) == 0);

    int files = 0;
    for (const auto &entry : fs::directory_iterator(a))
    {
        ++files;
        const fs::path other = b / entry.path().filename();
        REQUIRE(fs::exists(other));
        CHECK(slurp(entry.path()) == slurp(other));
    }
    CHECK(files == 2 * 2 * 2 + 1);
    CHECK(fs::exists(a / qnes::cli::cell_filename({"cigar", 3, qnes::Algorithm::hees, 2})));
    CHECK(slurp(a / "summary.csv").rfind("benchmark,dim,algo,runs,successes,median_evals_to_target\n", 0) == 0);
}

TEST_CASE("flags override the config file")
{
    const fs::path dir = scratch_dir("config");
    const fs::path cfg = dir / "qnes.toml";
    std::ofstream(cfg) << "[suite]\nbenchmarks = [\"cigar\"]\ndims = [3]\nseeds = [7]\n\n"
                          "[run]\nbenchmark = \"cigar\"\ndim = 3\nseed = 7\n";
    CHECK(invoke({"--config", cfg.string(), "suite", "--seeds", "9", "--out-dir", dir.string()}) == 0);
    CHECK(fs::exists(dir / "cigar-d3-qnes-s9.csv"));
    CHECK_FALSE(fs::exists(dir / "cigar-d3-qnes-s7.csv"));

    const fs::path out = dir / "single.csv";
    CHECK(invoke({"--config", cfg.string(), "run", "--seed", "1", "--out", out.string()}) == 0);
    CHECK(fs::exists(out));
}

TEST_CASE("output directory from the environment")
{
    const fs::path dir = scratch_dir("env");
    ::setenv("QNES_OUTPUT_DIR", dir.string().c_str(), 1);
    CHECK(qnes::cli::default_output_dir() == dir);
    CHECK(invoke({"run", "--benchmark", "sphere", "--dim", "3", "--seed", "4"}) == 0);
    CHECK(fs::exists(dir / "sphere-d3-qnes-s4.csv"));
    ::unsetenv("QNES_OUTPUT_DIR");
    CHECK(qnes::cli::default_output_dir() == fs::path("."));
}
