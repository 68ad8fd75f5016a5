#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code = -1;
    std::string out;  // stdout and stderr
};

Outcome run(const std::string& args) {
    const std::string cmd = std::string(CNFL_BIN) + " " + args + " 2>&1";
    Outcome r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("cnfl_test_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("help lists every flag") {
    const std::vector<std::pair<std::string, std::vector<std::string>>> commands = {
        {"gen",
         {"--family", "--vars", "--level", "--clauses", "--nodes", "--edges", "--colors", "--degree", "--ratio", "--k",
          "--expected-cliques", "--seed", "--out"}},
        {"sample",
         {"--cnf", "--samples", "--pos", "--neg", "--negative-tries", "--seed", "--out", "--max-decisions",
          "--max-models-per-cell", "--cell-target", "--xor-density"}},
        {"train",
         {"--data", "--hidden", "--folds", "--tree", "--activation", "--learning-rate", "--beta1", "--beta2",
          "--epochs", "--l2", "--batch-size", "--seed"}},
        {"sweep", {"--data", "--max-neurons", "--activation", "--learning-rate", "--epochs", "--seed"}},
        {"experiment", {"--config", "--workers", "--output", "--max-jobs"}},
        {"report", {"--dir"}},
    };
    const auto top = run("--help");
    CHECK(top.code == 0);
    for (const auto& [cmd, flags] : commands) {
        CHECK(top.out.find(cmd) != std::string::npos);
        const auto r = run(cmd + " --help");
        CHECK(r.code == 0);
        for (const auto& flag : flags) {
            INFO(cmd << " " << flag);
            CHECK(r.out.find(flag) != std::string::npos);
        }
    }
}

TEST_CASE("exit codes") {
    CHECK(run("--bogus").code == 1);
    CHECK(run("gen --family nonsense").code == 1);
    CHECK(run("gen --family random3cnf --vars 20 --level 9").code == 1);
    CHECK(run("sample").code == 1);
    const auto missing = run("sample --cnf /nonexistent/f.cnf");
    CHECK(missing.code == 1);
    CHECK(missing.out.find("/nonexistent/f.cnf") != std::string::npos);
    const auto dir = scratch("codes");
    std::ofstream(dir / "bad.ini") << "[experiment]\nprotocol = cop\nbogus = 1\n";
    const auto bad = run("experiment --config " + (dir / "bad.ini").string());
    CHECK(bad.code == 1);
    CHECK(bad.out.find("bogus") != std::string::npos);
}

TEST_CASE("gen, sample and train pipeline") {
    const auto dir = scratch("pipeline");
    const auto g = run("gen --family random3cnf --vars 20 --level 0 --seed 7");
    REQUIRE(g.code == 0);
    CHECK(g.out.find("p cnf 20 91") != std::string::npos);
    CHECK(g.out.find("seed") != std::string::npos);

    const auto flat = run("gen --family flat3gcp --nodes 30 --edges 60 --seed 3");
    REQUIRE(flat.code == 0);
    CHECK(flat.out.find("p cnf 90 300") != std::string::npos);

    const auto cnf = (dir / "f.cnf").string();
    const auto csv = (dir / "d.csv").string();
    REQUIRE(run("gen --family random3cnf --vars 20 --clauses 40 --seed 2 --out " + cnf).code == 0);
    REQUIRE(run("sample --cnf " + cnf + " --pos 100 --neg 100 --seed 5 --out " + csv).code == 0);
    std::istringstream lines(slurp(csv));
    std::string line;
    std::size_t rows = 0;
    while (std::getline(lines, line)) rows += !line.empty() && line[0] != '#' ? 1 : 0;
    CHECK(rows == 201);  // header and 200 samples

    // The same seed produces the same bytes.
    const auto csv2 = (dir / "d2.csv").string();
    REQUIRE(run("sample --cnf " + cnf + " --pos 100 --neg 100 --seed 5 --out " + csv2).code == 0);
    CHECK(slurp(csv) == slurp(csv2));

    const auto t = run("train --data " + csv + " --hidden 8 --epochs 20 --folds 5 --tree --seed 1");
    REQUIRE(t.code == 0);
    CHECK(t.out.find("model,fold1,fold2,fold3,fold4,fold5,mean,min,perfect") != std::string::npos);
    CHECK(t.out.find("\nmlp,") != std::string::npos);
    CHECK(t.out.find("\ntree,") != std::string::npos);
    CHECK(run("train --data " + csv + " --folds 1").code == 1);
}

TEST_CASE("experiment is reproducible and the report can be rebuilt") {
    const auto dir = scratch("experiment");
    std::ofstream(dir / "spec.ini") << "[experiment]\nprotocol = phase\nseed = 4\nformulas_per_set = 2\n"
                                       "[dataset]\npositives = 30\nnegatives = 30\n[mlp]\nepochs = 5\n"
                                       "[phase]\nvars = 10\nlevels = -1,0,1\nmax_neurons = 2\n";
    const auto spec = (dir / "spec.ini").string();
    const auto a = dir / "a";
    const auto b = dir / "b";
    REQUIRE(run("experiment --config " + spec + " --output " + a.string()).code == 0);
    REQUIRE(run("experiment --config " + spec + " --output " + b.string() + " --max-jobs 2").code == 0);
    CHECK_FALSE(fs::exists(b / "summary.csv"));
    REQUIRE(run("experiment --config " + spec + " --output " + b.string()).code == 0);
    CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));
    CHECK(slurp(a / "rows.csv") == slurp(b / "rows.csv"));

    const auto before = slurp(a / "summary.csv");
    fs::remove(a / "summary.csv");
    REQUIRE(run("report --dir " + a.string()).code == 0);
    CHECK(slurp(a / "summary.csv") == before);
    CHECK(run("report --dir " + (dir / "none").string()).code == 1);
}
