#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cnfl/harness.hpp"
#include "cnfl/rng.hpp"
#include "doctest.h"

using namespace cnfl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("cnfl_test_harness_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const char* kTinyPhase = R"(
[experiment]
protocol = phase
seed = 11
formulas_per_set = 2
workers = 2

[dataset]
positives = 30
negatives = 30

[mlp]
epochs = 5

[phase]
vars = 10,12
levels = -1,0,1
activations = relu,logistic
max_neurons = 2
)";

ExperimentSpec tiny_phase(const fs::path& out) {
    auto spec = parse_spec(std::string(kTinyPhase));
    spec.output_dir = out.string();
    return spec;
}

}  // namespace

TEST_CASE("stable_hash is FNV-1a") {
    CHECK(stable_hash("") == 0xcbf29ce484222325ULL);
    CHECK(stable_hash("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(stable_hash("foobar") == 0x85944171f73967e8ULL);
    CHECK(formula_seed(3, "v20/c0", 4) == derive_seed(3, {stable_hash("v20/c0"), 4}));
}

TEST_CASE("parse_spec") {
    const auto s = parse_spec(std::string("[experiment]\nprotocol = cop\n"));
    CHECK(s.protocol == Protocol::Cop);
    CHECK(s.effective_formulas_per_set() == 10);
    CHECK(s.family == CopFamily::Flat3Gcp);
    CHECK(s.mlp.hidden_layers == std::vector<std::size_t>{200, 100});
    CHECK(s.dataset.positives == 500);

    const auto p = parse_spec(std::string(kTinyPhase));
    CHECK(p.protocol == Protocol::Phase);
    CHECK(p.master_seed == 11);
    CHECK(p.vars == std::vector<std::size_t>{10, 12});
    CHECK(p.levels == std::vector<int>{-1, 0, 1});
    CHECK(p.activations == std::vector<Activation>{Activation::Relu, Activation::Logistic});
    CHECK(p.mlp.epochs == 5);
    CHECK(p.workers == 2);

    const auto m = parse_spec(std::string("[experiment]\nprotocol=cop\n[cop]\nfamily=morph5gcp\nratios=1,0.5,0\n"));
    CHECK(m.nodes == std::vector<std::size_t>{100});
    CHECK(m.effective_colors() == 5);

    CHECK_THROWS_AS(parse_spec(std::string("[experiment]\n")), ConfigError);
    CHECK_THROWS_AS(parse_spec(std::string("[experiment]\nprotocol = dance\n")), ConfigError);
    CHECK_THROWS_AS(parse_spec(std::string("[experiment]\nprotocol = cop\ncolour = 3\n")), ConfigError);
    CHECK_THROWS_AS(parse_spec(std::string("[experiment]\nprotocol = cop\n[extra]\na = 1\n")), ConfigError);
    CHECK_THROWS_AS(parse_spec(std::string("[experiment]\nprotocol = cop\nseed = x\n")), ConfigError);
    CHECK_THROWS_AS(parse_spec(std::string("[experiment]\nprotocol = phase\n[phase]\nlevels = 6\n")), ConfigError);
    CHECK_THROWS_AS(parse_spec(std::string("[experiment]\nprotocol = cop\n[cop]\nnodes = 30,50\n")), ConfigError);
    CHECK_THROWS_AS(parse_spec(std::string("[experiment]\nprotocol = cop\n[mlp]\nactivation = tanh\n")), ConfigError);
    CHECK_THROWS_WITH_AS(load_spec("/nonexistent/x.ini"), doctest::Contains("/nonexistent/x.ini"), ConfigError);
}

TEST_CASE("plan_jobs") {
    auto full = parse_spec(std::string("[experiment]\nprotocol = phase\nformulas_per_set = 1000\n"
                                       "[phase]\nvars = 10,20,30,40,50,60,70,80,90,100\n"));
    CHECK(plan_jobs(full).size() == 110000);

    const auto tiny = parse_spec(std::string(kTinyPhase));
    const auto jobs = plan_jobs(tiny);
    REQUIRE(jobs.size() == 2 * 2 * 3 * 2);
    CHECK(jobs[0].set == "relu/v10/c-1");
    CHECK(jobs[2].set == "relu/v10/c0");
    CHECK(jobs[4].set == "relu/v10/c+1");
    CHECK(jobs[12].set == "logistic/v10/c-1");
    CHECK(jobs[12].formula_set == jobs[0].formula_set);
    for (std::size_t i = 0; i < jobs.size(); ++i) CHECK(jobs[i].id == i);

    const auto morph = parse_spec(std::string("[experiment]\nprotocol=cop\nformulas_per_set=5\n"
                                              "[cop]\nfamily=morph5gcp\nratios=1,0.5,0\n"));
    std::map<std::string, int> per_set;
    for (const auto& j : plan_jobs(morph)) ++per_set[j.set];
    CHECK(per_set["morph5gcp/n100/r1"] == 5);
    CHECK(per_set["morph5gcp/n100/r0.5"] == 5);
    CHECK(per_set["morph5gcp/n100/r0"] == 1);
}

TEST_CASE("cop rows have the encoded sizes") {
    auto spec = parse_spec(std::string("[experiment]\nprotocol=cop\nformulas_per_set=2\n"
                                       "[dataset]\npositives=40\nnegatives=40\n[mlp]\nhidden=8\nepochs=5\n"
                                       "[cop]\nfamily=flat3gcp\nnodes=30\nedges=60\n"));
    const auto jobs = plan_jobs(spec);
    REQUIRE(jobs.size() == 2);
    for (const auto& j : jobs) {
        const Row r = run_job(spec, j);
        CHECK(r.vars == 90);
        CHECK(r.clauses == 300);
        CHECK(r.sampled);
        CHECK(r.positives == 40);
        CHECK(r.negatives == 40);
        // A job is reproducible in isolation.
        CHECK(canonical(run_job(spec, j)) == canonical(r));
    }
}

TEST_CASE("external samples are validated") {
    const auto dir = scratch("external");
    const auto f = parse_dimacs("p cnf 3 2\n1 2 0\n-3 0\n");
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream(dir / name) << text;
        return (dir / name).string();
    };
    const auto good = read_external_samples(write("good.txt", "c ok\nv 1 -2 -3 0\n-1 2 -3 0\n1 2 -3 0\n"), f);
    REQUIRE(good.size() == 3);
    for (const auto& s : good) CHECK(evaluate(f, s.features));

    auto line_of = [&](const std::string& text) {
        try {
            read_external_samples(write("bad.txt", text), f);
        } catch (const ParseError& e) {
            return e.line();
        }
        return std::size_t{0};
    };
    CHECK(line_of("1 -2 -3 0\n1 2 3 0\n") == 2);  // falsifies -3
    CHECK(line_of("1 -2 0\n") == 1);              // x3 missing
    CHECK(line_of("1 1 -3 0\n") == 1);
    CHECK(line_of("1 -2 -3\n") == 1);
    CHECK(line_of("1 -2 -4 0\n") == 1);
    CHECK(line_of("1 x -3 0\n") == 1);
    CHECK_THROWS_WITH_AS(read_external_samples((dir / "missing.txt").string(), f), doctest::Contains("missing.txt"),
                         std::runtime_error);
}

TEST_CASE("ingest protocol") {
    const auto dir = scratch("ingest");
    std::ofstream(dir / "sat.cnf") << "p cnf 12 3\n1 2 3 0\n-4 5 0\n6 -7 8 0\n";
    std::ofstream(dir / "unsat.cnf") << "p cnf 12 2\n1 0\n-1 0\n";
    std::ofstream(dir / "sat.samples") << "1 -2 -3 -4 5 6 7 8 9 10 11 12 0\n1 2 3 4 5 6 -7 -8 -9 -10 -11 -12 0\n";
    const auto sat = (dir / "sat.cnf").string();
    auto spec = parse_spec("[experiment]\nprotocol=ingest\n[dataset]\npositives=50\nnegatives=50\n"
                           "[mlp]\nhidden=8\nepochs=20\n[ingest]\nformulas=" + sat + "," + (dir / "unsat.cnf").string() +
                           "," + sat + "\nsamples=,," + (dir / "sat.samples").string() + "\n");
    REQUIRE(spec.sample_files.size() == 3);
    spec.output_dir = (dir / "out").string();
    const auto result = run_ingest_experiment(spec);
    REQUIRE(result.complete);
    REQUIRE(result.rows.size() == 3);
    CHECK(result.rows[0].sampled);
    CHECK(result.rows[0].dt_mean_acc.has_value());
    CHECK(result.rows[0].sampler_mode == "hashed");
    CHECK_FALSE(result.rows[1].sampled);
    CHECK(result.rows[1].skip_reason == "unsat");
    CHECK(result.rows[2].sampled);
    CHECK(result.rows[2].sampler_mode == "external");
    CHECK(result.rows[2].positives == 2);
    REQUIRE(result.summaries.size() == 1);
    CHECK(result.summaries[0].attempted == 3);
    CHECK(result.summaries[0].sampled == 2);
    CHECK(result.summaries[0].skip_reasons.at("unsat") == 1);

    spec.formula_files[0] = (dir / "nope.cnf").string();
    spec.output_dir = (dir / "out2").string();
    CHECK_THROWS_WITH_AS(run_ingest_experiment(spec), doctest::Contains("nope.cnf"), std::runtime_error);
    CHECK_THROWS_AS(run_cop_experiment(spec), ContractError);
}

TEST_CASE("summaries of empty and mixed sets") {
    Row skipped;
    skipped.set = "s";
    skipped.skip_reason = "unsat";
    Row other = skipped;
    other.job = 1;
    const auto empty = summarize({skipped, other});
    REQUIRE(empty.size() == 1);
    CHECK(empty[0].empty());
    CHECK(empty[0].attempted == 2);
    CHECK(summary_csv(empty) == std::string(kSummaryHeader) + "\ns,2,0,,,,\n");

    Row a;
    a.set = "t";
    a.sampled = true;
    a.mean_acc = 1.0;
    a.min_acc = 1.0;
    a.perfect = true;
    a.min_neurons = 4;
    Row b = a;
    b.job = 1;
    b.mean_acc = 0.9;
    b.perfect = false;
    b.min_neurons.reset();
    Row c = skipped;
    c.set = "t";
    c.job = 2;
    const auto mixed = summarize({c, b, a});
    REQUIRE(mixed.size() == 1);
    CHECK(mixed[0].attempted == 3);
    CHECK(mixed[0].sampled == 2);
    CHECK(*mixed[0].mean_acc == doctest::Approx(0.95));
    CHECK(*mixed[0].min_acc == doctest::Approx(0.9));
    CHECK(*mixed[0].pct_perfect == doctest::Approx(50.0));
    CHECK(*mixed[0].avg_min_neurons == doctest::Approx(4.0));
}

TEST_CASE("row text round trip") {
    Row r;
    r.job = 7;
    r.set = "relu/v20/c-3";
    r.index = 2;
    r.formula = "v20/c-3#2";
    r.seed = 1234567890123ULL;
    r.vars = 20;
    r.clauses = 83;
    r.sampled = true;
    r.positives = 12;
    r.negatives = 500;
    r.sampler_mode = "uniform";
    r.mean_acc = 0.123456789;
    r.min_acc = 0.1;
    r.min_neurons = 64;
    CHECK(format_row(r) == "7,relu/v20/c-3,2,v20/c-3#2,1234567890123,20,83,ok,,12,500,uniform,0.123457,0.100000,0,64,");
    CHECK(canonical(canonical(r)) == canonical(r));
    CHECK_THROWS_AS(parse_row("1,2,3"), std::invalid_argument);
}

TEST_CASE("figure data") {
    std::vector<SetSummary> sums;
    for (int level = -5; level <= 5; ++level) {
        SetSummary s;
        s.set = std::string("relu/v20/c") + (level > 0 ? "+" : "") + std::to_string(level);
        s.sampled = 1;
        s.pct_perfect = 10.0 * (level + 5);
        if (level % 2 == 0) s.avg_min_neurons = 8.0;
        sums.push_back(s);
    }
    const auto pts = figure_points(sums, FigureMetric::PercentLearned);
    std::map<std::string, std::vector<FigurePoint>> by_series;
    for (const auto& p : pts) by_series[p.series].push_back(p);
    REQUIRE(by_series["relu/v20"].size() == 11);
    CHECK(by_series["relu/v20"].front().x == -5.0);
    REQUIRE(by_series["relu/under"].size() == 1);
    CHECK(by_series["relu/under"][0].x == 20.0);
    CHECK(by_series["relu/under"][0].y == doctest::Approx((0 + 10 + 20 + 30 + 40) / 5.0));
    CHECK(by_series["relu/onphase"][0].y == doctest::Approx(50.0));
    CHECK(by_series["relu/over"][0].y == doctest::Approx((60 + 70 + 80 + 90 + 100) / 5.0));
    CHECK(figure_csv(pts).rfind("panel,series,x,y\n", 0) == 0);
    const auto neurons = figure_points(sums, FigureMetric::AvgNeurons);
    std::size_t individual = 0;
    for (const auto& p : neurons) individual += p.panel == "individual" ? 1 : 0;
    CHECK(individual == 5);
    CHECK(figure_svg(pts, "t", "y").find("<polyline") != std::string::npos);
}

TEST_CASE("experiments are deterministic and resumable") {
    const auto a = scratch("run_a");
    const auto b = scratch("run_b");
    const auto full = run_experiment(tiny_phase(a));
    REQUIRE(full.complete);
    CHECK(full.computed == 24);
    for (const char* name : {"rows.csv", "summary.csv", "skips.csv", "fig_percent_learned.csv", "fig_avg_neurons.csv",
                             "fig_percent_learned.svg", "fig_avg_neurons.svg", "journal.log"}) {
        CHECK(fs::exists(a / name));
    }
    CHECK(slurp(a / "summary.csv").rfind(std::string(kSummaryHeader) + "\n", 0) == 0);

    // Interrupted run: 5 jobs, a torn journal line, then resume.
    RunOptions partial;
    partial.max_new_jobs = 5;
    const auto first = run_experiment(tiny_phase(b), partial);
    CHECK_FALSE(first.complete);
    CHECK(first.computed == 5);
    CHECK_FALSE(fs::exists(b / "summary.csv"));
    std::ofstream(b / "journal.log", std::ios::app) << "17,relu/v12/c0,1,v12/c0#1,99";
    const auto second = run_experiment(tiny_phase(b));
    CHECK(second.complete);
    CHECK(second.reused == 5);
    CHECK(second.computed == 19);
    CHECK(slurp(a / "rows.csv") == slurp(b / "rows.csv"));
    CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));
    CHECK(slurp(a / "fig_percent_learned.csv") == slurp(b / "fig_percent_learned.csv"));

    // A complete journal is reused entirely.
    const auto third = run_experiment(tiny_phase(b));
    CHECK(third.computed == 0);
    CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));

    // Summaries recomputed from the persisted rows match, and the report is byte-stable.
    const auto summary_before = slurp(a / "summary.csv");
    const auto svg_before = slurp(a / "fig_avg_neurons.svg");
    const auto rebuilt = rebuild_report(a.string());
    CHECK(summary_csv(rebuilt) == summary_before);
    CHECK(slurp(a / "summary.csv") == summary_before);
    CHECK(slurp(a / "fig_avg_neurons.svg") == svg_before);
    for (const auto& s : rebuilt) {
        if (s.sampled == 0) continue;
        std::size_t perfect = 0;
        for (const auto& r : full.rows) perfect += r.set == s.set && r.sampled && r.perfect ? 1 : 0;
        CHECK(*s.pct_perfect == doctest::Approx(100.0 * perfect / s.sampled));
    }

    // A different spec refuses the journal.
    auto other = tiny_phase(b);
    other.master_seed = 12;
    CHECK_THROWS_AS(run_experiment(other), ConfigError);
}
