// Command-line front end: formula generation, dataset sampling, training,
// neuron sweeps and experiment campaigns.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cnfl/config.hpp"
#include "cnfl/dataset.hpp"
#include "cnfl/encoders.hpp"
#include "cnfl/graphs.hpp"
#include "cnfl/harness.hpp"
#include "cnfl/mlp.hpp"
#include "cnfl/rng.hpp"
#include "cnfl/validation.hpp"

namespace {

using namespace cnfl;

constexpr int kOk = 0;
constexpr int kUserError = 1;
constexpr int kInternalError = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string fmt6(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

struct GenArgs {
    std::string family = "random3cnf";
    std::size_t vars = 20;
    int level = 0;
    std::optional<std::size_t> clauses;
    std::size_t nodes = 30;
    std::size_t edges = 60;
    std::size_t colors = 0;
    std::size_t degree = 8;
    double ratio = 1.0;
    double expected_cliques = 500.0;
    std::size_t k = 3;
    std::uint64_t seed = 0;
    std::string out;
};

int run_gen(const GenArgs& a) {
    std::cerr << "seed: " << a.seed << '\n';
    CnfFormula f;
    std::string params;
    if (a.family == "random3cnf") {
        if (a.level < -5 || a.level > 5) throw UsageError("--level must lie in -5..5");
        const std::size_t m = a.clauses ? *a.clauses : constrainedness_level(a.vars, a.level).clause_count;
        f = random_3cnf(a.vars, m, a.seed);
        params = "vars=" + std::to_string(a.vars) + " clauses=" + std::to_string(m) +
                 (a.clauses ? "" : " level=" + std::to_string(a.level));
    } else if (a.family == "flat3gcp") {
        const std::size_t k = a.colors ? a.colors : 3;
        f = encode_gcp(flat_3colorable(a.nodes, a.edges, a.seed).first, k);
        params = "nodes=" + std::to_string(a.nodes) + " edges=" + std::to_string(a.edges) + " colors=" + std::to_string(k);
    } else if (a.family == "morph5gcp") {
        const std::size_t k = a.colors ? a.colors : 5;
        const Graph lattice = ring_lattice(a.nodes, a.degree);
        const Graph random = gnm(a.nodes, lattice.num_edges(), derive_seed(a.seed, {1}));
        f = encode_gcp(morph(random, lattice, a.ratio, derive_seed(a.seed, {2})), k);
        params = "nodes=" + std::to_string(a.nodes) + " degree=" + std::to_string(a.degree) +
                 " ratio=" + std::to_string(a.ratio) + " colors=" + std::to_string(k);
    } else if (a.family == "clique") {
        const double p = clique_edge_probability(a.nodes, a.k, a.expected_cliques);
        f = encode_kclique(gnp(a.nodes, p, a.seed), a.k);
        params = "nodes=" + std::to_string(a.nodes) + " k=" + std::to_string(a.k) + " p=" + fmt6(p);
    } else {
        throw UsageError("unknown family '" + a.family + "' (random3cnf, flat3gcp, morph5gcp, clique)");
    }
    f = f.with_comment("generator=" + a.family + " " + params + " seed=" + std::to_string(a.seed));
    emit(a.out, write_dimacs(f));
    return kOk;
}

struct SampleArgs {
    std::string cnf;
    std::string samples;
    std::size_t pos = 500;
    std::size_t neg = 500;
    std::uint64_t negative_tries = 1000;
    std::uint64_t seed = 0;
    SamplerBudget budget;
    std::string out;
};

int run_sample(const SampleArgs& a) {
    std::cerr << "seed: " << a.seed << '\n';
    const CnfFormula f = read_dimacs_file(a.cnf);
    DatasetOptions opts;
    opts.positives = a.pos;
    opts.negatives = a.neg;
    opts.negative_tries_per_sample = a.negative_tries;
    opts.budget = a.budget;
    opts.generator = "file";
    opts.formula_id = std::filesystem::path(a.cnf).filename().string();
    Dataset d;
    try {
        if (!a.samples.empty()) {
            auto pos = read_external_samples(a.samples, f);
            if (pos.size() > a.pos) pos.resize(a.pos);
            d = assemble_dataset(f, std::move(pos), "external", a.seed, opts);
        } else {
            d = build_dataset(f, a.seed, opts);
        }
    } catch (const PositivesUnavailable& e) {
        throw std::runtime_error(std::string("no positive samples: ") + e.what());
    }
    std::cerr << "positives: " << d.positives() << " negatives: " << d.negatives()
              << " sampler: " << *d.provenance.find("sampler_mode") << '\n';
    emit(a.out, write_csv(d));
    return kOk;
}

struct TrainArgs {
    std::string data;
    std::string hidden = "200,100";
    std::string activation = "relu";
    MlpConfig cfg;
    std::size_t folds = 5;
    bool tree = false;
    std::size_t max_neurons = kMaxSweepNeurons;
};

MlpConfig resolve(const TrainArgs& a) {
    MlpConfig cfg = a.cfg;
    cfg.activation = parse_activation(a.activation);
    cfg.hidden_layers = parse_size_list(a.hidden);
    cfg.validate();
    return cfg;
}

std::string report_line(const std::string& model, const CvReport& r) {
    std::string s = model;
    for (double acc : r.fold_accuracies) s += ',' + fmt6(acc);
    s += ',' + fmt6(r.mean_accuracy) + ',' + fmt6(r.min_accuracy) + ',' + (r.perfect ? "1" : "0") + '\n';
    return s;
}

int run_train(const TrainArgs& a) {
    const MlpConfig cfg = resolve(a);
    std::cerr << "seed: " << cfg.seed << '\n';
    const Dataset d = read_csv_file(a.data);
    std::string header = "model";
    for (std::size_t i = 1; i <= a.folds; ++i) header += ",fold" + std::to_string(i);
    std::cout << header << ",mean,min,perfect\n";
    std::cout << report_line("mlp", cross_validate(d, cfg, a.folds));
    if (a.tree) std::cout << report_line("tree", cross_validate_tree(d, a.folds));
    return kOk;
}

int run_sweep(const TrainArgs& a) {
    const MlpConfig cfg = resolve(a);
    std::cerr << "seed: " << cfg.seed << '\n';
    const Dataset d = read_csv_file(a.data);
    const auto sweep = neuron_sweep(d, cfg, a.max_neurons);
    std::cout << "neurons,mean,min,perfect\n";
    for (const auto& [w, r] : sweep.reports) {
        std::cout << w << ',' << fmt6(r.mean_accuracy) << ',' << fmt6(r.min_accuracy) << ',' << (r.perfect ? 1 : 0)
                  << '\n';
    }
    std::cerr << "min_neurons: " << (sweep.min_neurons ? std::to_string(*sweep.min_neurons) : "not learned") << '\n';
    return kOk;
}

struct ExperimentArgs {
    std::string config;
    std::optional<std::size_t> workers;
    std::optional<std::string> output;
    std::size_t max_jobs = 0;
};

int run_experiment_cmd(const ExperimentArgs& a) {
    ExperimentSpec spec = load_spec(a.config);
    if (a.workers) spec.workers = *a.workers;
    if (a.output) spec.output_dir = *a.output;
    std::cerr << "master seed: " << spec.master_seed << "  workers: " << spec.effective_workers()
              << "  output: " << spec.output_dir << '\n';
    RunOptions opts;
    opts.max_new_jobs = a.max_jobs;
    opts.log = &std::cerr;
    const auto result = run_experiment(spec, opts);
    std::cerr << "reused " << result.reused << " journaled rows, computed " << result.computed << '\n';
    if (!result.complete) {
        std::cerr << "stopped before the last job; rerun the same command to resume\n";
        return kOk;
    }
    std::cout << summary_csv(result.summaries);
    return kOk;
}

int run_report(const std::string& dir) {
    std::cout << summary_csv(rebuild_report(dir));
    return kOk;
}

void add_sampler_flags(CLI::App* cmd, SamplerBudget& b) {
    cmd->add_option("--max-decisions", b.max_decisions, "Search decisions allowed for counting and each cell")
        ->capture_default_str();
    cmd->add_option("--max-models-per-cell", b.max_models_per_cell, "Largest accepted hash cell")->capture_default_str();
    cmd->add_option("--cell-target", b.cell_target, "Desired models per hash cell")->capture_default_str();
    cmd->add_option("--xor-density", b.xor_density, "Probability that a variable enters a parity constraint")
        ->capture_default_str();
}

void add_mlp_flags(CLI::App* cmd, TrainArgs& a) {
    cmd->add_option("--data", a.data, "Dataset CSV")->required();
    cmd->add_option("--activation", a.activation, "Hidden activation: relu or logistic")->capture_default_str();
    cmd->add_option("--learning-rate", a.cfg.learning_rate, "Adam step size")->capture_default_str();
    cmd->add_option("--beta1", a.cfg.beta1, "Adam first-moment decay")->capture_default_str();
    cmd->add_option("--beta2", a.cfg.beta2, "Adam second-moment decay")->capture_default_str();
    cmd->add_option("--epochs", a.cfg.epochs, "Training epochs")->capture_default_str();
    cmd->add_option("--l2", a.cfg.l2, "L2 penalty on weights")->capture_default_str();
    cmd->add_option("--batch-size", a.cfg.batch_size, "Mini-batch size")->capture_default_str();
    cmd->add_option("--seed", a.cfg.seed, "Seed for weights and batch order")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generate CNF formulas, sample datasets and measure neural-network learnability"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Write a generated formula as DIMACS");
    gen_cmd->add_option("--family", gen.family, "random3cnf, flat3gcp, morph5gcp or clique")->capture_default_str();
    gen_cmd->add_option("--vars", gen.vars, "random3cnf: variable count")->capture_default_str();
    gen_cmd->add_option("--level", gen.level, "random3cnf: constrainedness level -5..5")->capture_default_str();
    gen_cmd->add_option("--clauses", gen.clauses, "random3cnf: explicit clause count instead of --level");
    gen_cmd->add_option("--nodes", gen.nodes, "Graph vertex count")->capture_default_str();
    gen_cmd->add_option("--edges", gen.edges, "flat3gcp: edge count")->capture_default_str();
    gen_cmd->add_option("--colors", gen.colors, "Colors for GCP families (default 3 flat, 5 morphed)");
    gen_cmd->add_option("--degree", gen.degree, "morph5gcp: ring lattice degree")->capture_default_str();
    gen_cmd->add_option("--ratio", gen.ratio, "morph5gcp: morph ratio r")->capture_default_str();
    gen_cmd->add_option("--k", gen.k, "clique: clique size")->capture_default_str();
    gen_cmd->add_option("--expected-cliques", gen.expected_cliques, "clique: expected k-clique count of G(n,p)")
        ->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
    gen_cmd->add_option("--out", gen.out, "Output path (default stdout)");

    SampleArgs sample;
    auto* sample_cmd = app.add_subcommand("sample", "Build a labelled dataset CSV for a DIMACS formula");
    sample_cmd->add_option("--cnf", sample.cnf, "DIMACS formula")->required();
    sample_cmd->add_option("--samples", sample.samples, "External positive samples instead of the sampler");
    sample_cmd->add_option("--pos", sample.pos, "Positive samples wanted")->capture_default_str();
    sample_cmd->add_option("--neg", sample.neg, "Negative samples wanted")->capture_default_str();
    sample_cmd->add_option("--negative-tries", sample.negative_tries, "Coin-flip trials per wanted negative")
        ->capture_default_str();
    sample_cmd->add_option("--seed", sample.seed, "Random seed")->capture_default_str();
    sample_cmd->add_option("--out", sample.out, "Output path (default stdout)");
    add_sampler_flags(sample_cmd, sample.budget);

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Cross-validate an MLP on a dataset CSV");
    add_mlp_flags(train_cmd, train);
    train_cmd->add_option("--hidden", train.hidden, "Hidden layer widths, comma separated")->capture_default_str();
    train_cmd->add_option("--folds", train.folds, "Cross-validation folds")->capture_default_str();
    train_cmd->add_flag("--tree", train.tree, "Also cross-validate the decision tree baseline");

    TrainArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Smallest single hidden layer that learns a dataset perfectly");
    add_mlp_flags(sweep_cmd, sweep);
    sweep_cmd->add_option("--max-neurons", sweep.max_neurons, "Largest width tried")->capture_default_str();

    ExperimentArgs exp;
    auto* exp_cmd = app.add_subcommand("experiment", "Run or resume an experiment config");
    exp_cmd->add_option("--config", exp.config, "Experiment config file")->required();
    exp_cmd->add_option("--workers", exp.workers, "Worker threads (default: all cores, or the config value)");
    exp_cmd->add_option("--output", exp.output, "Output directory (overrides the config)");
    exp_cmd->add_option("--max-jobs", exp.max_jobs, "Stop after this many new formulas (0: run all)")
        ->capture_default_str();

    std::string report_dir;
    auto* report_cmd = app.add_subcommand("report", "Rewrite summaries and figures from a journal");
    report_cmd->add_option("--dir", report_dir, "Experiment output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUserError;
    }

    try {
        if (*gen_cmd) return run_gen(gen);
        if (*sample_cmd) return run_sample(sample);
        if (*train_cmd) return run_train(train);
        if (*sweep_cmd) {
            sweep.hidden = "1";
            return run_sweep(sweep);
        }
        if (*exp_cmd) return run_experiment_cmd(exp);
        if (*report_cmd) return run_report(report_dir);
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUserError;
    } catch (const std::logic_error& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternalError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUserError;
    } catch (...) {
        std::cerr << "internal error\n";
        return kInternalError;
    }
    return kInternalError;
}
