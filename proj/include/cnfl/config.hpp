#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "cnfl/dataset.hpp"
#include "cnfl/mlp.hpp"

namespace cnfl {

enum class Protocol { Cop, Phase, Ingest };
std::string to_string(Protocol p);

enum class CopFamily { Flat3Gcp, Morphed5Gcp, Clique3 };
std::string to_string(CopFamily f);

/// Problem in an experiment config file: unknown section or key, bad value.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything needed to rerun an experiment. Parsed from an INI-style file:
///
///   [experiment] protocol, seed, formulas_per_set, workers, output
///   [dataset]    positives, negatives, negative_tries
///   [sampler]    max_decisions, max_models_per_cell, cell_target, xor_density
///   [mlp]        hidden, activation, learning_rate, beta1, beta2, epochs, l2, batch_size
///   [cop]        family, nodes, edges, colors, degree, ratios, expected_cliques
///   [phase]      vars, levels, activations, max_neurons
///   [ingest]     formulas, samples
///
/// List values are comma separated.
struct ExperimentSpec {
    Protocol protocol = Protocol::Phase;
    std::uint64_t master_seed = 0;
    std::size_t formulas_per_set = 0;  // 0: 10 for cop, 20 for phase
    std::size_t workers = 0;           // 0: all available cores
    std::string output_dir = "results";

    DatasetOptions dataset;
    MlpConfig mlp;  // `seed` is ignored; every formula derives its own

    // cop
    CopFamily family = CopFamily::Flat3Gcp;
    std::vector<std::size_t> nodes{30};
    std::vector<std::size_t> edges{60};  // flat: one per entry of `nodes`
    std::size_t colors = 0;              // 0: 3 for flat, 5 for morphed
    std::size_t degree = 8;              // ring lattice degree for morphs
    std::vector<double> ratios{1.0};     // morph ratios r
    double expected_cliques = 500.0;

    // phase
    std::vector<std::size_t> vars{10, 20, 30};
    std::vector<int> levels{-5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5};
    std::vector<Activation> activations{Activation::Relu};
    std::size_t max_neurons = 256;

    // ingest
    std::vector<std::string> formula_files;
    std::vector<std::string> sample_files;  // parallel to formula_files; empty entries use the sampler

    [[nodiscard]] std::size_t effective_formulas_per_set() const;
    [[nodiscard]] std::size_t effective_colors() const;
    [[nodiscard]] std::size_t effective_workers() const;

    /// Throws ConfigError on inconsistent settings.
    void validate() const;

    /// Canonical text of every setting that influences results (not workers
    /// or output). Two specs with equal fingerprints produce equal rows.
    [[nodiscard]] std::string fingerprint() const;
};

ExperimentSpec parse_spec(std::istream& in);
ExperimentSpec parse_spec(const std::string& text);
ExperimentSpec load_spec(const std::string& path);

/// Comma-separated list helpers shared with the command line.
std::vector<std::size_t> parse_size_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);
std::vector<std::string> split_list(const std::string& text);

}  // namespace cnfl
