#pragma once

#include <cstdint>
#include <vector>

#include "cnfl/formula.hpp"
#include "cnfl/graphs.hpp"

namespace cnfl {

/// Satisfiability threshold for random 3-CNFs with `num_vars` variables.
struct PhaseEntry {
    std::size_t num_vars = 0;
    double phase_ratio = 0.0;
    std::size_t clause_count = 0;
};

struct ConstrainednessLevel {
    int offset_index = 0;  // -5..+5, steps of 0.1 in clause/variable ratio
    double ratio = 0.0;
    std::size_t clause_count = 0;
};

/// Fixed clause length 3, three distinct variables per clause, each literal
/// negated with probability 1/2. Duplicate clauses may occur.
CnfFormula random_3cnf(std::size_t num_vars, std::size_t num_clauses, std::uint64_t seed);

/// Measured thresholds for v = 20, 50, 100; everywhere else the clause count is
/// floor(4.258 v + 58.26 v^(-2/3)) and the ratio is that count over v.
PhaseEntry phase_table(std::size_t num_vars);

/// The 11 levels phase_ratio - 0.5, ..., phase_ratio + 0.5.
std::vector<ConstrainednessLevel> constrainedness_grid(std::size_t num_vars);
ConstrainednessLevel constrainedness_level(std::size_t num_vars, int offset_index);

/// Variable for "vertex v has color c" in the k-coloring encoding (0-indexed).
constexpr std::uint32_t gcp_var(std::uint32_t vertex, std::uint32_t color, std::uint32_t k) {
    return vertex * k + color;
}

/// Direct k-coloring encoding: at-least-one and pairwise at-most-one color per
/// vertex, plus one conflict clause per edge and color.
CnfFormula encode_gcp(const Graph& g, std::size_t k);

/// Variable for "clique slot i holds vertex v".
constexpr std::uint32_t clique_var(std::uint32_t slot, std::uint32_t vertex, std::uint32_t n) {
    return slot * n + vertex;
}

/// k slots, each holding exactly one vertex; no vertex in two slots; vertices
/// in different slots must be adjacent.
CnfFormula encode_kclique(const Graph& g, std::size_t k);

}  // namespace cnfl
