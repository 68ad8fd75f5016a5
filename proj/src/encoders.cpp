#include "cnfl/encoders.hpp"

#include <cmath>

#include "cnfl/rng.hpp"

namespace cnfl {

CnfFormula random_3cnf(std::size_t num_vars, std::size_t num_clauses, std::uint64_t seed) {
    if (num_vars < 3) throw ContractError("random 3-CNF needs at least 3 variables");
    Rng rng(seed);
    std::vector<Clause> clauses;
    clauses.reserve(num_clauses);
    for (std::size_t i = 0; i < num_clauses; ++i) {
        std::uint32_t vars[3];
        for (int j = 0; j < 3; ++j) {
            bool fresh = false;
            while (!fresh) {
                vars[j] = static_cast<std::uint32_t>(rng.below(num_vars));
                fresh = true;
                for (int p = 0; p < j; ++p) fresh = fresh && vars[p] != vars[j];
            }
        }
        Clause c;
        c.reserve(3);
        for (auto v : vars) c.emplace_back(v, rng.coin());
        clauses.push_back(std::move(c));
    }
    return CnfFormula(num_vars, std::move(clauses));
}

PhaseEntry phase_table(std::size_t num_vars) {
    if (num_vars < 1) throw ContractError("phase_table needs at least one variable");
    const auto v = static_cast<double>(num_vars);
    switch (num_vars) {
        // Directly measured thresholds.
        case 20: return {20, 4.550, 91};
        case 50: return {50, 4.360, 218};
        case 100: return {100, 4.310, 431};
        default: break;
    }
    const double clauses = 4.258 * v + 58.26 * std::pow(v, -2.0 / 3.0);
    const auto count = static_cast<std::size_t>(std::floor(clauses));
    return {num_vars, static_cast<double>(count) / v, count};
}

ConstrainednessLevel constrainedness_level(std::size_t num_vars, int offset_index) {
    if (num_vars < 3) throw ContractError("constrainedness grid needs at least 3 variables");
    if (offset_index < -5 || offset_index > 5) throw ContractError("constrainedness offset outside -5..5");
    const PhaseEntry phase = phase_table(num_vars);
    if (offset_index == 0) return {0, phase.phase_ratio, phase.clause_count};
    // v * (count/v + i/10) = (10 count + i v) / 10, rounded half away from zero in integers.
    const long long tenths = 10 * static_cast<long long>(phase.clause_count) +
                             static_cast<long long>(offset_index) * static_cast<long long>(num_vars);
    const long long count = tenths >= 0 ? (tenths + 5) / 10 : -((-tenths + 5) / 10);
    return {offset_index, phase.phase_ratio + 0.1 * offset_index, static_cast<std::size_t>(std::max(0LL, count))};
}

std::vector<ConstrainednessLevel> constrainedness_grid(std::size_t num_vars) {
    std::vector<ConstrainednessLevel> grid;
    grid.reserve(11);
    for (int i = -5; i <= 5; ++i) grid.push_back(constrainedness_level(num_vars, i));
    return grid;
}

CnfFormula encode_gcp(const Graph& g, std::size_t k) {
    if (k < 2) throw ContractError("graph coloring needs at least 2 colors");
    const auto n = static_cast<std::uint32_t>(g.num_vertices());
    const auto kk = static_cast<std::uint32_t>(k);
    std::vector<Clause> clauses;
    clauses.reserve(n + n * k * (k - 1) / 2 + g.num_edges() * k);
    for (std::uint32_t v = 0; v < n; ++v) {
        Clause at_least_one;
        for (std::uint32_t c = 0; c < kk; ++c) at_least_one.emplace_back(gcp_var(v, c, kk), false);
        clauses.push_back(std::move(at_least_one));
    }
    for (std::uint32_t v = 0; v < n; ++v) {
        for (std::uint32_t c1 = 0; c1 < kk; ++c1) {
            for (std::uint32_t c2 = c1 + 1; c2 < kk; ++c2) {
                clauses.push_back({Literal(gcp_var(v, c1, kk), true), Literal(gcp_var(v, c2, kk), true)});
            }
        }
    }
    for (const auto& e : g.edges()) {
        for (std::uint32_t c = 0; c < kk; ++c) {
            clauses.push_back({Literal(gcp_var(e.u, c, kk), true), Literal(gcp_var(e.v, c, kk), true)});
        }
    }
    return CnfFormula(static_cast<std::size_t>(n) * k, std::move(clauses));
}

CnfFormula encode_kclique(const Graph& g, std::size_t k) {
    const auto n = static_cast<std::uint32_t>(g.num_vertices());
    if (k < 1 || k > n) throw ContractError("clique size must satisfy 1 <= k <= n");
    const auto slots = static_cast<std::uint32_t>(k);
    std::vector<Clause> clauses;
    for (std::uint32_t i = 0; i < slots; ++i) {
        Clause at_least_one;
        for (std::uint32_t v = 0; v < n; ++v) at_least_one.emplace_back(clique_var(i, v, n), false);
        clauses.push_back(std::move(at_least_one));
    }
    for (std::uint32_t i = 0; i < slots; ++i) {
        for (std::uint32_t u = 0; u < n; ++u) {
            for (std::uint32_t v = u + 1; v < n; ++v) {
                clauses.push_back({Literal(clique_var(i, u, n), true), Literal(clique_var(i, v, n), true)});
            }
        }
    }
    for (std::uint32_t v = 0; v < n; ++v) {
        for (std::uint32_t i = 0; i < slots; ++i) {
            for (std::uint32_t j = i + 1; j < slots; ++j) {
                clauses.push_back({Literal(clique_var(i, v, n), true), Literal(clique_var(j, v, n), true)});
            }
        }
    }
    for (std::uint32_t i = 0; i < slots; ++i) {
        for (std::uint32_t j = i + 1; j < slots; ++j) {
            for (std::uint32_t u = 0; u < n; ++u) {
                for (std::uint32_t v = u + 1; v < n; ++v) {
                    if (g.has_edge(u, v)) continue;
                    clauses.push_back({Literal(clique_var(i, u, n), true), Literal(clique_var(j, v, n), true)});
                    clauses.push_back({Literal(clique_var(i, v, n), true), Literal(clique_var(j, u, n), true)});
                }
            }
        }
    }
    return CnfFormula(static_cast<std::size_t>(n) * k, std::move(clauses));
}

}  // namespace cnfl
