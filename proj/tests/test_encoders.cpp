#include <cmath>
#include <set>

#include "cnfl/encoders.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace cnfl;

TEST_CASE("random_3cnf shape") {
    const auto one = random_3cnf(3, 1, 5);
    REQUIRE(one.num_clauses() == 1);
    std::set<std::uint32_t> vars;
    for (auto l : one.clauses()[0]) vars.insert(l.var());
    CHECK(vars == std::set<std::uint32_t>{0, 1, 2});

    const auto f = random_3cnf(20, 91, 7);
    CHECK(f.num_vars() == 20);
    CHECK(f.num_clauses() == 91);
    CHECK(static_cast<double>(f.num_clauses()) / 20.0 == doctest::Approx(4.55));
    for (const auto& c : f.clauses()) {
        REQUIRE(c.size() == 3);
        REQUIRE(is_simple_clause(c));
    }
    CHECK(random_3cnf(20, 91, 7) == f);
    CHECK_THROWS_AS(random_3cnf(2, 1, 0), ContractError);
}

TEST_CASE("random_3cnf variable and polarity frequencies") {
    const std::size_t clauses = 10000;
    const auto f = random_3cnf(10, clauses, 99);
    std::vector<double> appear(10, 0.0);
    double negated = 0.0;
    for (const auto& c : f.clauses()) {
        for (auto l : c) {
            appear[l.var()] += 1.0;
            negated += l.negated() ? 1.0 : 0.0;
        }
    }
    const double n = static_cast<double>(clauses);
    const double sigma_var = std::sqrt(n * 0.3 * 0.7);
    for (double a : appear) CHECK(std::abs(a - 0.3 * n) <= 3.0 * sigma_var);
    const double lits = 3.0 * n;
    CHECK(std::abs(negated - 0.5 * lits) <= 3.0 * std::sqrt(lits * 0.25));
}

TEST_CASE("phase_table reproduces the threshold table") {
    // Printed ratios, three decimals.
    const std::vector<std::pair<std::size_t, double>> printed{
        {10, 5.500}, {20, 4.550}, {30, 4.433}, {40, 4.375}, {50, 4.360},
        {60, 4.317}, {70, 4.300}, {80, 4.287}, {90, 4.289}, {100, 4.310}};
    for (auto [v, ratio] : printed) {
        const auto e = phase_table(v);
        CHECK(e.num_vars == v);
        // 343/80 = 4.2875 is printed as 4.287, so allow half a unit in the last place.
        CHECK(std::abs(e.phase_ratio - ratio) <= 5e-4 + 1e-12);
        CHECK(std::llround(e.phase_ratio * static_cast<double>(v)) == static_cast<long long>(e.clause_count));
    }
    // Formula rows follow floor(4.258 v + 58.26 v^(-2/3)).
    for (std::size_t v : {10, 30, 40, 60, 70, 80, 90, 13, 200}) {
        const double c = 4.258 * static_cast<double>(v) + 58.26 * std::pow(static_cast<double>(v), -2.0 / 3.0);
        CHECK(phase_table(v).clause_count == static_cast<std::size_t>(std::floor(c)));
    }
    CHECK(phase_table(10).clause_count == 55);
    CHECK(phase_table(50).clause_count == 218);
}

TEST_CASE("constrainedness_grid") {
    const auto g20 = constrainedness_grid(20);
    REQUIRE(g20.size() == 11);
    CHECK(g20.front().offset_index == -5);
    CHECK(g20.front().ratio == doctest::Approx(4.05));
    CHECK(g20.front().clause_count == 81);
    CHECK(g20.back().ratio == doctest::Approx(5.05));
    CHECK(g20.back().clause_count == 101);
    CHECK(constrainedness_grid(10)[5].clause_count == 55);
    for (std::size_t v = 10; v <= 120; ++v) {
        const auto grid = constrainedness_grid(v);
        REQUIRE(grid[5].clause_count == phase_table(v).clause_count);
        for (std::size_t i = 1; i < grid.size(); ++i) REQUIRE(grid[i].clause_count > grid[i - 1].clause_count);
    }
    // Half-way cases round away from zero: v = 15 has 10*70 + 15 = 715 tenths at +1.
    CHECK(constrainedness_level(15, 1).clause_count == (phase_table(15).clause_count * 10 + 15 + 5) / 10);
}

TEST_CASE("encode_gcp sizes") {
    auto [flat, coloring] = flat_3colorable(30, 60, 3);
    const auto f = encode_gcp(flat, 3);
    CHECK(f.num_vars() == 90);
    CHECK(f.num_clauses() == 300);
    const auto morphed = morph(gnm(100, 400, 1), ring_lattice(100, 8), 0.5, 2);
    const auto g = encode_gcp(morphed, 5);
    CHECK(g.num_vars() == 500);
    CHECK(g.num_clauses() == 3100);
    for (const auto& c : g.clauses()) REQUIRE(is_simple_clause(c));

    // The planted coloring is a model.
    Assignment a(90);
    for (std::uint32_t v = 0; v < 30; ++v) a.set(gcp_var(v, coloring.colors[v], 3), true);
    CHECK(evaluate(f, a));
}

TEST_CASE("encode_gcp models are exactly the proper colorings") {
    const Graph triangle(3, {{0, 1}, {1, 2}, {0, 2}});
    CHECK(oracle::count(encode_gcp(triangle, 3)) == 6);

    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const std::size_t n = 3 + seed % 3;  // n*k <= 15 with k = 3, <= 10 with k = 2
        const std::size_t k = 2 + seed % 2;
        const auto g = gnp(n, 0.5, seed);
        const auto f = encode_gcp(g, k);
        const auto models = oracle::models(f);
        std::set<std::vector<std::uint32_t>> decoded;
        for (auto m : models) {
            std::vector<std::uint32_t> colors(n, 99);
            for (std::uint32_t v = 0; v < n; ++v) {
                for (std::uint32_t c = 0; c < k; ++c) {
                    if ((m >> gcp_var(v, c, static_cast<std::uint32_t>(k))) & 1u) {
                        REQUIRE(colors[v] == 99);
                        colors[v] = c;
                    }
                }
            }
            REQUIRE(is_proper_coloring(g, colors));
            decoded.insert(colors);
        }
        // Count proper colorings independently.
        std::size_t proper = 0;
        std::vector<std::uint32_t> colors(n, 0);
        for (std::size_t code = 0; code < static_cast<std::size_t>(std::pow(k, n)); ++code) {
            std::size_t x = code;
            for (std::size_t v = 0; v < n; ++v) {
                colors[v] = static_cast<std::uint32_t>(x % k);
                x /= k;
            }
            proper += is_proper_coloring(g, colors) ? 1 : 0;
        }
        REQUIRE(decoded.size() == models.size());
        REQUIRE(models.size() == proper);
    }
}

TEST_CASE("encode_kclique") {
    CHECK(encode_kclique(gnp(50, 0.2944, 1), 3).num_vars() == 150);
    CHECK(encode_kclique(gnp(100, 0.1457, 1), 3).num_vars() == 300);
    CHECK(encode_kclique(gnp(150, 0.0968, 1), 3).num_vars() == 450);

    const auto k4 = gnp(4, 1.0, 0);
    CHECK(oracle::count(encode_kclique(k4, 3)) == 24);
    CHECK(oracle::count(encode_kclique(ring_lattice(4, 2), 3)) == 0);

    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const std::size_t k = 2 + seed % 2;
        const std::size_t n = k == 2 ? 4 + seed % 6 : 4 + seed % 3;  // k*n <= 18
        const auto g = gnp(n, 0.45, seed);
        const auto models = oracle::count(encode_kclique(g, k));
        const auto cliques = count_k_cliques(g, k);
        REQUIRE((models > 0) == (cliques > 0));
        // Every ordering of every clique fills the slots.
        std::uint64_t orderings = cliques;
        for (std::size_t i = 2; i <= k; ++i) orderings *= i;
        REQUIRE(models == orderings);
    }
}
