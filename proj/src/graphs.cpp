#include "cnfl/graphs.hpp"

#include <algorithm>
#include <array>
#include <iterator>
#include <span>
#include <cmath>
#include <set>
#include <sstream>

#include "cnfl/formula.hpp"
#include "cnfl/rng.hpp"

namespace cnfl {

Graph::Graph(std::size_t n, std::vector<Edge> edges) : n_{n}, edges_{std::move(edges)}, adjacency_(n) {
    for (auto& e : edges_) {
        if (e.u == e.v) throw ContractError("self-loop on vertex " + std::to_string(e.u));
        if (e.u > e.v) std::swap(e.u, e.v);
        if (e.v >= n_) throw ContractError("edge endpoint " + std::to_string(e.v) + " out of range");
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
        throw ContractError("duplicate edge");
    }
    for (const auto& e : edges_) {
        adjacency_[e.u].push_back(e.v);
        adjacency_[e.v].push_back(e.u);
    }
    for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
}

bool Graph::has_edge(std::uint32_t a, std::uint32_t b) const {
    if (a >= n_ || b >= n_) return false;
    const auto& adj = adjacency_[a];
    return std::binary_search(adj.begin(), adj.end(), b);
}

bool is_proper_coloring(const Graph& g, const std::vector<std::uint32_t>& colors) {
    if (colors.size() != g.num_vertices()) return false;
    return std::none_of(g.edges().begin(), g.edges().end(),
                        [&](const Edge& e) { return colors[e.u] == colors[e.v]; });
}

namespace {

// Floyd's algorithm: m distinct values from [0, universe), returned sorted.
std::vector<std::uint64_t> sample_distinct(std::uint64_t universe, std::uint64_t m, Rng& rng) {
    std::set<std::uint64_t> chosen;
    for (std::uint64_t j = universe - m; j < universe; ++j) {
        const std::uint64_t t = rng.below(j + 1);
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    return {chosen.begin(), chosen.end()};
}

template <class T>
std::vector<T> sample_subset(const std::vector<T>& items, std::size_t m, Rng& rng) {
    std::vector<T> out;
    out.reserve(m);
    for (auto i : sample_distinct(items.size(), m, rng)) out.push_back(items[i]);
    return out;
}

std::vector<Edge> all_pairs(std::size_t n) {
    std::vector<Edge> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (std::uint32_t u = 0; u < n; ++u) {
        for (std::uint32_t v = u + 1; v < n; ++v) pairs.push_back({u, v});
    }
    return pairs;
}

double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    long double r = 1.0L;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    return static_cast<double>(r);
}

}  // namespace

Graph gnp(std::size_t n, double p, std::uint64_t seed) {
    if (n < 1) throw ContractError("gnp needs at least one vertex");
    if (!(p >= 0.0 && p <= 1.0)) throw ContractError("gnp probability outside [0,1]");
    Rng rng(seed);
    std::vector<Edge> edges;
    for (std::uint32_t u = 0; u < n; ++u) {
        for (std::uint32_t v = u + 1; v < n; ++v) {
            if (rng.uniform() < p) edges.push_back({u, v});
        }
    }
    return Graph(n, std::move(edges));
}

Graph gnm(std::size_t n, std::size_t m, std::uint64_t seed) {
    const auto pairs = all_pairs(n);
    if (m > pairs.size()) {
        throw ContractError("gnm: " + std::to_string(m) + " edges exceed C(n,2) = " + std::to_string(pairs.size()));
    }
    Rng rng(seed);
    return Graph(n, sample_subset(pairs, m, rng));
}

Graph ring_lattice(std::size_t n, std::size_t degree) {
    if (degree % 2 != 0) throw ContractError("ring lattice degree must be even");
    if (degree >= n) throw ContractError("ring lattice degree must be below the vertex count");
    std::vector<Edge> edges;
    edges.reserve(n * degree / 2);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::size_t d = 1; d <= degree / 2; ++d) {
            edges.push_back({i, static_cast<std::uint32_t>((i + d) % n)});
        }
    }
    return Graph(n, std::move(edges));
}

std::pair<Graph, PlantedColoring> flat_3colorable(std::size_t n, std::size_t m, std::uint64_t seed) {
    if (n == 0 || n % 3 != 0) throw ContractError("flat_3colorable needs a positive multiple of 3 vertices");
    const std::size_t side = n / 3;
    const std::size_t per_pair_max = side * side;
    if (m > 3 * per_pair_max) {
        throw ContractError("flat_3colorable: " + std::to_string(m) + " edges exceed the " +
                            std::to_string(3 * per_pair_max) + " cross-class pairs");
    }
    Rng rng(seed);

    std::vector<std::uint32_t> order(n);
    for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(std::span(order));
    PlantedColoring coloring{std::vector<std::uint32_t>(n)};
    std::vector<std::vector<std::uint32_t>> classes(3);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::uint32_t>(i / side);
        coloring.colors[order[i]] = c;
        classes[c].push_back(order[i]);
    }

    // Balanced split of m over the class pairs; the remainder goes to random pairs.
    std::array<std::size_t, 3> quota{m / 3, m / 3, m / 3};
    std::array<std::size_t, 3> pair_ids{0, 1, 2};
    rng.shuffle(std::span<std::size_t>(pair_ids));
    for (std::size_t i = 0; i < m % 3; ++i) ++quota[pair_ids[i]];

    constexpr std::array<std::pair<int, int>, 3> class_pairs{{{0, 1}, {0, 2}, {1, 2}}};
    std::vector<Edge> edges;
    edges.reserve(m);
    for (std::size_t p = 0; p < 3; ++p) {
        const auto& a = classes[class_pairs[p].first];
        const auto& b = classes[class_pairs[p].second];
        for (auto idx : sample_distinct(per_pair_max, quota[p], rng)) {
            edges.push_back({a[idx / side], b[idx % side]});
        }
    }
    return {Graph(n, std::move(edges)), std::move(coloring)};
}

Graph morph(const Graph& g1, const Graph& g2, double r, std::uint64_t seed) {
    if (g1.num_vertices() != g2.num_vertices()) throw ContractError("morph: vertex counts differ");
    if (!(r >= 0.0 && r <= 1.0)) throw ContractError("morph ratio outside [0,1]");
    std::vector<Edge> common, only1, only2;
    std::set_intersection(g1.edges().begin(), g1.edges().end(), g2.edges().begin(), g2.edges().end(),
                          std::back_inserter(common));
    std::set_difference(g1.edges().begin(), g1.edges().end(), g2.edges().begin(), g2.edges().end(),
                        std::back_inserter(only1));
    std::set_difference(g2.edges().begin(), g2.edges().end(), g1.edges().begin(), g1.edges().end(),
                        std::back_inserter(only2));

    Rng rng(seed);
    const auto from1 = static_cast<std::size_t>(std::llround(r * static_cast<double>(only1.size())));
    const std::size_t from2 = std::min(only2.size(), g1.num_edges() - common.size() - from1);

    std::vector<Edge> edges = common;
    for (const auto& e : sample_subset(only1, from1, rng)) edges.push_back(e);
    for (const auto& e : sample_subset(only2, from2, rng)) edges.push_back(e);
    return Graph(g1.num_vertices(), std::move(edges));
}

double clique_edge_probability(std::size_t n, std::size_t k, double expected_cliques) {
    if (k < 2 || k > n) throw ContractError("clique size must satisfy 2 <= k <= n");
    const double subsets = binomial(n, k);
    if (!(expected_cliques > 0.0)) throw ContractError("expected clique count must be positive");
    if (expected_cliques > subsets) {
        throw ContractError("expected clique count exceeds C(n,k); would need p > 1");
    }
    return std::pow(expected_cliques / subsets, 1.0 / binomial(k, 2));
}

namespace {

std::uint64_t extend_cliques(const Graph& g, const std::vector<std::uint32_t>& candidates, std::size_t remaining) {
    if (remaining == 0) return 1;
    if (candidates.size() < remaining) return 0;
    if (remaining == 1) return candidates.size();
    std::uint64_t total = 0;
    std::vector<std::uint32_t> next;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        next.clear();
        const auto& adj = g.neighbors(candidates[i]);
        // Later candidates only, so each clique is counted once in increasing order.
        std::set_intersection(candidates.begin() + static_cast<std::ptrdiff_t>(i) + 1, candidates.end(),
                              adj.begin(), adj.end(), std::back_inserter(next));
        total += extend_cliques(g, next, remaining - 1);
    }
    return total;
}

}  // namespace

std::uint64_t count_k_cliques(const Graph& g, std::size_t k) {
    std::vector<std::uint32_t> all(g.num_vertices());
    for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
    return extend_cliques(g, all, k);
}

std::string write_edge_list(const Graph& g) {
    std::ostringstream out;
    for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
    return out.str();
}

}  // namespace cnfl
