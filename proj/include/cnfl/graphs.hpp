#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cnfl {

struct Edge {
    std::uint32_t u = 0;
    std::uint32_t v = 0;  // u < v

    friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected simple graph on vertices 0..n-1. Edges are kept sorted.
class Graph {
public:
    Graph() = default;
    /// Endpoints may be given in either order; throws ContractError on
    /// self-loops, duplicates, or endpoints >= n.
    Graph(std::size_t n, std::vector<Edge> edges);

    [[nodiscard]] std::size_t num_vertices() const { return n_; }
    [[nodiscard]] std::size_t num_edges() const { return edges_.size(); }
    [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
    [[nodiscard]] const std::vector<std::uint32_t>& neighbors(std::size_t v) const { return adjacency_[v]; }
    [[nodiscard]] bool has_edge(std::uint32_t a, std::uint32_t b) const;

    friend bool operator==(const Graph& a, const Graph& b) { return a.n_ == b.n_ && a.edges_ == b.edges_; }

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::uint32_t>> adjacency_;
};

struct PlantedColoring {
    std::vector<std::uint32_t> colors;
};

bool is_proper_coloring(const Graph& g, const std::vector<std::uint32_t>& colors);

/// Erdos-Renyi G(n, p).
Graph gnp(std::size_t n, double p, std::uint64_t seed);
/// Uniform graph with exactly m edges.
Graph gnm(std::size_t n, std::size_t m, std::uint64_t seed);
/// Cyclic lattice: vertex i is joined to i +- 1, ..., i +- degree/2 (mod n).
Graph ring_lattice(std::size_t n, std::size_t degree);

/// Planted 3-colorable graph: three equal classes, m cross-class edges split
/// as evenly as possible over the three class pairs.
std::pair<Graph, PlantedColoring> flat_3colorable(std::size_t n, std::size_t m, std::uint64_t seed);

/// r-morph of two graphs on the same vertex set. Keeps E1 & E2, takes
/// round(r * |E1 - E2|) edges of E1 - E2 and tops up from E2 - E1 until the
/// result has |E1| edges (or E2 - E1 runs out).
Graph morph(const Graph& g1, const Graph& g2, double r, std::uint64_t seed);

/// Edge probability giving `expected_cliques` k-cliques on average in G(n, p):
/// p = (E / C(n,k))^(1 / C(k,2)).
double clique_edge_probability(std::size_t n, std::size_t k, double expected_cliques);

/// Exact k-clique count by ordered extension. Exponential; meant for n <= ~60, k <= 4.
std::uint64_t count_k_cliques(const Graph& g, std::size_t k);

/// "u v" per line, 0-indexed.
std::string write_edge_list(const Graph& g);

}  // namespace cnfl
