#include "cnfl/tree.hpp"

#include <algorithm>
#include <functional>

namespace cnfl {

bool DecisionTree::predict(const Assignment& features) const {
    int at = 0;
    while (nodes_[static_cast<std::size_t>(at)].feature >= 0) {
        const auto& node = nodes_[static_cast<std::size_t>(at)];
        at = features.get(static_cast<std::size_t>(node.feature)) ? node.if_true : node.if_false;
    }
    return nodes_[static_cast<std::size_t>(at)].prediction;
}

std::size_t DecisionTree::depth() const {
    std::function<std::size_t(int)> walk = [&](int at) -> std::size_t {
        const auto& node = nodes_[static_cast<std::size_t>(at)];
        if (node.feature < 0) return 0;
        return 1 + std::max(walk(node.if_false), walk(node.if_true));
    };
    return nodes_.empty() ? 0 : walk(0);
}

std::size_t DecisionTree::leaves() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.feature < 0; }));
}

namespace {

double gini_weighted(std::size_t pos, std::size_t total) {
    if (total == 0) return 0.0;
    const double p = static_cast<double>(pos) / static_cast<double>(total);
    // Gini impurity times the node size, so children can be summed directly.
    return static_cast<double>(total) * 2.0 * p * (1.0 - p);
}

}  // namespace

DecisionTree grow_tree(std::span<const Sample> rows, std::size_t num_vars) {
    if (rows.empty()) throw ContractError("cannot grow a tree on an empty dataset");
    std::vector<DecisionTree::Node> nodes;
    struct Pending {
        int node;
        std::vector<std::uint32_t> members;
    };
    std::vector<Pending> stack;
    std::vector<std::uint32_t> all(rows.size());
    for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
    nodes.emplace_back();
    stack.push_back({0, std::move(all)});

    std::vector<std::size_t> ones(num_vars);
    std::vector<std::size_t> ones_pos(num_vars);
    while (!stack.empty()) {
        Pending job = std::move(stack.back());
        stack.pop_back();
        std::size_t pos = 0;
        for (auto r : job.members) pos += rows[r].label ? 1 : 0;
        const std::size_t total = job.members.size();
        {
            auto& node = nodes[static_cast<std::size_t>(job.node)];
            node.positives = pos;
            node.negatives = total - pos;
            node.prediction = pos > total - pos;
        }
        if (pos == 0 || pos == total) continue;

        std::fill(ones.begin(), ones.end(), 0);
        std::fill(ones_pos.begin(), ones_pos.end(), 0);
        for (auto r : job.members) {
            const auto& f = rows[r].features;
            const bool label = rows[r].label;
            for (std::size_t v = 0; v < num_vars; ++v) {
                if (f.get(v)) {
                    ++ones[v];
                    if (label) ++ones_pos[v];
                }
            }
        }
        int best = -1;
        double best_impurity = 0.0;
        for (std::size_t v = 0; v < num_vars; ++v) {
            if (ones[v] == 0 || ones[v] == total) continue;
            const double impurity = gini_weighted(ones_pos[v], ones[v]) + gini_weighted(pos - ones_pos[v], total - ones[v]);
            if (best < 0 || impurity < best_impurity) {
                best = static_cast<int>(v);
                best_impurity = impurity;
            }
        }
        if (best < 0) continue;

        Pending lo{static_cast<int>(nodes.size()), {}};
        Pending hi{static_cast<int>(nodes.size() + 1), {}};
        for (auto r : job.members) {
            (rows[r].features.get(static_cast<std::size_t>(best)) ? hi : lo).members.push_back(r);
        }
        auto& node = nodes[static_cast<std::size_t>(job.node)];
        node.feature = best;
        node.if_false = lo.node;
        node.if_true = hi.node;
        nodes.emplace_back();
        nodes.emplace_back();
        stack.push_back(std::move(hi));
        stack.push_back(std::move(lo));
    }
    return DecisionTree(std::move(nodes));
}

DecisionTree train_decision_tree(const Dataset& d) {
    const std::size_t pos = d.positives();
    if (d.samples.empty() || pos == 0 || pos == d.samples.size()) {
        throw ContractError("decision tree needs a non-empty dataset with both labels");
    }
    return grow_tree(d.samples, d.num_vars);
}

}  // namespace cnfl
