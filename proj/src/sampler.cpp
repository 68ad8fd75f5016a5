#include <cassert>

#include "cnfl/rng.hpp"
#include "cnfl/solver.hpp"

namespace cnfl {

void SamplerBudget::validate() const {
    if (max_decisions == 0 || max_models_per_cell == 0 || cell_target == 0) {
        throw ContractError("sampler budget entries must be positive");
    }
    if (!(xor_density > 0.0 && xor_density <= 1.0)) throw ContractError("xor density must lie in (0,1]");
    if (max_models_per_cell < cell_target) throw ContractError("max_models_per_cell must be >= cell_target");
}

std::string to_string(SamplerMode mode) {
    switch (mode) {
        case SamplerMode::Uniform: return "uniform";
        case SamplerMode::Hashed: return "hashed";
        case SamplerMode::Fallback: return "fallback";
    }
    return "unknown";
}

std::optional<CnfFormula> conjoin_xors(const CnfFormula& f, const std::vector<XorConstraint>& xors) {
    std::vector<Clause> clauses = f.clauses();
    auto next_var = static_cast<std::uint32_t>(f.num_vars());
    for (const auto& x : xors) {
        if (x.vars.empty()) {
            if (x.parity) return std::nullopt;
            continue;
        }
        if (x.vars.size() == 1) {
            clauses.push_back({Literal(x.vars[0], !x.parity)});
            continue;
        }
        // acc tracks the parity of the prefix processed so far.
        Literal acc(x.vars[0], false);
        for (std::size_t i = 1; i < x.vars.size(); ++i) {
            const Literal in(x.vars[i], false);
            const Literal out(next_var++, false);
            // out <-> acc xor in
            clauses.push_back({~out, acc, in});
            clauses.push_back({~out, ~acc, ~in});
            clauses.push_back({out, ~acc, in});
            clauses.push_back({out, acc, ~in});
            acc = out;
        }
        clauses.push_back({x.parity ? acc : ~acc});
    }
    return CnfFormula(next_var, std::move(clauses));
}

namespace {

unsigned ceil_log2(const ModelCount& c) {
    if (c <= 1) return 0;
    const auto msb = static_cast<unsigned>(boost::multiprecision::msb(c));
    const ModelCount pow = ModelCount(1) << msb;
    return pow == c ? msb : msb + 1;
}

const Assignment& checked(const CnfFormula& f, const Assignment& a) {
    if (!evaluate(f, a)) throw std::logic_error("sampler produced a non-model");
    return a;
}

Assignment project(const Assignment& a, std::size_t num_vars) {
    Assignment out(num_vars);
    for (std::size_t v = 0; v < num_vars; ++v) out.set(v, a.get(v));
    return out;
}

SampleBatch fallback(const CnfFormula& f, std::size_t want, const SamplerBudget& budget) {
    auto found = enumerate_models_within(f, want, true, budget.max_decisions);
    if (found.models.empty()) {
        throw SamplerFailure(SamplerFailure::Reason::BudgetExhausted, "sampler budget exhausted before any model");
    }
    for (const auto& m : found.models) checked(f, m);
    return {std::move(found.models), SamplerMode::Fallback, std::nullopt};
}

}  // namespace

SampleBatch sample_models(const CnfFormula& f, std::size_t want, std::uint64_t seed, const SamplerBudget& budget) {
    if (want < 1) throw ContractError("sample_models needs want >= 1");
    budget.validate();

    const CountResult counted = count_models(f, budget.max_decisions);
    if (counted.exhausted()) return fallback(f, want, budget);
    const ModelCount& count = *counted.count;
    if (count == 0) throw SamplerFailure(SamplerFailure::Reason::Unsat, "formula is unsatisfiable");

    Rng rng(seed);
    SampleBatch out;
    out.count = count;
    out.models.reserve(want);

    if (count <= ModelCount(budget.cell_target) * 4) {
        const auto all = enumerate_models(f, static_cast<std::size_t>(count), true);
        assert(all.size() == static_cast<std::size_t>(count));
        for (const auto& m : all) checked(f, m);
        for (std::size_t i = 0; i < want; ++i) out.models.push_back(all[rng.below(all.size())]);
        out.mode = SamplerMode::Uniform;
        return out;
    }

    out.mode = SamplerMode::Hashed;
    const unsigned hashes = ceil_log2(count) - ceil_log2(ModelCount(budget.cell_target));
    const std::size_t n = f.num_vars();
    // A long run of empty or oversized cells means the hash family is not
    // splitting this formula well; give up on hashing.
    constexpr int kMaxBadCells = 64;
    int bad_cells = 0;
    while (out.models.size() < want) {
        std::vector<XorConstraint> xors(hashes);
        for (auto& x : xors) {
            for (std::uint32_t v = 0; v < n; ++v) {
                if (rng.bernoulli(budget.xor_density)) x.vars.push_back(v);
            }
            x.parity = rng.coin();
        }
        const auto cell_formula = conjoin_xors(f, xors);
        std::vector<Assignment> cell;
        if (cell_formula) {
            auto found = enumerate_models_within(*cell_formula, budget.max_models_per_cell + 1, false,
                                                 budget.max_decisions);
            if (found.budget_exhausted) return fallback(f, want, budget);
            cell = std::move(found.models);
        }
        if (cell.empty() || cell.size() > budget.max_models_per_cell) {
            if (++bad_cells > kMaxBadCells) return fallback(f, want, budget);
            continue;
        }
        bad_cells = 0;
        // Keep each model of the cell with probability 1/4: every model has the
        // same expected frequency whatever the size of its cell, and one cell
        // never contributes the same model twice.
        std::vector<std::size_t> kept;
        for (std::size_t i = 0; i < cell.size(); ++i) {
            if (rng.below(4) == 0) kept.push_back(i);
        }
        rng.shuffle(std::span<std::size_t>(kept));
        kept.resize(std::min(kept.size(), want - out.models.size()));
        for (std::size_t i : kept) out.models.push_back(checked(f, project(cell[i], n)));
    }
    return out;
}

}  // namespace cnfl
