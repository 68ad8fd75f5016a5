#include <algorithm>
#include <cassert>

#include "cnfl/solver.hpp"
#include "dpll.hpp"

namespace cnfl {

namespace detail {

Dpll::Dpll(const CnfFormula& f, bool stop_at_partial, std::uint64_t max_decisions)
    : num_vars_{f.num_vars()},
      stop_at_partial_{stop_at_partial},
      max_decisions_{max_decisions},
      watches_(2 * f.num_vars()),
      occurrences_(2 * f.num_vars()),
      values_(f.num_vars(), kUnassigned) {
    std::vector<std::int8_t> seen(2 * num_vars_, 0);
    clauses_.reserve(f.num_clauses());
    for (const Clause& in : f.clauses()) {
        // Drop repeated literals and tautologies; they change nothing semantically.
        std::vector<Literal> c;
        bool tautology = false;
        for (Literal l : in) {
            if (seen[(~l).code()]) tautology = true;
            if (!seen[l.code()]) {
                seen[l.code()] = 1;
                c.push_back(l);
            }
        }
        for (Literal l : in) seen[l.code()] = 0;
        if (!tautology) clauses_.push_back(std::move(c));
    }

    true_count_.assign(clauses_.size(), 0);
    open_clauses_ = clauses_.size();
    std::vector<Literal> units;
    for (std::uint32_t ci = 0; ci < clauses_.size(); ++ci) {
        const auto& c = clauses_[ci];
        for (Literal l : c) occurrences_[l.code()].push_back(ci);
        if (c.size() == 1) {
            units.push_back(c[0]);
        } else {
            watches_[c[0].code()].push_back(ci);
            watches_[c[1].code()].push_back(ci);
        }
    }
    for (Literal u : units) {
        const auto v = value(u);
        if (v == 0) {
            finished_ = true;
            return;
        }
        if (v == kUnassigned) assign(u);
    }
    if (!propagate()) finished_ = true;
}

void Dpll::assign(Literal l) {
    values_[l.var()] = l.negated() ? 0 : 1;
    trail_.push_back(l);
    for (auto ci : occurrences_[l.code()]) {
        if (true_count_[ci]++ == 0) --open_clauses_;
    }
}

void Dpll::unassign_to(std::size_t trail_size) {
    while (trail_.size() > trail_size) {
        const Literal l = trail_.back();
        trail_.pop_back();
        for (auto ci : occurrences_[l.code()]) {
            if (--true_count_[ci] == 0) ++open_clauses_;
        }
        values_[l.var()] = kUnassigned;
    }
    qhead_ = std::min(qhead_, trail_.size());
}

bool Dpll::propagate() {
    while (qhead_ < trail_.size()) {
        const Literal false_lit = ~trail_[qhead_++];
        auto& ws = watches_[false_lit.code()];
        std::size_t i = 0;
        std::size_t j = 0;
        while (i < ws.size()) {
            const std::uint32_t ci = ws[i++];
            auto& c = clauses_[ci];
            if (c[0] == false_lit) std::swap(c[0], c[1]);
            if (value(c[0]) == 1) {
                ws[j++] = ci;
                continue;
            }
            bool moved = false;
            for (std::size_t k = 2; k < c.size(); ++k) {
                if (value(c[k]) != 0) {
                    std::swap(c[1], c[k]);
                    watches_[c[1].code()].push_back(ci);
                    moved = true;
                    break;
                }
            }
            if (moved) continue;
            ws[j++] = ci;
            if (value(c[0]) == 0) {
                while (i < ws.size()) ws[j++] = ws[i++];
                ws.resize(j);
                qhead_ = trail_.size();
                return false;
            }
            assign(c[0]);
        }
        ws.resize(j);
    }
    return true;
}

bool Dpll::backtrack() {
    while (!decision_stack_.empty()) {
        Decision& d = decision_stack_.back();
        unassign_to(d.trail_start);
        if (!d.flipped) {
            d.flipped = true;
            scan_from_ = d.var;
            assign(Literal(d.var, false));
            return true;
        }
        decision_stack_.pop_back();
    }
    return false;
}

Dpll::Step Dpll::next_leaf() {
    if (finished_) return Step::Exhausted;
    if (resume_pending_) {
        resume_pending_ = false;
        if (!backtrack()) {
            finished_ = true;
            return Step::Exhausted;
        }
    }
    for (;;) {
        if (!propagate()) {
            if (!backtrack()) {
                finished_ = true;
                return Step::Exhausted;
            }
            continue;
        }
        if (trail_.size() == num_vars_ || (stop_at_partial_ && open_clauses_ == 0)) {
            assert(open_clauses_ == 0);
            resume_pending_ = true;
            return Step::Leaf;
        }
        while (values_[scan_from_] != kUnassigned) ++scan_from_;
        if (decisions_ >= max_decisions_) return Step::OutOfBudget;
        ++decisions_;
        decision_stack_.push_back({scan_from_, trail_.size(), false});
        assign(Literal(scan_from_, true));
    }
}

PartialModel Dpll::partial_model() const {
    PartialModel m;
    m.values.resize(num_vars_);
    for (std::size_t v = 0; v < num_vars_; ++v) {
        m.values[v] = values_[v] == kUnassigned ? Ternary::Free : static_cast<Ternary>(values_[v]);
    }
    return m;
}

}  // namespace detail

std::size_t PartialModel::free_count() const {
    return static_cast<std::size_t>(std::count(values.begin(), values.end(), Ternary::Free));
}

Assignment PartialModel::complete(const std::vector<bool>& free_bits) const {
    Assignment a(values.size());
    std::size_t next = 0;
    for (std::size_t v = 0; v < values.size(); ++v) {
        if (values[v] == Ternary::Free) {
            a.set(v, next < free_bits.size() && free_bits[next]);
            ++next;
        } else {
            a.set(v, values[v] == Ternary::True);
        }
    }
    return a;
}

SolveResult solve(const CnfFormula& f, std::uint64_t max_decisions) {
    detail::Dpll engine(f, true, max_decisions);
    switch (engine.next_leaf()) {
        case detail::Dpll::Step::Leaf: {
            SolveResult r{SolveStatus::Sat, engine.partial_model().complete({})};
            assert(evaluate(f, r.model));
            return r;
        }
        case detail::Dpll::Step::Exhausted: return {SolveStatus::Unsat, {}};
        case detail::Dpll::Step::OutOfBudget: break;
    }
    return {SolveStatus::BudgetExhausted, {}};
}

namespace {

// Increments a little-endian bit vector; false once it wraps to all zeros.
bool increment(std::vector<bool>& bits) {
    for (std::size_t i = 0; i < bits.size(); ++i) {
        bits[i] = !bits[i];
        if (bits[i]) return true;
    }
    return false;
}

}  // namespace

Enumeration enumerate_models_within(const CnfFormula& f, std::size_t limit, bool expand_free,
                                    std::uint64_t max_decisions) {
    if (limit < 1) throw ContractError("enumeration limit must be at least 1");
    Enumeration out;
    // Resuming the depth-first search after a leaf is the same as conjoining the
    // clause that blocks the leaf's decisions and solving again.
    detail::Dpll engine(f, expand_free, max_decisions);
    while (out.models.size() < limit) {
        const auto step = engine.next_leaf();
        if (step == detail::Dpll::Step::Exhausted) break;
        if (step == detail::Dpll::Step::OutOfBudget) {
            out.budget_exhausted = true;
            break;
        }
        const PartialModel partial = engine.partial_model();
        std::vector<bool> free_bits(partial.free_count(), false);
        do {
            out.models.push_back(partial.complete(free_bits));
            assert(evaluate(f, out.models.back()));
        } while (out.models.size() < limit && increment(free_bits));
    }
    return out;
}

std::vector<Assignment> enumerate_models(const CnfFormula& f, std::size_t limit, bool expand_free) {
    return enumerate_models_within(f, limit, expand_free, kUnlimited).models;
}

CountResult count_models(const CnfFormula& f, std::uint64_t max_decisions) {
    detail::Dpll engine(f, true, max_decisions);
    ModelCount total = 0;
    for (;;) {
        switch (engine.next_leaf()) {
            case detail::Dpll::Step::Leaf: {
                ModelCount leaf = 1;
                leaf <<= static_cast<unsigned>(engine.num_vars() - engine.num_assigned());
                total += leaf;
                break;
            }
            case detail::Dpll::Step::Exhausted: return {total};
            case detail::Dpll::Step::OutOfBudget: return {std::nullopt};
        }
    }
}

}  // namespace cnfl
