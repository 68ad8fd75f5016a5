#pragma once

#include <cstdint>
#include <vector>

#include "cnfl/formula.hpp"
#include "cnfl/solver.hpp"

namespace cnfl::detail {

/// Search engine shared by solve, enumeration and counting. Walks the DPLL
/// tree depth first and stops at every satisfying leaf; the caller decides
/// whether to resume.
class Dpll {
public:
    enum class Step { Leaf, Exhausted, OutOfBudget };

    /// `stop_at_partial`: report a leaf as soon as every clause is satisfied,
    /// leaving the untouched variables free.
    Dpll(const CnfFormula& f, bool stop_at_partial, std::uint64_t max_decisions);

    /// Advances to the next satisfying leaf in depth-first order.
    Step next_leaf();

    [[nodiscard]] std::size_t num_vars() const { return num_vars_; }
    [[nodiscard]] std::size_t num_assigned() const { return trail_.size(); }
    [[nodiscard]] std::uint64_t decisions() const { return decisions_; }
    [[nodiscard]] PartialModel partial_model() const;

private:
    static constexpr std::int8_t kUnassigned = -1;

    [[nodiscard]] std::int8_t value(Literal l) const {
        const std::int8_t v = values_[l.var()];
        return v == kUnassigned ? kUnassigned : static_cast<std::int8_t>(v ^ (l.negated() ? 1 : 0));
    }
    void assign(Literal l);
    void unassign_to(std::size_t trail_size);
    bool propagate();
    bool backtrack();

    struct Decision {
        std::uint32_t var;
        std::size_t trail_start;
        bool flipped;
    };

    std::size_t num_vars_;
    bool stop_at_partial_;
    std::uint64_t max_decisions_;
    std::uint64_t decisions_ = 0;

    std::vector<std::vector<Literal>> clauses_;
    std::vector<std::vector<std::uint32_t>> watches_;      // by literal code: clauses watching that literal
    std::vector<std::vector<std::uint32_t>> occurrences_;  // by literal code: clauses containing it
    std::vector<std::uint32_t> true_count_;                // satisfied literals per clause
    std::size_t open_clauses_ = 0;

    std::vector<std::int8_t> values_;
    std::vector<Literal> trail_;
    std::size_t qhead_ = 0;
    std::vector<Decision> decision_stack_;
    std::uint32_t scan_from_ = 0;

    bool finished_ = false;
    bool resume_pending_ = false;
};

}  // namespace cnfl::detail
