#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cnfl/formula.hpp"

namespace cnfl {

using ModelCount = boost::multiprecision::cpp_int;

inline constexpr std::uint64_t kUnlimited = std::numeric_limits<std::uint64_t>::max();

enum class SolveStatus { Sat, Unsat, BudgetExhausted };

struct SolveResult {
    SolveStatus status = SolveStatus::BudgetExhausted;
    Assignment model;  // meaningful only for Sat
};

enum class Ternary : std::int8_t { False = 0, True = 1, Free = 2 };

/// Satisfying partial assignment: every completion of the Free entries is a model.
struct PartialModel {
    std::vector<Ternary> values;

    [[nodiscard]] std::size_t free_count() const;
    /// Free variables take the bits of `free_bits` in increasing variable order.
    [[nodiscard]] Assignment complete(const std::vector<bool>& free_bits) const;
};

/// DPLL: unit propagation over two watched literals, branching on the lowest
/// unassigned variable, false first, chronological backtracking. `max_decisions`
/// bounds the number of branching decisions.
SolveResult solve(const CnfFormula& f, std::uint64_t max_decisions = kUnlimited);

struct Enumeration {
    std::vector<Assignment> models;
    bool budget_exhausted = false;
};

/// Distinct models in search order. With `expand_free`, a partial model with t
/// free variables contributes its 2^t completions before the search resumes.
std::vector<Assignment> enumerate_models(const CnfFormula& f, std::size_t limit, bool expand_free);
Enumeration enumerate_models_within(const CnfFormula& f, std::size_t limit, bool expand_free,
                                    std::uint64_t max_decisions);

struct CountResult {
    std::optional<ModelCount> count;  // empty when the budget ran out

    [[nodiscard]] bool exhausted() const { return !count.has_value(); }
};

/// Exact count: sum of 2^(free variables) over the satisfying leaves of the search.
CountResult count_models(const CnfFormula& f, std::uint64_t max_decisions = kUnlimited);

// ---------------------------------------------------------------------------
// Model sampling

struct SamplerBudget {
    std::uint64_t max_decisions = 2'000'000;
    std::size_t max_models_per_cell = 200;
    std::size_t cell_target = 40;
    double xor_density = 0.5;

    void validate() const;
};

enum class SamplerMode { Uniform, Hashed, Fallback };
std::string to_string(SamplerMode mode);

struct SampleBatch {
    std::vector<Assignment> models;  // with replacement unless mode == Fallback
    SamplerMode mode = SamplerMode::Uniform;
    std::optional<ModelCount> count;  // exact count when counting finished
};

class SamplerFailure : public std::runtime_error {
public:
    enum class Reason { Unsat, BudgetExhausted };
    SamplerFailure(Reason reason, const std::string& what) : std::runtime_error(what), reason_{reason} {}
    [[nodiscard]] Reason reason() const { return reason_; }

private:
    Reason reason_;
};

/// Random parity constraint: XOR of `vars` equals `parity`.
struct XorConstraint {
    std::vector<std::uint32_t> vars;
    bool parity = false;
};

/// Conjoins the parity constraints using chains of fresh auxiliary variables
/// (a1 = x1 ^ x2, a2 = a1 ^ x3, ...), four 3-literal clauses per link. The
/// original variables keep their indices; auxiliaries follow them.
/// Returns nullopt when some constraint is the contradiction "0 = 1".
std::optional<CnfFormula> conjoin_xors(const CnfFormula& f, const std::vector<XorConstraint>& xors);

/// Quasi-uniform model sampling: exact count first, full enumeration for small
/// model sets, random XOR cells otherwise, plain enumeration when the budget
/// runs out. Throws SamplerFailure.
SampleBatch sample_models(const CnfFormula& f, std::size_t want, std::uint64_t seed, const SamplerBudget& budget);

}  // namespace cnfl
