#pragma once

// Brute-force reference semantics for small formulas. Works on raw DIMACS
// integers and bit masks so it shares no evaluation code with the library.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "cnfl/formula.hpp"

namespace oracle {

using RawClauses = std::vector<std::vector<long long>>;

inline RawClauses raw(const cnfl::CnfFormula& f) {
    RawClauses out;
    for (const auto& c : f.clauses()) {
        std::vector<long long> lits;
        for (auto l : c) lits.push_back(l.to_dimacs());
        out.push_back(std::move(lits));
    }
    return out;
}

inline bool satisfied(const RawClauses& clauses, std::uint64_t mask) {
    for (const auto& c : clauses) {
        bool any = false;
        for (long long lit : c) {
            const bool bit = (mask >> (std::llabs(lit) - 1)) & 1u;
            if ((lit > 0) == bit) {
                any = true;
                break;
            }
        }
        if (!any) return false;
    }
    return true;
}

/// All satisfying masks in increasing order; bit i is variable i+1.
inline std::vector<std::uint64_t> models(const cnfl::CnfFormula& f) {
    const auto clauses = raw(f);
    std::vector<std::uint64_t> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << f.num_vars()); ++mask) {
        if (satisfied(clauses, mask)) out.push_back(mask);
    }
    return out;
}

inline std::uint64_t count(const cnfl::CnfFormula& f) { return models(f).size(); }

inline std::uint64_t mask_of(const cnfl::Assignment& a) {
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.get(i)) m |= std::uint64_t{1} << i;
    }
    return m;
}

inline cnfl::Assignment assignment_of(std::uint64_t mask, std::size_t n) {
    cnfl::Assignment a(n);
    for (std::size_t i = 0; i < n; ++i) a.set(i, (mask >> i) & 1u);
    return a;
}

/// Upper-tail chi-square critical value.
inline double chi_square_critical(int dof, double alpha) {
    return boost::math::quantile(boost::math::complement(boost::math::chi_squared(dof), alpha));
}

inline double chi_square(const std::vector<double>& observed, double expected_each) {
    double s = 0.0;
    for (double o : observed) s += (o - expected_each) * (o - expected_each) / expected_each;
    return s;
}

}  // namespace oracle
