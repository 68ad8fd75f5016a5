#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cnfl {

/// Raised when a caller breaks an operation's precondition.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Malformed textual input. `line()` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what);
    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// A possibly negated variable. Variables are 0-indexed here; the DIMACS
/// 1-based numbering only exists in parse/write and `to_dimacs`.
class Literal {
public:
    constexpr Literal() = default;
    constexpr Literal(std::uint32_t var, bool negated) : code_{var * 2 + (negated ? 1u : 0u)} {}

    static Literal from_dimacs(long long lit);
    static constexpr Literal from_code(std::uint32_t code) {
        Literal l;
        l.code_ = code;
        return l;
    }

    [[nodiscard]] constexpr std::uint32_t var() const { return code_ >> 1; }
    [[nodiscard]] constexpr bool negated() const { return (code_ & 1u) != 0; }
    /// Dense index usable for per-literal tables (watch lists, occurrence lists).
    [[nodiscard]] constexpr std::uint32_t code() const { return code_; }
    [[nodiscard]] long long to_dimacs() const;

    constexpr Literal operator~() const { return from_code(code_ ^ 1u); }
    friend constexpr auto operator<=>(Literal, Literal) = default;

private:
    std::uint32_t code_ = 0;
};

using Clause = std::vector<Literal>;

/// True when the clause is non-empty and mentions each variable at most once.
bool is_simple_clause(const Clause& clause);

/// Dense truth-value vector; bit i is the value of variable i.
class Assignment {
public:
    Assignment() = default;
    explicit Assignment(std::size_t size) : size_{size}, words_((size + 63) / 64, 0) {}
    static Assignment from_bits(const std::vector<bool>& bits);
    /// Parses a string of '0'/'1' characters.
    static Assignment from_string(std::string_view bits);

    [[nodiscard]] std::size_t size() const { return size_; }
    [[nodiscard]] bool get(std::size_t var) const { return (words_[var >> 6] >> (var & 63)) & 1u; }
    void set(std::size_t var, bool value) {
        const std::uint64_t mask = std::uint64_t{1} << (var & 63);
        if (value) {
            words_[var >> 6] |= mask;
        } else {
            words_[var >> 6] &= ~mask;
        }
    }
    [[nodiscard]] bool satisfies(Literal lit) const { return get(lit.var()) != lit.negated(); }
    [[nodiscard]] std::size_t count_ones() const;
    [[nodiscard]] const std::vector<std::uint64_t>& words() const { return words_; }
    [[nodiscard]] std::string to_string() const;
    [[nodiscard]] std::uint64_t hash() const;

    friend bool operator==(const Assignment&, const Assignment&) = default;
    friend std::strong_ordering operator<=>(const Assignment& a, const Assignment& b);

private:
    std::size_t size_ = 0;
    std::vector<std::uint64_t> words_;
};

class CnfFormula {
public:
    CnfFormula() = default;
    /// Throws ContractError when a clause is empty or mentions a variable >= num_vars.
    CnfFormula(std::size_t num_vars, std::vector<Clause> clauses, std::vector<std::string> comments = {});

    [[nodiscard]] std::size_t num_vars() const { return num_vars_; }
    [[nodiscard]] std::size_t num_clauses() const { return clauses_.size(); }
    [[nodiscard]] const std::vector<Clause>& clauses() const { return clauses_; }
    /// Free-form metadata; carried through parse/write but ignored by equality.
    [[nodiscard]] const std::vector<std::string>& comments() const { return comments_; }

    [[nodiscard]] CnfFormula with_clause(Clause clause) const;
    [[nodiscard]] CnfFormula with_comment(std::string comment) const;

    friend bool operator==(const CnfFormula& a, const CnfFormula& b) {
        return a.num_vars_ == b.num_vars_ && a.clauses_ == b.clauses_;
    }

private:
    std::size_t num_vars_ = 0;
    std::vector<Clause> clauses_;
    std::vector<std::string> comments_;
};

bool evaluate(const CnfFormula& f, const Assignment& a);

CnfFormula parse_dimacs(std::istream& in);
CnfFormula parse_dimacs(std::string_view text);
CnfFormula read_dimacs_file(const std::string& path);

void write_dimacs(std::ostream& out, const CnfFormula& f);
std::string write_dimacs(const CnfFormula& f);

/// Conjoins the clause that excludes exactly `model`. `model` must satisfy `f`.
CnfFormula add_blocking_clause(const CnfFormula& f, const Assignment& model);

}  // namespace cnfl
