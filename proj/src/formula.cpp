#include "cnfl/formula.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

namespace cnfl {

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_{line} {}

Literal Literal::from_dimacs(long long lit) {
    if (lit == 0 || lit > std::numeric_limits<std::uint32_t>::max() / 2 ||
        -lit > static_cast<long long>(std::numeric_limits<std::uint32_t>::max() / 2)) {
        throw ContractError("literal out of range: " + std::to_string(lit));
    }
    return lit > 0 ? Literal(static_cast<std::uint32_t>(lit - 1), false)
                   : Literal(static_cast<std::uint32_t>(-lit - 1), true);
}

long long Literal::to_dimacs() const {
    const long long v = static_cast<long long>(var()) + 1;
    return negated() ? -v : v;
}

bool is_simple_clause(const Clause& clause) {
    if (clause.empty()) return false;
    std::vector<std::uint32_t> vars;
    vars.reserve(clause.size());
    for (Literal l : clause) vars.push_back(l.var());
    std::sort(vars.begin(), vars.end());
    return std::adjacent_find(vars.begin(), vars.end()) == vars.end();
}

Assignment Assignment::from_bits(const std::vector<bool>& bits) {
    Assignment a(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) a.set(i, bits[i]);
    return a;
}

Assignment Assignment::from_string(std::string_view bits) {
    Assignment a(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != '0' && bits[i] != '1') throw ContractError("assignment string must be 0/1");
        a.set(i, bits[i] == '1');
    }
    return a;
}

std::size_t Assignment::count_ones() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

std::string Assignment::to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) {
        if (get(i)) s[i] = '1';
    }
    return s;
}

std::uint64_t Assignment::hash() const {
    // FNV-1a over the words, then a final avalanche.
    std::uint64_t h = 0xcbf29ce484222325ull ^ size_;
    for (auto w : words_) {
        h ^= w;
        h *= 0x100000001b3ull;
    }
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    return h;
}

std::strong_ordering operator<=>(const Assignment& a, const Assignment& b) {
    if (auto c = a.size_ <=> b.size_; c != 0) return c;
    for (std::size_t i = 0; i < a.size_; ++i) {
        if (auto c = a.get(i) <=> b.get(i); c != 0) return c;
    }
    return std::strong_ordering::equal;
}

CnfFormula::CnfFormula(std::size_t num_vars, std::vector<Clause> clauses, std::vector<std::string> comments)
    : num_vars_{num_vars}, clauses_{std::move(clauses)}, comments_{std::move(comments)} {
    for (std::size_t i = 0; i < clauses_.size(); ++i) {
        if (clauses_[i].empty()) throw ContractError("clause " + std::to_string(i) + " is empty");
        for (Literal l : clauses_[i]) {
            if (l.var() >= num_vars_) {
                throw ContractError("clause " + std::to_string(i) + " mentions variable " +
                                    std::to_string(l.var() + 1) + " > " + std::to_string(num_vars_));
            }
        }
    }
}

CnfFormula CnfFormula::with_clause(Clause clause) const {
    auto clauses = clauses_;
    clauses.push_back(std::move(clause));
    return CnfFormula(num_vars_, std::move(clauses), comments_);
}

CnfFormula CnfFormula::with_comment(std::string comment) const {
    CnfFormula f = *this;
    f.comments_.push_back(std::move(comment));
    return f;
}

bool evaluate(const CnfFormula& f, const Assignment& a) {
    if (a.size() != f.num_vars()) {
        throw ContractError("assignment has " + std::to_string(a.size()) + " values, formula has " +
                            std::to_string(f.num_vars()) + " variables");
    }
    for (const Clause& c : f.clauses()) {
        if (std::none_of(c.begin(), c.end(), [&](Literal l) { return a.satisfies(l); })) return false;
    }
    return true;
}

namespace {

bool parse_int(std::string_view tok, long long& out) {
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc{} && ptr == tok.data() + tok.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

}  // namespace

CnfFormula parse_dimacs(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    long long declared_vars = 0;
    long long declared_clauses = 0;
    std::vector<std::string> comments;
    std::vector<Clause> clauses;
    Clause current;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks[0].front() == 'c') {
            auto start = line.find('c');
            std::string text = line.substr(start + 1);
            if (!text.empty() && text.front() == ' ') text.erase(0, 1);
            comments.push_back(std::move(text));
            continue;
        }
        if (toks[0] == "p") {
            if (have_header) throw ParseError(lineno, "duplicate problem line");
            if (toks.size() != 4 || toks[1] != "cnf" || !parse_int(toks[2], declared_vars) ||
                !parse_int(toks[3], declared_clauses) || declared_vars < 0 || declared_clauses < 0) {
                throw ParseError(lineno, "malformed problem line, expected 'p cnf <vars> <clauses>'");
            }
            have_header = true;
            continue;
        }
        if (!have_header) throw ParseError(lineno, "clause data before 'p cnf' header");
        // SATLIB benchmark files end with a '%' line followed by junk.
        if (toks[0] == "%") break;
        for (auto tok : toks) {
            long long lit = 0;
            if (!parse_int(tok, lit)) throw ParseError(lineno, "invalid literal '" + std::string(tok) + "'");
            if (lit == 0) {
                if (current.empty()) throw ParseError(lineno, "empty clause");
                clauses.push_back(std::move(current));
                current.clear();
                continue;
            }
            if (lit > declared_vars || -lit > declared_vars) {
                throw ParseError(lineno, "literal " + std::to_string(lit) + " exceeds declared " +
                                             std::to_string(declared_vars) + " variables");
            }
            current.push_back(Literal::from_dimacs(lit));
        }
    }
    if (!have_header) throw ParseError(lineno, "missing 'p cnf' header");
    if (!current.empty()) throw ParseError(lineno, "last clause is not terminated by 0");
    if (static_cast<long long>(clauses.size()) != declared_clauses) {
        throw ParseError(lineno, "header declares " + std::to_string(declared_clauses) + " clauses, found " +
                                     std::to_string(clauses.size()));
    }
    return CnfFormula(static_cast<std::size_t>(declared_vars), std::move(clauses), std::move(comments));
}

CnfFormula parse_dimacs(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_dimacs(in);
}

CnfFormula read_dimacs_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return parse_dimacs(in);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path + ": " + e.what());
    }
}

void write_dimacs(std::ostream& out, const CnfFormula& f) {
    for (const auto& c : f.comments()) out << "c " << c << '\n';
    out << "p cnf " << f.num_vars() << ' ' << f.num_clauses() << '\n';
    for (const Clause& c : f.clauses()) {
        for (Literal l : c) out << l.to_dimacs() << ' ';
        out << "0\n";
    }
}

std::string write_dimacs(const CnfFormula& f) {
    std::ostringstream out;
    write_dimacs(out, f);
    return out.str();
}

CnfFormula add_blocking_clause(const CnfFormula& f, const Assignment& model) {
    if (!evaluate(f, model)) throw ContractError("blocking clause requested for a non-model");
    if (f.num_vars() == 0) throw ContractError("cannot block the empty assignment with a clause");
    Clause block;
    block.reserve(f.num_vars());
    for (std::uint32_t v = 0; v < f.num_vars(); ++v) block.emplace_back(v, model.get(v));
    return f.with_clause(std::move(block));
}

}  // namespace cnfl
