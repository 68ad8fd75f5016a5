#include "cnfl/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <span>

#include "cnfl/rng.hpp"

namespace cnfl {

void Provenance::set(const std::string& key, std::string value) {
    for (auto& [k, v] : entries_) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    entries_.emplace_back(key, std::move(value));
}

const std::string* Provenance::find(const std::string& key) const {
    for (const auto& [k, v] : entries_) {
        if (k == key) return &v;
    }
    return nullptr;
}

std::size_t Dataset::positives() const {
    return static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [](const Sample& s) { return s.label; }));
}

std::vector<Sample> gen_negative(const CnfFormula& f, std::size_t want, std::uint64_t seed, std::uint64_t max_tries) {
    if (want < 1) throw ContractError("gen_negative needs want >= 1");
    Rng rng(seed);
    std::vector<Sample> out;
    out.reserve(want);
    Assignment a(f.num_vars());
    for (std::uint64_t tries = 0; tries < max_tries && out.size() < want; ++tries) {
        for (std::size_t v = 0; v < f.num_vars(); ++v) a.set(v, rng.coin());
        if (!evaluate(f, a)) out.push_back({a, false});
    }
    if (out.size() < want) {
        throw TooFewNegatives("found " + std::to_string(out.size()) + " of " + std::to_string(want) +
                              " falsifying assignments in " + std::to_string(max_tries) + " tries");
    }
    return out;
}

Positives gen_positive(const CnfFormula& f, std::size_t want, std::uint64_t seed, const SamplerBudget& budget) {
    if (want < 1) throw ContractError("gen_positive needs want >= 1");
    SampleBatch batch;
    try {
        batch = sample_models(f, want, seed, budget);
    } catch (const SamplerFailure& e) {
        throw PositivesUnavailable(e.what(), e.reason() == SamplerFailure::Reason::Unsat);
    }
    Positives out;
    out.mode = batch.mode;
    if (batch.count && *batch.count < want) {
        // Small model sets are used as they are rather than oversampled.
        const auto c = static_cast<std::size_t>(*batch.count);
        batch.models = enumerate_models(f, c, true);
        if (batch.models.size() != c) throw std::logic_error("model enumeration disagrees with the model count");
    }
    out.samples.reserve(batch.models.size());
    for (auto& m : batch.models) {
        if (!evaluate(f, m)) throw std::logic_error("sampled assignment does not satisfy the formula");
        out.samples.push_back({std::move(m), true});
    }
    return out;
}

Dataset build_dataset(const CnfFormula& f, std::uint64_t seed, const DatasetOptions& options) {
    if (options.positives < 1 || options.negatives < 1) throw ContractError("dataset needs positive and negative targets");
    auto pos = gen_positive(f, options.positives, derive_seed(seed, {1}), options.budget);
    return assemble_dataset(f, std::move(pos.samples), to_string(pos.mode), seed, options);
}

Dataset assemble_dataset(const CnfFormula& f, std::vector<Sample> positives, const std::string& positive_source,
                         std::uint64_t seed, const DatasetOptions& options) {
    if (options.negatives < 1) throw ContractError("dataset needs a negative target");
    if (positives.empty()) throw PositivesUnavailable("no positive samples");
    for (const auto& s : positives) {
        if (!s.label || s.features.size() != f.num_vars() || !evaluate(f, s.features)) {
            throw std::logic_error("positive sample does not satisfy the formula");
        }
    }
    auto neg = gen_negative(f, options.negatives, derive_seed(seed, {2}),
                            options.negative_tries_per_sample * options.negatives);

    Dataset d;
    d.num_vars = f.num_vars();
    d.samples = std::move(positives);
    const std::size_t n_pos = d.samples.size();
    d.samples.insert(d.samples.end(), std::make_move_iterator(neg.begin()), std::make_move_iterator(neg.end()));
    Rng rng(derive_seed(seed, {3}));
    rng.shuffle(std::span(d.samples));

    d.provenance.set("generator", options.generator);
    d.provenance.set("formula_id", options.formula_id);
    d.provenance.set("seed", std::to_string(seed));
    d.provenance.set("positives", std::to_string(n_pos));
    d.provenance.set("negatives", std::to_string(d.samples.size() - n_pos));
    d.provenance.set("sampler_mode", positive_source);
    return d;
}

std::size_t count_mislabeled(const CnfFormula& f, const Dataset& d) {
    if (d.num_vars != f.num_vars()) throw ContractError("dataset and formula disagree on the variable count");
    return static_cast<std::size_t>(std::count_if(d.samples.begin(), d.samples.end(), [&](const Sample& s) {
        return evaluate(f, s.features) != s.label;
    }));
}

void write_csv(std::ostream& out, const Dataset& d) {
    for (const auto& [k, v] : d.provenance.entries()) out << "# " << k << '=' << v << '\n';
    for (std::size_t i = 0; i < d.num_vars; ++i) out << 'x' << (i + 1) << ',';
    out << "y\n";
    std::string row;
    for (const auto& s : d.samples) {
        row.clear();
        for (std::size_t i = 0; i < d.num_vars; ++i) {
            row.push_back(s.features.get(i) ? '1' : '0');
            row.push_back(',');
        }
        row.push_back(s.label ? '1' : '0');
        row.push_back('\n');
        out << row;
    }
}

std::string write_csv(const Dataset& d) {
    std::ostringstream out;
    write_csv(out, d);
    return out.str();
}

Dataset read_csv(std::istream& in) {
    Dataset d;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!have_header && line.front() == '#') {
            std::string body = line.substr(1);
            if (!body.empty() && body.front() == ' ') body.erase(0, 1);
            const auto eq = body.find('=');
            if (eq == std::string::npos) throw ParseError(lineno, "provenance line without '='");
            d.provenance.set(body.substr(0, eq), body.substr(eq + 1));
            continue;
        }
        if (!have_header) {
            std::vector<std::string> cols;
            std::stringstream ss(line);
            std::string col;
            while (std::getline(ss, col, ',')) cols.push_back(col);
            if (cols.empty() || cols.back() != "y") throw ParseError(lineno, "header must end with column 'y'");
            for (std::size_t i = 0; i + 1 < cols.size(); ++i) {
                if (cols[i] != "x" + std::to_string(i + 1)) {
                    throw ParseError(lineno, "header column " + std::to_string(i + 1) + " should be x" +
                                                 std::to_string(i + 1) + ", got '" + cols[i] + "'");
                }
            }
            d.num_vars = cols.size() - 1;
            have_header = true;
            continue;
        }
        if (line.size() != 2 * (d.num_vars + 1) - 1) {
            throw ParseError(lineno, "row does not have " + std::to_string(d.num_vars + 1) + " cells");
        }
        Sample s{Assignment(d.num_vars), false};
        for (std::size_t i = 0; i <= d.num_vars; ++i) {
            const char c = line[2 * i];
            if ((c != '0' && c != '1') || (i < d.num_vars && line[2 * i + 1] != ',')) {
                throw ParseError(lineno, "cell " + std::to_string(i + 1) + " is not a 0/1 value");
            }
            if (i < d.num_vars) {
                s.features.set(i, c == '1');
            } else {
                s.label = c == '1';
            }
        }
        d.samples.push_back(std::move(s));
    }
    if (!have_header) throw ParseError(lineno, "missing CSV header");
    return d;
}

Dataset read_csv(const std::string& text) {
    std::istringstream in(text);
    return read_csv(in);
}

Dataset read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return read_csv(in);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path + ": " + e.what());
    }
}

void write_csv_file(const std::string& path, const Dataset& d) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_csv(out, d);
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace cnfl
