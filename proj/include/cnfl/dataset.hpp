#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cnfl/formula.hpp"
#include "cnfl/solver.hpp"

namespace cnfl {

struct Sample {
    Assignment features;
    bool label = false;  // true: the features satisfy the formula

    friend bool operator==(const Sample&, const Sample&) = default;
};

/// Ordered "key=value" metadata, persisted as leading "# key=value" CSV lines.
class Provenance {
public:
    void set(const std::string& key, std::string value);
    [[nodiscard]] const std::string* find(const std::string& key) const;
    [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

    friend bool operator==(const Provenance&, const Provenance&) = default;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

struct Dataset {
    std::size_t num_vars = 0;
    std::vector<Sample> samples;
    Provenance provenance;

    [[nodiscard]] std::size_t positives() const;
    [[nodiscard]] std::size_t negatives() const { return samples.size() - positives(); }

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

class TooFewNegatives : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PositivesUnavailable : public std::runtime_error {
public:
    explicit PositivesUnavailable(const std::string& what, bool unsatisfiable = false)
        : std::runtime_error(what), unsatisfiable_{unsatisfiable} {}
    /// True when the formula was proven to have no models.
    [[nodiscard]] bool unsatisfiable() const { return unsatisfiable_; }

private:
    bool unsatisfiable_;
};

/// Coin-flip assignments kept when they falsify `f`. Throws TooFewNegatives when
/// fewer than `want` turn up in `max_tries` draws.
std::vector<Sample> gen_negative(const CnfFormula& f, std::size_t want, std::uint64_t seed, std::uint64_t max_tries);

struct Positives {
    std::vector<Sample> samples;
    SamplerMode mode = SamplerMode::Uniform;
};

/// Satisfying samples from `sample_models`. A formula with fewer than `want`
/// models contributes each model exactly once. Throws PositivesUnavailable.
Positives gen_positive(const CnfFormula& f, std::size_t want, std::uint64_t seed, const SamplerBudget& budget);

struct DatasetOptions {
    std::size_t positives = 500;
    std::size_t negatives = 500;
    std::uint64_t negative_tries_per_sample = 1000;
    SamplerBudget budget;
    std::string generator;   // provenance only
    std::string formula_id;  // provenance only
};

/// Positives then negatives, shuffled with a permutation derived from `seed`.
Dataset build_dataset(const CnfFormula& f, std::uint64_t seed, const DatasetOptions& options);

/// The same assembly with positives supplied by the caller (each is
/// re-checked); `positive_source` becomes the sampler_mode provenance entry.
Dataset assemble_dataset(const CnfFormula& f, std::vector<Sample> positives, const std::string& positive_source,
                         std::uint64_t seed, const DatasetOptions& options);

/// Number of samples whose label disagrees with evaluate(f, features).
std::size_t count_mislabeled(const CnfFormula& f, const Dataset& d);

void write_csv(std::ostream& out, const Dataset& d);
std::string write_csv(const Dataset& d);
Dataset read_csv(std::istream& in);
Dataset read_csv(const std::string& text);
Dataset read_csv_file(const std::string& path);
void write_csv_file(const std::string& path, const Dataset& d);

}  // namespace cnfl
