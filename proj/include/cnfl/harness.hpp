#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cnfl/config.hpp"
#include "cnfl/dataset.hpp"
#include "cnfl/formula.hpp"
#include "cnfl/report.hpp"

namespace cnfl {

/// One formula of one set.
struct Job {
    std::size_t id = 0;
    std::string set;          // summary label, e.g. "relu/v20/c-3"
    std::string formula_set;  // seeding label shared by every activation, e.g. "v20/c-3"
    std::size_t index = 0;

    std::size_t nodes = 0;
    std::size_t edges = 0;
    double ratio = 0.0;
    std::size_t vars = 0;
    int level = 0;
    Activation activation = Activation::Relu;
    std::size_t file = 0;
};

/// Stable 64-bit FNV-1a, used to fold set labels into seeds.
std::uint64_t stable_hash(std::string_view text);

/// Seed of formula `index` in the set labelled `formula_set`:
/// derive_seed(master, {stable_hash(formula_set), index}).
std::uint64_t formula_seed(std::uint64_t master, std::string_view formula_set, std::size_t index);

/// Jobs in a fixed order; ids are positions in the returned list.
std::vector<Job> plan_jobs(const ExperimentSpec& spec);

/// Formula and optional externally produced positives for the ingest protocol.
struct IngestInput {
    std::string name;
    CnfFormula formula;
    std::optional<std::vector<Sample>> positives;
};

/// External positive samples: one assignment per line as signed DIMACS
/// literals ending in 0, optionally after a leading "v"; `c` lines are
/// comments. Every variable must appear once and every row must satisfy `f`.
/// Errors name the file and line.
std::vector<Sample> read_external_samples(const std::string& path, const CnfFormula& f);

/// Loads every formula and sample file of an ingest spec up front.
std::vector<IngestInput> load_ingest_inputs(const ExperimentSpec& spec);

/// Formula and dataset of one job, exactly as run_job builds them.
struct PreparedJob {
    std::uint64_t seed = 0;
    std::string formula_id;
    CnfFormula formula;
    std::optional<Dataset> dataset;  // empty when sampling failed
    std::string skip_reason;
};

PreparedJob prepare_job(const ExperimentSpec& spec, const Job& job, const std::vector<IngestInput>& ingest = {});

/// Runs one job. Sampling failures produce a skipped row, never an exception.
Row run_job(const ExperimentSpec& spec, const Job& job, const std::vector<IngestInput>& ingest = {});

struct RunOptions {
    std::size_t max_new_jobs = 0;  // 0: no limit; otherwise stop after this many fresh jobs
    std::ostream* log = nullptr;   // one progress line per finished job
};

struct ExperimentResult {
    std::vector<Row> rows;  // every journaled row, sorted by job
    std::vector<SetSummary> summaries;
    std::size_t reused = 0;    // rows taken from an existing journal
    std::size_t computed = 0;  // rows computed by this call
    bool complete = false;     // all planned jobs are journaled; the report has been written
};

/// Runs the pending jobs of `spec` on a worker pool, appending each finished
/// row to <output>/journal.log. A journal from an earlier run of the same
/// spec is resumed; one from a different spec is an error. When every job is
/// journaled the report files are (re)written.
ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

ExperimentResult run_cop_experiment(const ExperimentSpec& spec, const RunOptions& options = {});
ExperimentResult run_phase_experiment(const ExperimentSpec& spec, const RunOptions& options = {});
ExperimentResult run_ingest_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

/// Rewrites the report files of <outdir> from its journal.
std::vector<SetSummary> rebuild_report(const std::string& outdir);

}  // namespace cnfl
