#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cnfl {

/// Outcome for one formula of one set. A row is final once journaled.
struct Row {
    std::size_t job = 0;  // position in the experiment's job plan
    std::string set;
    std::size_t index = 0;
    std::string formula;  // identifier, never contains commas
    std::uint64_t seed = 0;
    std::size_t vars = 0;
    std::size_t clauses = 0;
    bool sampled = false;
    std::string skip_reason;  // empty when sampled
    std::size_t positives = 0;
    std::size_t negatives = 0;
    std::string sampler_mode;
    double mean_acc = 0.0;
    double min_acc = 0.0;
    bool perfect = false;
    std::optional<std::size_t> min_neurons;
    std::optional<double> dt_mean_acc;

    friend bool operator==(const Row&, const Row&) = default;
};

inline constexpr const char* kRowsHeader =
    "job,set,index,formula,seed,vars,clauses,status,reason,positives,negatives,sampler_mode,mean_acc,min_acc,"
    "perfect,min_neurons,dt_mean_acc";
inline constexpr const char* kSummaryHeader = "set,attempted,sampled,mean_acc,min_acc,pct_perfect,avg_min_neurons";

/// One CSV line without the trailing newline. Accuracies carry six decimals.
std::string format_row(const Row& r);
/// Inverse of format_row; throws std::invalid_argument on malformed input.
Row parse_row(const std::string& line);
/// format_row followed by parse_row: the values every later stage sees.
Row canonical(const Row& r);

struct SetSummary {
    std::string set;
    std::size_t attempted = 0;
    std::size_t sampled = 0;  // formulas that produced a dataset
    std::optional<double> mean_acc;  // mean of per-formula mean accuracies
    std::optional<double> min_acc;   // lowest per-formula mean accuracy
    std::optional<double> pct_perfect;
    std::optional<double> avg_min_neurons;  // over formulas with a neuron count
    std::map<std::string, std::size_t> skip_reasons;

    [[nodiscard]] bool empty() const { return sampled == 0; }
};

/// Sets in order of their first job; skipped formulas count only as attempted.
std::vector<SetSummary> summarize(std::vector<Row> rows);

std::string rows_csv(std::vector<Row> rows);
std::string summary_csv(const std::vector<SetSummary>& summaries);
std::string skips_csv(const std::vector<SetSummary>& summaries);

/// Figure data for phase sets labelled "<activation>/v<vars>/c<level>".
struct FigurePoint {
    std::string panel;   // "individual" or "grouped"
    std::string series;  // "<activation>/v<vars>" or "<activation>/<under|onphase|over>"
    double x = 0.0;      // level -5..5, or the variable count
    double y = 0.0;
};

enum class FigureMetric { PercentLearned, AvgNeurons };

std::vector<FigurePoint> figure_points(const std::vector<SetSummary>& summaries, FigureMetric metric);
std::string figure_csv(const std::vector<FigurePoint>& points);
std::string figure_svg(const std::vector<FigurePoint>& points, const std::string& title, const std::string& y_label);

/// Writes rows.csv, summary.csv and skips.csv, plus fig_percent_learned.csv,
/// fig_avg_neurons.csv and their SVG charts when phase sets are present.
/// Output bytes depend only on the rows.
void write_report(const std::vector<Row>& rows, const std::string& outdir);

/// Rows from a rows.csv file or a journal (comment lines are skipped, torn
/// or duplicate lines are ignored).
std::vector<Row> read_rows_file(const std::string& path);

}  // namespace cnfl
