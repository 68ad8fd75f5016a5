#include "cnfl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "cnfl/encoders.hpp"
#include "cnfl/graphs.hpp"
#include "cnfl/rng.hpp"
#include "cnfl/validation.hpp"

namespace cnfl {

namespace fs = std::filesystem;

namespace {

constexpr const char* kJournalName = "journal.log";
constexpr const char* kJournalTag = "# cnfl journal; spec ";

std::string level_label(int level) {
    if (level == 0) return "c0";
    return level > 0 ? "c+" + std::to_string(level) : "c" + std::to_string(level);
}

std::string ratio_label(double r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", r);
    return buf;
}

std::string file_stem(const std::string& path) {
    std::string stem = fs::path(path).stem().string();
    std::replace(stem.begin(), stem.end(), ',', '_');
    return stem;
}

CnfFormula generate(const ExperimentSpec& spec, const Job& job, std::uint64_t seed) {
    const std::uint64_t graph_seed = derive_seed(seed, {1});
    switch (spec.protocol) {
        case Protocol::Phase:
            return random_3cnf(job.vars, constrainedness_level(job.vars, job.level).clause_count, graph_seed);
        case Protocol::Cop:
            switch (spec.family) {
                case CopFamily::Flat3Gcp:
                    return encode_gcp(flat_3colorable(job.nodes, job.edges, graph_seed).first, spec.effective_colors());
                case CopFamily::Morphed5Gcp: {
                    const Graph lattice = ring_lattice(job.nodes, spec.degree);
                    const Graph random = gnm(job.nodes, lattice.num_edges(), graph_seed);
                    return encode_gcp(morph(random, lattice, job.ratio, derive_seed(seed, {5})), spec.effective_colors());
                }
                case CopFamily::Clique3: {
                    const double p = clique_edge_probability(job.nodes, 3, spec.expected_cliques);
                    return encode_kclique(gnp(job.nodes, p, graph_seed), 3);
                }
            }
            break;
        case Protocol::Ingest: break;
    }
    throw ContractError("no generator for this job");
}

struct Journal {
    std::ofstream out;
    std::mutex mu;
};

std::string format_accuracy(double acc) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", acc);
    return buf;
}

std::string read_all(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::uint64_t stable_hash(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t formula_seed(std::uint64_t master, std::string_view formula_set, std::size_t index) {
    return derive_seed(master, {stable_hash(formula_set), index});
}

std::vector<Job> plan_jobs(const ExperimentSpec& spec) {
    spec.validate();
    std::vector<Job> jobs;
    const std::size_t per_set = spec.effective_formulas_per_set();
    auto add = [&](Job proto, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) {
            Job j = proto;
            j.id = jobs.size();
            j.index = i;
            jobs.push_back(std::move(j));
        }
    };
    switch (spec.protocol) {
        case Protocol::Cop:
            for (std::size_t n = 0; n < spec.nodes.size(); ++n) {
                Job j;
                j.nodes = spec.nodes[n];
                switch (spec.family) {
                    case CopFamily::Flat3Gcp:
                        j.edges = spec.edges[n];
                        j.set = "flat3gcp/n" + std::to_string(j.nodes) + "/m" + std::to_string(j.edges);
                        j.formula_set = j.set;
                        add(j, per_set);
                        break;
                    case CopFamily::Morphed5Gcp:
                        for (double r : spec.ratios) {
                            Job m = j;
                            m.ratio = r;
                            m.set = "morph5gcp/n" + std::to_string(j.nodes) + "/r" + ratio_label(r);
                            m.formula_set = m.set;
                            // r = 0 keeps only lattice edges, so every formula would be identical.
                            add(m, r == 0.0 ? 1 : per_set);
                        }
                        break;
                    case CopFamily::Clique3:
                        j.set = "clique3/n" + std::to_string(j.nodes);
                        j.formula_set = j.set;
                        add(j, per_set);
                        break;
                }
            }
            break;
        case Protocol::Phase:
            for (auto act : spec.activations) {
                for (std::size_t v : spec.vars) {
                    for (int level : spec.levels) {
                        Job j;
                        j.vars = v;
                        j.level = level;
                        j.activation = act;
                        j.formula_set = "v" + std::to_string(v) + "/" + level_label(level);
                        j.set = to_string(act) + "/" + j.formula_set;
                        add(j, per_set);
                    }
                }
            }
            break;
        case Protocol::Ingest:
            for (std::size_t f = 0; f < spec.formula_files.size(); ++f) {
                Job j;
                j.set = "ingest";
                j.formula_set = "ingest";
                j.file = f;
                j.id = jobs.size();
                j.index = f;
                jobs.push_back(j);
            }
            break;
    }
    return jobs;
}

std::vector<Sample> read_external_samples(const std::string& path, const CnfFormula& f) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open sample file " + path);
    std::vector<Sample> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto fail = [&](const std::string& what) { throw ParseError(lineno, path + ": " + what); };
        std::istringstream ss(line);
        std::string tok;
        if (!(ss >> tok) || tok == "c") continue;
        if (tok == "v" && !(ss >> tok)) fail("empty sample row");
        Assignment a(f.num_vars());
        std::vector<bool> seen(f.num_vars(), false);
        bool terminated = false;
        do {
            long long lit = 0;
            try {
                std::size_t used = 0;
                lit = std::stoll(tok, &used);
                if (used != tok.size()) fail("bad literal '" + tok + "'");
            } catch (const std::logic_error&) {
                fail("bad literal '" + tok + "'");
            }
            if (lit == 0) {
                terminated = true;
                break;
            }
            const auto var = static_cast<std::size_t>(lit < 0 ? -lit : lit);
            if (var > f.num_vars()) fail("literal " + tok + " exceeds the formula's " + std::to_string(f.num_vars()) + " variables");
            if (seen[var - 1]) fail("variable " + std::to_string(var) + " appears twice");
            seen[var - 1] = true;
            a.set(var - 1, lit > 0);
        } while (ss >> tok);
        if (!terminated) fail("sample row is not terminated by 0");
        if (std::string rest; ss >> rest) fail("trailing data after 0");
        const auto missing = std::find(seen.begin(), seen.end(), false);
        if (missing != seen.end()) fail("variable " + std::to_string(missing - seen.begin() + 1) + " is unassigned");
        if (!evaluate(f, a)) fail("sample does not satisfy the formula");
        out.push_back({std::move(a), true});
    }
    if (out.empty()) throw std::runtime_error(path + ": no samples");
    return out;
}

std::vector<IngestInput> load_ingest_inputs(const ExperimentSpec& spec) {
    std::vector<IngestInput> out;
    if (spec.protocol != Protocol::Ingest) return out;
    for (std::size_t i = 0; i < spec.formula_files.size(); ++i) {
        IngestInput in{file_stem(spec.formula_files[i]), read_dimacs_file(spec.formula_files[i]), std::nullopt};
        if (i < spec.sample_files.size() && !spec.sample_files[i].empty()) {
            in.positives = read_external_samples(spec.sample_files[i], in.formula);
        }
        out.push_back(std::move(in));
    }
    return out;
}

PreparedJob prepare_job(const ExperimentSpec& spec, const Job& job, const std::vector<IngestInput>& ingest) {
    PreparedJob p;
    p.seed = formula_seed(spec.master_seed, job.formula_set, job.index);

    const IngestInput* input = nullptr;
    if (spec.protocol == Protocol::Ingest) {
        if (job.file >= ingest.size()) throw ContractError("ingest inputs were not loaded");
        input = &ingest[job.file];
        p.formula = input->formula;
        p.formula_id = input->name;
    } else {
        p.formula = generate(spec, job, p.seed);
        p.formula_id = job.formula_set + "#" + std::to_string(job.index);
    }

    DatasetOptions opts = spec.dataset;
    opts.generator = spec.protocol == Protocol::Ingest ? "ingest"
                     : spec.protocol == Protocol::Cop  ? to_string(spec.family)
                                                       : "random3cnf";
    opts.formula_id = p.formula_id;
    const std::uint64_t data_seed = derive_seed(p.seed, {2});
    try {
        if (input && input->positives) {
            auto pos = *input->positives;
            if (pos.size() > opts.positives) pos.resize(opts.positives);
            p.dataset = assemble_dataset(p.formula, std::move(pos), "external", data_seed, opts);
        } else {
            p.dataset = build_dataset(p.formula, data_seed, opts);
        }
    } catch (const PositivesUnavailable& e) {
        p.skip_reason = e.unsatisfiable() ? "unsat" : "sampler_budget";
    } catch (const TooFewNegatives&) {
        p.skip_reason = "too_few_negatives";
    }
    return p;
}

Row run_job(const ExperimentSpec& spec, const Job& job, const std::vector<IngestInput>& ingest) {
    auto p = prepare_job(spec, job, ingest);
    Row r;
    r.job = job.id;
    r.set = job.set;
    r.index = job.index;
    r.seed = p.seed;
    r.formula = p.formula_id;
    r.vars = p.formula.num_vars();
    r.clauses = p.formula.num_clauses();
    if (!p.dataset) {
        r.skip_reason = p.skip_reason;
        return r;
    }
    const Dataset& d = *p.dataset;
    r.positives = d.positives();
    r.negatives = d.negatives();
    r.sampler_mode = *d.provenance.find("sampler_mode");
    if (d.samples.size() < 5) {
        r.skip_reason = "too_few_rows";
        return r;
    }
    r.sampled = true;

    MlpConfig cfg = spec.mlp;
    cfg.seed = derive_seed(r.seed, {4});
    CvReport report;
    if (spec.protocol == Protocol::Phase) {
        cfg.activation = job.activation;
        const auto sweep = neuron_sweep(d, cfg, spec.max_neurons);
        r.min_neurons = sweep.min_neurons;
        report = sweep.reports.back().second;
    } else {
        report = cross_validate(d, cfg);
        if (spec.protocol == Protocol::Ingest) r.dt_mean_acc = cross_validate_tree(d).mean_accuracy;
    }
    r.mean_acc = report.mean_accuracy;
    r.min_acc = report.min_accuracy;
    r.perfect = report.perfect;
    return r;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
    const auto jobs = plan_jobs(spec);
    const auto ingest = load_ingest_inputs(spec);

    const fs::path dir(spec.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + spec.output_dir + ": " + ec.message());
    const fs::path journal_path = dir / kJournalName;
    const std::string tag = std::string(kJournalTag) + spec.fingerprint();

    ExperimentResult result;
    std::set<std::size_t> done;
    bool needs_newline = false;
    bool fresh = true;
    if (fs::exists(journal_path)) {
        const std::string text = read_all(journal_path);
        if (!text.empty()) {
            fresh = false;
            const auto first = text.substr(0, text.find('\n'));
            if (first != tag) {
                throw ConfigError(journal_path.string() + " belongs to a different experiment spec; use a new output directory");
            }
            needs_newline = text.back() != '\n';
            for (auto& r : read_rows_file(journal_path.string())) {
                if (r.job >= jobs.size() || jobs[r.job].set != r.set || jobs[r.job].index != r.index) continue;
                if (done.insert(r.job).second) result.rows.push_back(std::move(r));
            }
        }
    }
    result.reused = result.rows.size();

    Journal journal;
    journal.out.open(journal_path, std::ios::binary | std::ios::app);
    if (!journal.out) throw std::runtime_error("cannot open " + journal_path.string());
    if (fresh) journal.out << tag << '\n';
    if (needs_newline) journal.out << '\n';
    journal.out.flush();

    std::vector<const Job*> pending;
    for (const auto& j : jobs) {
        if (!done.contains(j.id)) pending.push_back(&j);
    }
    const std::size_t limit =
        options.max_new_jobs == 0 ? pending.size() : std::min(pending.size(), options.max_new_jobs);

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    auto worker = [&] {
        for (;;) {
            if (failed.load()) return;
            const std::size_t k = next.fetch_add(1);
            if (k >= limit) return;
            try {
                Row row = canonical(run_job(spec, *pending[k], ingest));
                std::lock_guard lock(journal.mu);
                journal.out << format_row(row) << '\n';
                journal.out.flush();
                if (!journal.out) throw std::runtime_error("write failed: " + journal_path.string());
                if (options.log) {
                    *options.log << "[" << result.reused + result.computed + 1 << "/" << jobs.size() << "] "
                                 << row.set << " #" << row.index << " "
                                 << (row.sampled ? "mean acc " + format_accuracy(row.mean_acc) +
                                                       (row.perfect ? " perfect" : "")
                                                 : "skipped " + row.skip_reason)
                                 << '\n';
                }
                result.rows.push_back(std::move(row));
                ++result.computed;
            } catch (...) {
                std::lock_guard lock(journal.mu);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    const std::size_t n_workers = std::max<std::size_t>(1, std::min(spec.effective_workers(), limit));
    if (limit > 0) {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    journal.out.close();
    if (error) std::rethrow_exception(error);

    std::sort(result.rows.begin(), result.rows.end(), [](const Row& a, const Row& b) { return a.job < b.job; });
    result.summaries = summarize(result.rows);
    result.complete = result.rows.size() == jobs.size();
    if (result.complete) write_report(result.rows, spec.output_dir);
    return result;
}

ExperimentResult run_cop_experiment(const ExperimentSpec& spec, const RunOptions& options) {
    if (spec.protocol != Protocol::Cop) throw ContractError("spec is not a cop experiment");
    return run_experiment(spec, options);
}

ExperimentResult run_phase_experiment(const ExperimentSpec& spec, const RunOptions& options) {
    if (spec.protocol != Protocol::Phase) throw ContractError("spec is not a phase experiment");
    return run_experiment(spec, options);
}

ExperimentResult run_ingest_experiment(const ExperimentSpec& spec, const RunOptions& options) {
    if (spec.protocol != Protocol::Ingest) throw ContractError("spec is not an ingest experiment");
    return run_experiment(spec, options);
}

std::vector<SetSummary> rebuild_report(const std::string& outdir) {
    const fs::path journal = fs::path(outdir) / kJournalName;
    const fs::path rows_path = fs::path(outdir) / "rows.csv";
    const fs::path source = fs::exists(journal) ? journal : rows_path;
    if (!fs::exists(source)) throw std::runtime_error("no journal.log or rows.csv in " + outdir);
    const auto rows = read_rows_file(source.string());
    write_report(rows, outdir);
    return summarize(rows);
}

}  // namespace cnfl
