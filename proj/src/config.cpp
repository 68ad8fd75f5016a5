#include "cnfl/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace cnfl {

namespace pt = boost::property_tree;

std::string to_string(Protocol p) {
    switch (p) {
        case Protocol::Cop: return "cop";
        case Protocol::Phase: return "phase";
        case Protocol::Ingest: return "ingest";
    }
    return "unknown";
}

std::string to_string(CopFamily f) {
    switch (f) {
        case CopFamily::Flat3Gcp: return "flat3gcp";
        case CopFamily::Morphed5Gcp: return "morph5gcp";
        case CopFamily::Clique3: return "clique3";
    }
    return "unknown";
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& raw, const std::string& what) {
    const std::string text = trim(raw);
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end) throw ConfigError(what + ": '" + text + "' is not a valid number");
    return value;
}

template <class T>
std::string join(const std::vector<T>& xs) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? "," : "") << xs[i];
    return out.str();
}

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"experiment", {"protocol", "seed", "formulas_per_set", "workers", "output"}},
        {"dataset", {"positives", "negatives", "negative_tries"}},
        {"sampler", {"max_decisions", "max_models_per_cell", "cell_target", "xor_density"}},
        {"mlp", {"hidden", "activation", "learning_rate", "beta1", "beta2", "epochs", "l2", "batch_size"}},
        {"cop", {"family", "nodes", "edges", "colors", "degree", "ratios", "expected_cliques"}},
        {"phase", {"vars", "levels", "activations", "max_neurons"}},
        {"ingest", {"formulas", "samples"}},
    };
    return keys;
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    if (!text.empty() && text.back() == ',') out.emplace_back();
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::size_t> out;
    for (const auto& s : split_list(text)) out.push_back(parse_number<std::size_t>(s, "list entry"));
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (auto s : split_list(text)) {
        if (!s.empty() && s.front() == '+') s.erase(0, 1);
        out.push_back(parse_number<int>(s, "list entry"));
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& s : split_list(text)) out.push_back(parse_number<double>(s, "list entry"));
    return out;
}

std::size_t ExperimentSpec::effective_formulas_per_set() const {
    if (formulas_per_set != 0) return formulas_per_set;
    return protocol == Protocol::Cop ? 10 : 20;
}

std::size_t ExperimentSpec::effective_colors() const {
    if (colors != 0) return colors;
    return family == CopFamily::Morphed5Gcp ? 5 : 3;
}

std::size_t ExperimentSpec::effective_workers() const {
    if (workers != 0) return workers;
    return std::max(1u, std::thread::hardware_concurrency());
}

void ExperimentSpec::validate() const {
    mlp.validate();
    dataset.budget.validate();
    if (dataset.positives < 1 || dataset.negatives < 1) throw ConfigError("dataset sizes must be at least 1");
    switch (protocol) {
        case Protocol::Cop:
            if (nodes.empty()) throw ConfigError("cop.nodes is empty");
            if (family == CopFamily::Flat3Gcp && edges.size() != nodes.size()) {
                throw ConfigError("cop.edges needs one entry per cop.nodes entry");
            }
            if (family == CopFamily::Morphed5Gcp) {
                if (ratios.empty()) throw ConfigError("cop.ratios is empty");
                for (double r : ratios) {
                    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("morph ratios must lie in [0, 1]");
                }
                for (std::size_t n : nodes) {
                    if (degree % 2 != 0 || degree >= n) throw ConfigError("ring degree must be even and below the node count");
                }
            }
            if (effective_colors() < 2) throw ConfigError("cop.colors must be at least 2");
            break;
        case Protocol::Phase:
            if (vars.empty()) throw ConfigError("phase.vars is empty");
            for (std::size_t v : vars) {
                if (v < 3) throw ConfigError("phase.vars entries must be at least 3");
            }
            for (int l : levels) {
                if (l < -5 || l > 5) throw ConfigError("phase.levels entries must lie in -5..5");
            }
            if (levels.empty()) throw ConfigError("phase.levels is empty");
            if (activations.empty()) throw ConfigError("phase.activations is empty");
            if (max_neurons < 1) throw ConfigError("phase.max_neurons must be at least 1");
            break;
        case Protocol::Ingest:
            if (formula_files.empty()) throw ConfigError("ingest.formulas is empty");
            if (!sample_files.empty() && sample_files.size() != formula_files.size()) {
                throw ConfigError("ingest.samples needs one entry (possibly blank) per formula");
            }
            break;
    }
}

std::string ExperimentSpec::fingerprint() const {
    std::ostringstream out;
    out.precision(17);
    out << "protocol=" << to_string(protocol) << ";seed=" << master_seed
        << ";formulas_per_set=" << effective_formulas_per_set() << ";positives=" << dataset.positives
        << ";negatives=" << dataset.negatives << ";negative_tries=" << dataset.negative_tries_per_sample
        << ";max_decisions=" << dataset.budget.max_decisions
        << ";max_models_per_cell=" << dataset.budget.max_models_per_cell
        << ";cell_target=" << dataset.budget.cell_target << ";xor_density=" << dataset.budget.xor_density
        << ";hidden=" << join(mlp.hidden_layers) << ";activation=" << to_string(mlp.activation)
        << ";learning_rate=" << mlp.learning_rate << ";beta1=" << mlp.beta1 << ";beta2=" << mlp.beta2
        << ";epsilon=" << mlp.epsilon << ";epochs=" << mlp.epochs << ";l2=" << mlp.l2
        << ";batch_size=" << mlp.batch_size;
    switch (protocol) {
        case Protocol::Cop:
            out << ";family=" << to_string(family) << ";nodes=" << join(nodes) << ";edges=" << join(edges)
                << ";colors=" << effective_colors() << ";degree=" << degree << ";ratios=" << join(ratios)
                << ";expected_cliques=" << expected_cliques;
            break;
        case Protocol::Phase: {
            std::vector<std::string> acts;
            for (auto a : activations) acts.push_back(to_string(a));
            out << ";vars=" << join(vars) << ";levels=" << join(levels) << ";activations=" << join(acts)
                << ";max_neurons=" << max_neurons;
            break;
        }
        case Protocol::Ingest:
            out << ";formulas=" << join(formula_files) << ";samples=" << join(sample_files);
            break;
    }
    return out.str();
}

namespace {

Activation config_activation(const std::string& text, const std::string& key) {
    try {
        return parse_activation(text);
    } catch (const std::exception& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

}  // namespace

ExperimentSpec parse_spec(std::istream& in) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
    }
    for (const auto& [section, body] : tree) {
        const auto it = known_keys().find(section);
        if (it == known_keys().end()) throw ConfigError("unknown section [" + section + "]");
        if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
        for (const auto& [key, value] : body) {
            if (!it->second.contains(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
        }
    }

    ExperimentSpec s;
    auto get = [&](const std::string& path) -> std::optional<std::string> {
        if (auto v = tree.get_optional<std::string>(path)) return trim(*v);
        return std::nullopt;
    };

    if (auto v = get("experiment.protocol")) {
        if (*v == "cop") {
            s.protocol = Protocol::Cop;
        } else if (*v == "phase") {
            s.protocol = Protocol::Phase;
        } else if (*v == "ingest") {
            s.protocol = Protocol::Ingest;
        } else {
            throw ConfigError("experiment.protocol: unknown protocol '" + *v + "'");
        }
    } else {
        throw ConfigError("experiment.protocol is required");
    }
    if (auto v = get("experiment.seed")) s.master_seed = parse_number<std::uint64_t>(*v, "experiment.seed");
    if (auto v = get("experiment.formulas_per_set")) {
        s.formulas_per_set = parse_number<std::size_t>(*v, "experiment.formulas_per_set");
        if (s.formulas_per_set < 1) throw ConfigError("experiment.formulas_per_set must be at least 1");
    }
    if (auto v = get("experiment.workers")) s.workers = parse_number<std::size_t>(*v, "experiment.workers");
    if (auto v = get("experiment.output")) s.output_dir = *v;

    if (auto v = get("dataset.positives")) s.dataset.positives = parse_number<std::size_t>(*v, "dataset.positives");
    if (auto v = get("dataset.negatives")) s.dataset.negatives = parse_number<std::size_t>(*v, "dataset.negatives");
    if (auto v = get("dataset.negative_tries")) {
        s.dataset.negative_tries_per_sample = parse_number<std::uint64_t>(*v, "dataset.negative_tries");
    }

    auto& b = s.dataset.budget;
    if (auto v = get("sampler.max_decisions")) b.max_decisions = parse_number<std::uint64_t>(*v, "sampler.max_decisions");
    if (auto v = get("sampler.max_models_per_cell")) {
        b.max_models_per_cell = parse_number<std::size_t>(*v, "sampler.max_models_per_cell");
    }
    if (auto v = get("sampler.cell_target")) b.cell_target = parse_number<std::size_t>(*v, "sampler.cell_target");
    if (auto v = get("sampler.xor_density")) b.xor_density = parse_number<double>(*v, "sampler.xor_density");

    auto& m = s.mlp;
    if (auto v = get("mlp.hidden")) m.hidden_layers = parse_size_list(*v);
    if (auto v = get("mlp.activation")) m.activation = config_activation(*v, "mlp.activation");
    if (auto v = get("mlp.learning_rate")) m.learning_rate = parse_number<double>(*v, "mlp.learning_rate");
    if (auto v = get("mlp.beta1")) m.beta1 = parse_number<double>(*v, "mlp.beta1");
    if (auto v = get("mlp.beta2")) m.beta2 = parse_number<double>(*v, "mlp.beta2");
    if (auto v = get("mlp.epochs")) m.epochs = parse_number<std::size_t>(*v, "mlp.epochs");
    if (auto v = get("mlp.l2")) m.l2 = parse_number<double>(*v, "mlp.l2");
    if (auto v = get("mlp.batch_size")) m.batch_size = parse_number<std::size_t>(*v, "mlp.batch_size");

    if (auto v = get("cop.family")) {
        if (*v == "flat3gcp") {
            s.family = CopFamily::Flat3Gcp;
        } else if (*v == "morph5gcp") {
            s.family = CopFamily::Morphed5Gcp;
            s.nodes = {100};
        } else if (*v == "clique3") {
            s.family = CopFamily::Clique3;
            s.nodes = {50};
        } else {
            throw ConfigError("cop.family: unknown family '" + *v + "'");
        }
    }
    if (auto v = get("cop.nodes")) s.nodes = parse_size_list(*v);
    if (auto v = get("cop.edges")) s.edges = parse_size_list(*v);
    if (auto v = get("cop.colors")) s.colors = parse_number<std::size_t>(*v, "cop.colors");
    if (auto v = get("cop.degree")) s.degree = parse_number<std::size_t>(*v, "cop.degree");
    if (auto v = get("cop.ratios")) s.ratios = parse_double_list(*v);
    if (auto v = get("cop.expected_cliques")) s.expected_cliques = parse_number<double>(*v, "cop.expected_cliques");

    if (auto v = get("phase.vars")) s.vars = parse_size_list(*v);
    if (auto v = get("phase.levels")) s.levels = parse_int_list(*v);
    if (auto v = get("phase.activations")) {
        s.activations.clear();
        for (const auto& a : split_list(*v)) s.activations.push_back(config_activation(a, "phase.activations"));
    }
    if (auto v = get("phase.max_neurons")) s.max_neurons = parse_number<std::size_t>(*v, "phase.max_neurons");

    if (auto v = get("ingest.formulas")) s.formula_files = split_list(*v);
    if (auto v = get("ingest.samples")) s.sample_files = split_list(*v);

    try {
        s.validate();
    } catch (const ContractError& e) {
        throw ConfigError(e.what());
    }
    return s;
}

ExperimentSpec parse_spec(const std::string& text) {
    std::istringstream in(text);
    return parse_spec(in);
}

ExperimentSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    try {
        return parse_spec(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

}  // namespace cnfl
