#include "cnfl/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cnfl {

namespace {

std::string fixed6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

std::string fixed2(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            out.push_back(std::move(cell));
            cell.clear();
        } else {
            cell.push_back(c);
        }
    }
    out.push_back(std::move(cell));
    return out;
}

template <class T>
T to_number(const std::string& text, const char* field) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        throw std::invalid_argument(std::string("bad ") + field + " '" + text + "'");
    }
    return value;
}

void sort_rows(std::vector<Row>& rows) {
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.job != b.job) return a.job < b.job;
        return a.set < b.set;
    });
}

std::string write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    out.close();
    if (!out) throw std::runtime_error("write failed: " + path.string());
    return path.string();
}

struct PhaseLabel {
    std::string activation;
    std::size_t vars = 0;
    int level = 0;
};

std::optional<PhaseLabel> parse_phase_label(const std::string& set) {
    const auto a = set.find('/');
    if (a == std::string::npos) return std::nullopt;
    const auto b = set.find('/', a + 1);
    if (b == std::string::npos || set.find('/', b + 1) != std::string::npos) return std::nullopt;
    const std::string vpart = set.substr(a + 1, b - a - 1);
    std::string cpart = set.substr(b + 1);
    if (vpart.size() < 2 || vpart[0] != 'v' || cpart.size() < 2 || cpart[0] != 'c') return std::nullopt;
    cpart.erase(0, 1);
    if (cpart[0] == '+') cpart.erase(0, 1);
    try {
        PhaseLabel p;
        p.activation = set.substr(0, a);
        p.vars = to_number<std::size_t>(vpart.substr(1), "vars");
        p.level = to_number<int>(cpart, "level");
        return p;
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

}  // namespace

std::string format_row(const Row& r) {
    std::string s;
    s += std::to_string(r.job) + ',' + r.set + ',' + std::to_string(r.index) + ',' + r.formula + ',' +
         std::to_string(r.seed) + ',' + std::to_string(r.vars) + ',' + std::to_string(r.clauses) + ',';
    s += r.sampled ? "ok," : "skipped,";
    s += r.skip_reason + ',' + std::to_string(r.positives) + ',' + std::to_string(r.negatives) + ',' + r.sampler_mode +
         ',';
    if (r.sampled) {
        s += fixed6(r.mean_acc) + ',' + fixed6(r.min_acc) + ',' + (r.perfect ? "1" : "0");
    } else {
        s += ",,";
    }
    s += ',';
    if (r.min_neurons) s += std::to_string(*r.min_neurons);
    s += ',';
    if (r.dt_mean_acc) s += fixed6(*r.dt_mean_acc);
    return s;
}

Row parse_row(const std::string& line) {
    const auto c = split_csv(line);
    if (c.size() != 17) throw std::invalid_argument("row has " + std::to_string(c.size()) + " fields, expected 17");
    Row r;
    r.job = to_number<std::size_t>(c[0], "job");
    r.set = c[1];
    r.index = to_number<std::size_t>(c[2], "index");
    r.formula = c[3];
    r.seed = to_number<std::uint64_t>(c[4], "seed");
    r.vars = to_number<std::size_t>(c[5], "vars");
    r.clauses = to_number<std::size_t>(c[6], "clauses");
    if (c[7] != "ok" && c[7] != "skipped") throw std::invalid_argument("bad status '" + c[7] + "'");
    r.sampled = c[7] == "ok";
    r.skip_reason = c[8];
    r.positives = to_number<std::size_t>(c[9], "positives");
    r.negatives = to_number<std::size_t>(c[10], "negatives");
    r.sampler_mode = c[11];
    if (r.sampled) {
        r.mean_acc = to_number<double>(c[12], "mean_acc");
        r.min_acc = to_number<double>(c[13], "min_acc");
        if (c[14] != "0" && c[14] != "1") throw std::invalid_argument("bad perfect flag '" + c[14] + "'");
        r.perfect = c[14] == "1";
    }
    if (!c[15].empty()) r.min_neurons = to_number<std::size_t>(c[15], "min_neurons");
    if (!c[16].empty()) r.dt_mean_acc = to_number<double>(c[16], "dt_mean_acc");
    return r;
}

Row canonical(const Row& r) { return parse_row(format_row(r)); }

std::vector<SetSummary> summarize(std::vector<Row> rows) {
    sort_rows(rows);
    std::vector<SetSummary> out;
    std::map<std::string, std::size_t> where;
    std::vector<std::vector<const Row*>> members;
    for (const auto& r : rows) {
        auto [it, fresh] = where.try_emplace(r.set, out.size());
        if (fresh) {
            out.emplace_back();
            out.back().set = r.set;
            members.emplace_back();
        }
        members[it->second].push_back(&r);
    }
    for (std::size_t s = 0; s < out.size(); ++s) {
        auto& sum = out[s];
        double acc_total = 0.0;
        double acc_min = 1.0;
        std::size_t perfect = 0;
        std::size_t with_neurons = 0;
        double neurons = 0.0;
        for (const Row* r : members[s]) {
            ++sum.attempted;
            if (!r->sampled) {
                ++sum.skip_reasons[r->skip_reason];
                continue;
            }
            ++sum.sampled;
            acc_total += r->mean_acc;
            acc_min = std::min(acc_min, r->mean_acc);
            perfect += r->perfect ? 1 : 0;
            if (r->min_neurons) {
                ++with_neurons;
                neurons += static_cast<double>(*r->min_neurons);
            }
        }
        if (sum.sampled > 0) {
            const auto n = static_cast<double>(sum.sampled);
            sum.mean_acc = acc_total / n;
            sum.min_acc = acc_min;
            sum.pct_perfect = 100.0 * static_cast<double>(perfect) / n;
        }
        if (with_neurons > 0) sum.avg_min_neurons = neurons / static_cast<double>(with_neurons);
    }
    return out;
}

std::string rows_csv(std::vector<Row> rows) {
    sort_rows(rows);
    std::string out = std::string(kRowsHeader) + '\n';
    for (const auto& r : rows) out += format_row(r) + '\n';
    return out;
}

std::string summary_csv(const std::vector<SetSummary>& summaries) {
    std::string out = std::string(kSummaryHeader) + '\n';
    auto opt = [](const std::optional<double>& x) { return x ? fixed6(*x) : std::string(); };
    for (const auto& s : summaries) {
        out += s.set + ',' + std::to_string(s.attempted) + ',' + std::to_string(s.sampled) + ',' + opt(s.mean_acc) +
               ',' + opt(s.min_acc) + ',' + opt(s.pct_perfect) + ',' + opt(s.avg_min_neurons) + '\n';
    }
    return out;
}

std::string skips_csv(const std::vector<SetSummary>& summaries) {
    std::string out = "set,reason,count\n";
    for (const auto& s : summaries) {
        for (const auto& [reason, n] : s.skip_reasons) out += s.set + ',' + reason + ',' + std::to_string(n) + '\n';
    }
    return out;
}

std::vector<FigurePoint> figure_points(const std::vector<SetSummary>& summaries, FigureMetric metric) {
    // (activation, vars) -> level -> value
    std::map<std::pair<std::string, std::size_t>, std::map<int, double>> table;
    for (const auto& s : summaries) {
        const auto label = parse_phase_label(s.set);
        if (!label) continue;
        const auto& value = metric == FigureMetric::PercentLearned ? s.pct_perfect : s.avg_min_neurons;
        auto& levels = table[{label->activation, label->vars}];
        if (value) levels[label->level] = *value;
    }
    std::vector<FigurePoint> out;
    for (const auto& [key, levels] : table) {
        const std::string series = key.first + "/v" + std::to_string(key.second);
        for (const auto& [level, y] : levels) out.push_back({"individual", series, static_cast<double>(level), y});
    }
    static constexpr std::array<const char*, 3> kGroups{"under", "onphase", "over"};
    for (std::size_t g = 0; g < kGroups.size(); ++g) {
        for (const auto& [key, levels] : table) {
            double total = 0.0;
            std::size_t n = 0;
            for (const auto& [level, y] : levels) {
                const std::size_t group = level < 0 ? 0 : (level == 0 ? 1 : 2);
                if (group != g) continue;
                total += y;
                ++n;
            }
            if (n == 0) continue;
            out.push_back({"grouped", key.first + '/' + kGroups[g], static_cast<double>(key.second),
                           total / static_cast<double>(n)});
        }
    }
    return out;
}

std::string figure_csv(const std::vector<FigurePoint>& points) {
    std::string out = "panel,series,x,y\n";
    for (const auto& p : points) {
        char x[32];
        std::snprintf(x, sizeof x, "%g", p.x);
        out += p.panel + ',' + p.series + ',' + x + ',' + fixed6(p.y) + '\n';
    }
    return out;
}

std::string figure_svg(const std::vector<FigurePoint>& points, const std::string& title, const std::string& y_label) {
    static constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                         "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
    constexpr double kPanelW = 420, kPanelH = 300, kMargin = 50;
    const std::array<std::string, 2> panels{"individual", "grouped"};
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * kPanelW << "\" height=\"" << kPanelH + 40
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kPanelW << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    for (std::size_t p = 0; p < panels.size(); ++p) {
        std::vector<const FigurePoint*> pts;
        for (const auto& pt : points) {
            if (pt.panel == panels[p]) pts.push_back(&pt);
        }
        const double ox = static_cast<double>(p) * kPanelW + kMargin;
        const double oy = 30;
        const double w = kPanelW - 1.5 * kMargin;
        const double h = kPanelH - kMargin;
        svg << "<text x=\"" << ox + w / 2 << "\" y=\"" << oy + 4 << "\" text-anchor=\"middle\">" << panels[p]
            << "</text>\n";
        svg << "<rect x=\"" << ox << "\" y=\"" << oy + 10 << "\" width=\"" << w << "\" height=\"" << h - 10
            << "\" fill=\"none\" stroke=\"#444\"/>\n";
        if (pts.empty()) continue;
        double x0 = pts[0]->x, x1 = pts[0]->x, y0 = 0.0, y1 = pts[0]->y;
        for (const auto* pt : pts) {
            x0 = std::min(x0, pt->x);
            x1 = std::max(x1, pt->x);
            y1 = std::max(y1, pt->y);
        }
        if (x1 == x0) x1 = x0 + 1;
        if (y1 <= y0) y1 = y0 + 1;
        auto sx = [&](double x) { return ox + (x - x0) / (x1 - x0) * w; };
        auto sy = [&](double y) { return oy + h - (y - y0) / (y1 - y0) * (h - 10); };
        svg << "<text x=\"" << ox << "\" y=\"" << oy + h + 14 << "\">" << fixed2(x0) << "</text>\n";
        svg << "<text x=\"" << ox + w << "\" y=\"" << oy + h + 14 << "\" text-anchor=\"end\">" << fixed2(x1)
            << "</text>\n";
        svg << "<text x=\"" << ox - 4 << "\" y=\"" << sy(y1) + 4 << "\" text-anchor=\"end\">" << fixed2(y1)
            << "</text>\n";
        svg << "<text x=\"" << ox - 4 << "\" y=\"" << sy(y0) << "\" text-anchor=\"end\">" << fixed2(y0)
            << "</text>\n";
        svg << "<text x=\"" << ox - 36 << "\" y=\"" << oy + h / 2 << "\" transform=\"rotate(-90 " << ox - 36 << ' '
            << oy + h / 2 << ")\" text-anchor=\"middle\">" << y_label << "</text>\n";
        std::vector<std::string> series;
        for (const auto* pt : pts) {
            if (std::find(series.begin(), series.end(), pt->series) == series.end()) series.push_back(pt->series);
        }
        for (std::size_t s = 0; s < series.size(); ++s) {
            const char* color = kPalette[s % kPalette.size()];
            std::vector<const FigurePoint*> line;
            for (const auto* pt : pts) {
                if (pt->series == series[s]) line.push_back(pt);
            }
            std::sort(line.begin(), line.end(), [](const auto* a, const auto* b) { return a->x < b->x; });
            svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < line.size(); ++i) {
                svg << (i ? " " : "") << fixed2(sx(line[i]->x)) << ',' << fixed2(sy(line[i]->y));
            }
            svg << "\"/>\n";
            svg << "<text x=\"" << ox + w + 4 << "\" y=\"" << oy + 20 + 12 * static_cast<double>(s) << "\" fill=\""
                << color << "\">" << series[s] << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_report(const std::vector<Row>& rows, const std::string& outdir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) throw std::runtime_error("cannot create " + outdir + ": " + ec.message());
    const fs::path dir(outdir);
    const auto summaries = summarize(rows);
    write_text(dir / "rows.csv", rows_csv(rows));
    write_text(dir / "summary.csv", summary_csv(summaries));
    write_text(dir / "skips.csv", skips_csv(summaries));

    const bool phase = std::any_of(summaries.begin(), summaries.end(),
                                   [](const SetSummary& s) { return parse_phase_label(s.set).has_value(); });
    if (!phase) return;
    const auto learned = figure_points(summaries, FigureMetric::PercentLearned);
    write_text(dir / "fig_percent_learned.csv", figure_csv(learned));
    write_text(dir / "fig_percent_learned.svg", figure_svg(learned, "Percent of formulas learned", "% learned"));
    const auto neurons = figure_points(summaries, FigureMetric::AvgNeurons);
    write_text(dir / "fig_avg_neurons.csv", figure_csv(neurons));
    write_text(dir / "fig_avg_neurons.svg", figure_svg(neurons, "Average neurons required", "neurons"));
}

std::vector<Row> read_rows_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<Row> rows;
    std::set<std::pair<std::size_t, std::string>> seen;
    std::size_t at = 0;
    while (at < text.size()) {
        const auto nl = text.find('\n', at);
        if (nl == std::string::npos) break;  // torn final line
        const std::string line = text.substr(at, nl - at);
        at = nl + 1;
        if (line.empty() || line[0] == '#' || line == kRowsHeader) continue;
        Row r;
        try {
            r = parse_row(line);
        } catch (const std::invalid_argument&) {
            continue;
        }
        if (seen.insert({r.job, r.set}).second) rows.push_back(std::move(r));
    }
    sort_rows(rows);
    return rows;
}

}  // namespace cnfl
