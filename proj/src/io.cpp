#include "cdnod/io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace cdnod {

using nlohmann::json;

const char* kLibraryVersion = "cdnod 1.0.0";

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        cell.erase(0, cell.find_first_not_of(" \t\r"));
        cell.erase(cell.find_last_not_of(" \t\r") + 1);
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open CSV file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument(path + ": empty file");
    CsvTable table;
    table.header = split_csv_line(line);
    if (table.header.empty()) throw std::invalid_argument(path + ": empty header row");
    std::vector<std::vector<double>> rows;
    int row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != table.header.size())
            throw std::invalid_argument(path + ": row " + std::to_string(row_no) + " has " +
                                        std::to_string(cells.size()) + " cells, expected " +
                                        std::to_string(table.header.size()));
        std::vector<double> row(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            try {
                std::size_t used = 0;
                row[c] = std::stod(cells[c], &used);
                if (used != cells[c].size()) throw std::invalid_argument("trailing characters");
            } catch (const std::exception&) {
                throw std::invalid_argument(path + ": row " + std::to_string(row_no) +
                                            ", column '" + table.header[c] +
                                            "': cannot parse '" + cells[c] + "' as a number");
            }
        }
        rows.push_back(std::move(row));
    }
    table.values = Matrix(static_cast<int>(rows.size()), static_cast<int>(table.header.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            table.values(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
    return table;
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write CSV file: " + path);
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (c) out << ",";
        out << table.header[c];
    }
    out << "\n";
    out.precision(12);
    for (int r = 0; r < table.values.rows(); ++r) {
        for (int c = 0; c < table.values.cols(); ++c) {
            if (c) out << ",";
            out << table.values(r, c);
        }
        out << "\n";
    }
}

Dataset dataset_from_csv(const CsvTable& table, const std::string& context_column,
                         const std::string& domains_file, ContextKind kind) {
    Dataset data;
    data.context_kind = kind;
    int context_idx = -1;
    if (!context_column.empty()) {
        for (std::size_t c = 0; c < table.header.size(); ++c)
            if (table.header[c] == context_column) context_idx = static_cast<int>(c);
        if (context_idx < 0)
            throw std::invalid_argument("context column '" + context_column +
                                        "' not found in CSV header");
    }
    const int n = static_cast<int>(table.values.rows());
    if (n < 2) throw std::invalid_argument("CSV has fewer than 2 data rows");
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (static_cast<int>(c) == context_idx) continue;
        data.names.push_back(table.header[c]);
    }
    data.values = Matrix(n, static_cast<int>(data.names.size()));
    int out_c = 0;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        if (static_cast<int>(c) == context_idx) continue;
        data.values.col(out_c++) = table.values.col(static_cast<int>(c));
    }
    if (context_idx >= 0) {
        data.context = table.values.col(context_idx);
    } else if (!domains_file.empty()) {
        std::ifstream in(domains_file);
        if (!in) throw std::invalid_argument("cannot open domains file: " + domains_file);
        data.context = Matrix(n, 1);
        std::string line;
        int row = 0;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            if (row >= n) throw std::invalid_argument("domains file has more rows than the CSV");
            data.context(row++, 0) = std::stod(line);
        }
        if (row != n) throw std::invalid_argument("domains file has fewer rows than the CSV");
        data.context_kind = ContextKind::domain;
    } else {
        data.context = Matrix(n, 1);
        for (int t = 0; t < n; ++t) data.context(t, 0) = t + 1;
        data.context_kind = ContextKind::time;
    }
    data.validate();
    return data;
}

bool GraphDocument::operator==(const GraphDocument& other) const {
    auto edge_eq = [](const Edge& a, const Edge& b) {
        return a.from == b.from && a.to == b.to && a.mark == b.mark && a.lag == b.lag;
    };
    auto pair_eq = [](const Pair& a, const Pair& b) {
        return a.a == b.a && a.b == b.b && a.kind == b.kind && a.detail == b.detail;
    };
    if (version != other.version || seed != other.seed || config_echo != other.config_echo ||
        node_names != other.node_names || node_changing != other.node_changing ||
        edges.size() != other.edges.size() ||
        pseudo_confounded_pairs.size() != other.pseudo_confounded_pairs.size())
        return false;
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (!edge_eq(edges[i], other.edges[i])) return false;
    for (std::size_t i = 0; i < pseudo_confounded_pairs.size(); ++i)
        if (!pair_eq(pseudo_confounded_pairs[i], other.pseudo_confounded_pairs[i])) return false;
    return true;
}

namespace {

int lag_of(const std::string& name) {
    const auto pos = name.rfind("(t-");
    if (pos == std::string::npos) return 0;
    return std::stoi(name.substr(pos + 3));
}

}  // namespace

GraphDocument make_graph_document(const DiscoveryResult& result, const DiscoveryConfig& cfg) {
    GraphDocument doc;
    doc.version = kLibraryVersion;
    doc.seed = cfg.seed;
    std::ostringstream echo;
    echo << "alpha_ci=" << cfg.alpha_ci << " alpha_dep=" << cfg.alpha_dep
         << " max_cond_size=" << cfg.max_cond_size
         << " null=" << (cfg.null_method == NullMethod::gamma ? "gamma" : "permutation")
         << " kernel_width=" << (cfg.kernel_width > 0 ? std::to_string(cfg.kernel_width) : "median")
         << " use_context=" << (cfg.use_context ? "true" : "false");
    doc.config_echo = echo.str();

    const auto& g = result.graph;
    const int m = result.observed_count();
    std::vector<bool> changing(m, false);
    for (int v : result.changing_modules)
        if (v < m) changing[v] = true;
    for (int v = 0; v < m; ++v) {
        doc.node_names.push_back(g.name(v));
        doc.node_changing.push_back(changing[v]);
    }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (i < j && g.undirected(i, j))
                doc.edges.push_back({g.name(i), g.name(j), "undirected",
                                     std::abs(lag_of(g.name(i)) - lag_of(g.name(j)))});
            if (g.directed(i, j))
                doc.edges.push_back({g.name(i), g.name(j), "directed",
                                     std::abs(lag_of(g.name(i)) - lag_of(g.name(j)))});
        }
    for (const auto& p : result.pseudo_confounded_pairs)
        doc.pseudo_confounded_pairs.push_back(
            {g.name(p.a), g.name(p.b), p.adjacent ? "adjacent" : "nonadjacent", p.detail});
    return doc;
}

std::string serialize_graph_document(const GraphDocument& doc) {
    json j;
    j["version"] = doc.version;
    j["seed"] = doc.seed;
    j["config"] = doc.config_echo;
    j["nodes"] = json::array();
    for (std::size_t i = 0; i < doc.node_names.size(); ++i)
        j["nodes"].push_back({{"name", doc.node_names[i]},
                              {"changing", static_cast<bool>(doc.node_changing[i])}});
    j["edges"] = json::array();
    for (const auto& e : doc.edges)
        j["edges"].push_back({{"from", e.from}, {"to", e.to}, {"mark", e.mark}, {"lag", e.lag}});
    j["pseudo_confounded_pairs"] = json::array();
    for (const auto& p : doc.pseudo_confounded_pairs)
        j["pseudo_confounded_pairs"].push_back(
            {{"a", p.a}, {"b", p.b}, {"kind", p.kind}, {"detail", p.detail}});
    return j.dump(2) + "\n";
}

GraphDocument parse_graph_document(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("graph document: ") + e.what());
    }
    GraphDocument doc;
    try {
        doc.version = j.at("version").get<std::string>();
        doc.seed = j.at("seed").get<std::uint64_t>();
        doc.config_echo = j.at("config").get<std::string>();
        for (const auto& node : j.at("nodes")) {
            doc.node_names.push_back(node.at("name").get<std::string>());
            doc.node_changing.push_back(node.at("changing").get<bool>());
        }
        for (const auto& e : j.at("edges")) {
            GraphDocument::Edge edge;
            edge.from = e.at("from").get<std::string>();
            edge.to = e.at("to").get<std::string>();
            edge.mark = e.at("mark").get<std::string>();
            edge.lag = e.at("lag").get<int>();
            if (edge.mark != "undirected" && edge.mark != "directed")
                throw std::invalid_argument("graph document: unknown edge mark '" + edge.mark + "'");
            doc.edges.push_back(std::move(edge));
        }
        for (const auto& p : j.at("pseudo_confounded_pairs")) {
            GraphDocument::Pair pair;
            pair.a = p.at("a").get<std::string>();
            pair.b = p.at("b").get<std::string>();
            pair.kind = p.at("kind").get<std::string>();
            pair.detail = p.at("detail").get<std::string>();
            doc.pseudo_confounded_pairs.push_back(std::move(pair));
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("graph document: ") + e.what());
    }
    return doc;
}

void write_graph_document(const std::string& path, const GraphDocument& doc) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write graph document: " + path);
    out << serialize_graph_document(doc);
}

GraphDocument read_graph_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open graph document: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_graph_document(ss.str());
}

std::string summarize(const DiscoveryResult& result) {
    const auto& g = result.graph;
    const int m = result.observed_count();
    std::ostringstream out;
    out << "nodes: " << m << "\n";
    out << "changing modules:";
    if (result.changing_modules.empty()) out << " (none)";
    for (int v : result.changing_modules) out << " " << g.name(v);
    out << "\n";
    out << "edges:\n";
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (i < j && g.undirected(i, j))
                out << "  " << g.name(i) << " - " << g.name(j) << "\n";
            if (g.directed(i, j)) out << "  " << g.name(i) << " -> " << g.name(j) << "\n";
        }
    if (!result.pseudo_confounded_pairs.empty()) {
        out << "pseudo-confounded pairs:\n";
        for (const auto& p : result.pseudo_confounded_pairs)
            out << "  " << g.name(p.a) << " , " << g.name(p.b) << " ("
                << (p.adjacent ? "adjacent" : "nonadjacent") << ")\n";
    }
    out << "CI tests run: "
        << std::count_if(result.audit_log.begin(), result.audit_log.end(),
                         [](const AuditEntry& e) { return e.kind == AuditEntry::Kind::ci_test; })
        << "\n";
    return out.str();
}

std::string serialize_audit_log(const std::vector<AuditEntry>& log) {
    std::ostringstream out;
    for (const auto& e : log) {
        json j;
        switch (e.kind) {
            case AuditEntry::Kind::ci_test: j["kind"] = "ci_test"; break;
            case AuditEntry::Kind::dependence: j["kind"] = "dependence"; break;
            case AuditEntry::Kind::orientation: j["kind"] = "orientation"; break;
            case AuditEntry::Kind::note: j["kind"] = "note"; break;
        }
        j["stage"] = e.stage;
        if (e.i >= 0) j["i"] = e.i;
        if (e.j >= 0) j["j"] = e.j;
        if (!e.cond.empty() || e.kind == AuditEntry::Kind::ci_test ||
            e.kind == AuditEntry::Kind::dependence)
            j["cond"] = e.cond;
        if (e.kind == AuditEntry::Kind::ci_test) {
            j["statistic"] = e.statistic;
            j["p_value"] = e.p_value;
            j["degenerate"] = e.degenerate;
        }
        if (e.kind == AuditEntry::Kind::dependence) {
            j["delta_forward"] = e.statistic;
            j["delta_backward"] = e.statistic_backward;
            j["degenerate"] = e.degenerate;
        }
        j["decision"] = e.decision;
        out << j.dump() << "\n";
    }
    return out.str();
}

}  // namespace cdnod
