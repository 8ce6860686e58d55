#pragma once

#include "cdnod/discovery.hpp"
#include "cdnod/types.hpp"

#include <string>
#include <vector>

namespace cdnod {

struct CsvTable {
    std::vector<std::string> header;
    Matrix values;
};

/// Strict numeric CSV with a required header row. Parse failures name the
/// offending row and column.
CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

/// Builds a Dataset from a parsed CSV: the context comes from a named column,
/// from a domains file (one domain index per data row), or defaults to the
/// row order as a time index.
Dataset dataset_from_csv(const CsvTable& table, const std::string& context_column,
                         const std::string& domains_file, ContextKind kind);

/// Serializable discovery outcome: nodes with changing flags, edges with
/// marks and lags, pseudo-confounded pairs, config echo, seed, and version.
struct GraphDocument {
    std::string version;
    std::uint64_t seed = 0;
    std::string config_echo;
    std::vector<std::string> node_names;
    std::vector<bool> node_changing;
    struct Edge {
        std::string from, to;
        std::string mark;  // "undirected" | "directed"
        int lag = 0;       // lag annotation for unit graphs
    };
    std::vector<Edge> edges;
    struct Pair {
        std::string a, b;
        std::string kind;  // "nonadjacent" | "adjacent"
        std::string detail;
    };
    std::vector<Pair> pseudo_confounded_pairs;

    bool operator==(const GraphDocument& other) const;
};

extern const char* kLibraryVersion;

GraphDocument make_graph_document(const DiscoveryResult& result, const DiscoveryConfig& cfg);
std::string serialize_graph_document(const GraphDocument& doc);
GraphDocument parse_graph_document(const std::string& text);
void write_graph_document(const std::string& path, const GraphDocument& doc);
GraphDocument read_graph_document(const std::string& path);

/// Human-readable one-screen summary of a discovery result.
std::string summarize(const DiscoveryResult& result);

/// Serialized audit log (one JSON object per line).
std::string serialize_audit_log(const std::vector<AuditEntry>& log);

}  // namespace cdnod
