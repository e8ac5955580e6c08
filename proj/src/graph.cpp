#include "rdslab/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>

#include <fmt/core.h>

#include "rdslab/errors.hpp"

namespace rdslab {

namespace {

std::uint64_t edge_key(node_id u, node_id v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(u) << 32) | v;
}

}  // namespace

graph::graph(std::size_t n_nodes, std::span<const edge> edges) {
    std::vector<std::size_t> deg(n_nodes, 0);
    for (const auto& [u, v] : edges) {
        if (u >= n_nodes || v >= n_nodes)
            throw config_error(fmt::format("edge ({}, {}) references a node >= {}", u, v, n_nodes));
        if (u == v) throw config_error(fmt::format("self-loop at node {}", u));
        ++deg[u];
        ++deg[v];
    }
    offsets_.assign(n_nodes + 1, 0);
    for (std::size_t i = 0; i < n_nodes; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
    targets_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [u, v] : edges) {
        targets_[fill[u]++] = v;
        targets_[fill[v]++] = u;
    }
    for (std::size_t i = 0; i < n_nodes; ++i) {
        auto first = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
        auto last = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
        std::sort(first, last);
        if (auto dup = std::adjacent_find(first, last); dup != last)
            throw config_error(fmt::format("duplicate edge ({}, {})", std::min<std::size_t>(i, *dup),
                                           std::max<std::size_t>(i, *dup)));
    }
}

bool graph::has_edge(node_id u, node_id v) const noexcept {
    if (degree(u) > degree(v)) std::swap(u, v);
    const auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<edge> graph::edges() const {
    std::vector<edge> out;
    out.reserve(edge_count());
    for (node_id u = 0; u < node_count(); ++u)
        for (node_id v : neighbors(u))
            if (u < v) out.emplace_back(u, v);
    return out;
}

std::vector<std::uint32_t> graph::degrees() const {
    std::vector<std::uint32_t> out(node_count());
    for (node_id u = 0; u < node_count(); ++u) out[u] = static_cast<std::uint32_t>(degree(u));
    return out;
}

std::string validate(const graph& g) {
    for (node_id u = 0; u < g.node_count(); ++u) {
        const auto nb = g.neighbors(u);
        for (std::size_t i = 0; i < nb.size(); ++i) {
            const node_id v = nb[i];
            if (v >= g.node_count()) return fmt::format("node {} has out-of-range neighbor {}", u, v);
            if (v == u) return fmt::format("self-loop at {}", u);
            if (i > 0 && nb[i - 1] >= v) return fmt::format("neighbors of {} not strictly sorted", u);
            const auto back = g.neighbors(v);
            if (!std::binary_search(back.begin(), back.end(), u))
                return fmt::format("asymmetric edge {} -> {}", u, v);
        }
    }
    return {};
}

void write_edge_list(const graph& g, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw io_error(fmt::format("cannot write '{}'", path.string()));
    out << "# nodes=" << g.node_count() << '\n';
    for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
    if (!out) throw io_error(fmt::format("write failure on '{}'", path.string()));
}

graph read_edge_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error(fmt::format("cannot open '{}'", path.string()));

    std::optional<std::size_t> n_nodes;
    std::vector<edge> edges;
    std::vector<std::size_t> edge_line;
    std::unordered_set<std::uint64_t> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (line.front() == '#') {
            constexpr std::string_view tag = "# nodes=";
            if (line.compare(0, tag.size(), tag) == 0) {
                std::size_t n = 0;
                const char* first = line.data() + tag.size();
                const char* last = line.data() + line.size();
                auto [ptr, ec] = std::from_chars(first, last, n);
                if (ec != std::errc{} || ptr != last) throw parse_error("bad node-count header", lineno);
                n_nodes = n;
            }
            continue;
        }
        std::istringstream row(line);
        long long u = -1, v = -1;
        std::string extra;
        if (!(row >> u >> v) || (row >> extra) || u < 0 || v < 0)
            throw parse_error(fmt::format("expected 'u v', got '{}'", line), lineno);
        if (u == v) throw parse_error(fmt::format("self-loop at node {}", u), lineno);
        if (u > 0xFFFFFFFFLL || v > 0xFFFFFFFFLL) throw parse_error("node id out of range", lineno);
        const auto a = static_cast<node_id>(u), b = static_cast<node_id>(v);
        if (!seen.insert(edge_key(a, b)).second)
            throw parse_error(fmt::format("duplicate edge ({}, {})", std::min(a, b), std::max(a, b)), lineno);
        edges.emplace_back(a, b);
        edge_line.push_back(lineno);
    }
    if (in.bad()) throw io_error(fmt::format("read failure on '{}'", path.string()));
    if (!n_nodes) {
        node_id top = 0;
        for (const auto& [a, b] : edges) top = std::max({top, a, b});
        n_nodes = edges.empty() ? 0 : std::size_t{top} + 1;
    }
    for (std::size_t i = 0; i < edges.size(); ++i)
        if (edges[i].first >= *n_nodes || edges[i].second >= *n_nodes)
            throw parse_error(fmt::format("node id >= N={}", *n_nodes), edge_line[i]);
    return graph(*n_nodes, edges);
}

}  // namespace rdslab
