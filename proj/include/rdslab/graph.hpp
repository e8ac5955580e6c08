#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace rdslab {

using node_id = std::uint32_t;
using edge = std::pair<node_id, node_id>;

/// Immutable simple undirected graph on nodes 0..N-1.
///
/// Neighbor lists are stored sorted (set semantics) in one contiguous array;
/// `neighbors(u)` is a view into it. Safe for concurrent reads.
class graph {
public:
    graph() = default;

    /// Throws config_error on a self-loop, a duplicate edge (in either
    /// orientation), or an endpoint >= n_nodes.
    graph(std::size_t n_nodes, std::span<const edge> edges);

    std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t edge_count() const noexcept { return targets_.size() / 2; }

    std::span<const node_id> neighbors(node_id u) const noexcept {
        return {targets_.data() + offsets_[u], targets_.data() + offsets_[u + 1]};
    }
    std::size_t degree(node_id u) const noexcept { return offsets_[u + 1] - offsets_[u]; }
    bool has_edge(node_id u, node_id v) const noexcept;

    /// Each edge once, (u, v) with u < v, rows sorted lexicographically.
    std::vector<edge> edges() const;
    std::vector<std::uint32_t> degrees() const;

    friend bool operator==(const graph&, const graph&) = default;

private:
    std::vector<std::size_t> offsets_;
    std::vector<node_id> targets_;
};

/// Checks the structural invariants (symmetry, no self-loops, no duplicate
/// neighbors, sorted lists). Returns an empty string when valid, otherwise a
/// description of the first violation. Used by tests on every built graph.
std::string validate(const graph& g);

/// Edge-list file: "# nodes=N" header, then "u v" lines with u < v in
/// lexicographic order.
void write_edge_list(const graph& g, const std::filesystem::path& path);

/// Throws parse_error with the line number on malformed rows, self-loops,
/// duplicate edges, or ids >= N. Rows need not be sorted or oriented.
graph read_edge_list(const std::filesystem::path& path);

}  // namespace rdslab
