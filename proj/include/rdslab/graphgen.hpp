#pragma once

#include <cstddef>
#include <optional>

#include "rdslab/degseq.hpp"
#include "rdslab/graph.hpp"
#include "rdslab/rng.hpp"

namespace rdslab {

/// Deterministic realization of `seq`: starting from the empty graph, the
/// node with the largest residual degree k is joined to the k nodes with the
/// next largest residuals, until every residual is zero. Ties go to the lower
/// node id. Node i receives degree seq[i].
///
/// Throws config_error if `seq` is not graphical.
graph build_raman(const degree_sequence& seq);

struct bks_options {
    std::size_t max_retries = 100;
};

struct bks_result {
    graph g;
    std::size_t attempts = 0;  // 1 when the first attempt succeeded
    /// Set when max(D)^2 / (2 sum D) > 1/2, i.e. outside the regime where the
    /// procedure is known to be close to uniform. Advisory only.
    bool outside_applicability = false;
};

/// Randomized sequential construction: each step adds an edge between a
/// non-adjacent pair {i, j} of nodes with positive residuals, chosen with
/// probability proportional to
///     R_i R_j (1 - D_i D_j / (2 sum D)).
/// A stuck state (residuals left, no eligible pair) restarts from the empty
/// graph, up to `max_retries` restarts.
///
/// Throws config_error if `seq` is not graphical or if some pair would get a
/// negative weight, compute_error when retries are exhausted.
bks_result build_bks(const degree_sequence& seq, rng& gen, const bks_options& opts = {});

/// Pearson correlation of endpoint degrees over both orientations of every
/// edge. nullopt when undefined (no edges, or zero variance).
std::optional<double> degree_assortativity(const graph& g);

}  // namespace rdslab
