#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rdslab/degseq.hpp"
#include "rdslab/graph.hpp"
#include "rdslab/rds_sampler.hpp"

namespace rdslab {

/// Monte Carlo inclusion frequencies over R replications of draw_sample.
struct inclusion_estimate {
    std::vector<std::uint64_t> counts;  // per node
    std::size_t replications = 0;
    std::size_t sample_size = 0;

    double pi_hat(node_id i) const { return static_cast<double>(counts[i]) / static_cast<double>(replications); }
    /// sqrt(pi_hat (1 - pi_hat) / R)
    double stderr_of(node_id i) const;
    std::vector<double> pi_hats() const;
    /// Exact integer check of sum(counts) == n * R.
    bool counts_balance() const;
};

struct inclusion_options {
    std::size_t workers = 1;  // 0 = hardware concurrency
};

/// Replication r draws from rng::for_replication(master_seed, r). Tallies are
/// summed as integers, so the result does not depend on `workers`.
///
/// Throws config_error when R == 0 or when draw_sample would.
inclusion_estimate estimate_inclusion(const graph& g, std::size_t n, const recruitment_distribution& p,
                                      std::size_t replications, std::uint64_t master_seed,
                                      const inclusion_options& opts = {});

/// Ordinary least squares of log(pi_hat) on log(degree).
struct loglog_fit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t used = 0;
    std::size_t excluded = 0;  // nodes with pi_hat == 0 or degree == 0
};

/// `degrees[i]` is the degree of node i. Nodes with zero estimate or zero
/// degree are excluded (and counted), never imputed. Throws compute_error
/// with fewer than two usable points or no spread in degree.
loglog_fit fit_loglog(std::span<const double> pi_hat, std::span<const std::uint32_t> degrees);
loglog_fit loglog_slope(const inclusion_estimate& est, const degree_sequence& degrees);

/// CSV "node,degree,count,pi_hat,stderr", one row per node ascending.
void write_inclusion_csv(const inclusion_estimate& est, std::span<const std::uint32_t> degrees,
                         const std::filesystem::path& path);

/// Reads the pi_hat column of an inclusion CSV, indexed by node.
std::vector<double> read_inclusion_pi(const std::filesystem::path& path);

}  // namespace rdslab
