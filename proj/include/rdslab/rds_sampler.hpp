#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rdslab/graph.hpp"
#include "rdslab/rng.hpp"

namespace rdslab {

/// Probabilities p_0, ..., p_K that a recruiter tries to bring in 0, ..., K
/// peers. Non-negative, summing to 1 within 1e-12.
class recruitment_distribution {
public:
    explicit recruitment_distribution(std::vector<double> probs);

    /// Recruitment proportions observed in the St. Petersburg IDU study
    /// (373 respondents): 0 recruits 58.98%, 1: 15.55%, 2: 10.19%, 3: 9.65%,
    /// 4: 3.49%, 5: 1.34%, 6: 0.80%.
    static recruitment_distribution observed_default();

    std::span<const double> probs() const noexcept { return probs_; }
    std::size_t draw(rng& gen) const noexcept;
    double mean() const noexcept;

private:
    std::vector<double> probs_;
    std::vector<double> cumulative_;
};

inline constexpr node_id kNoRecruiter = std::numeric_limits<node_id>::max();

struct recruitment_record {
    std::size_t order = 0;
    node_id node = 0;
    std::uint32_t degree = 0;
    node_id recruiter = kNoRecruiter;  // kNoRecruiter for seeds
    std::uint32_t wave = 0;

    bool is_seed() const noexcept { return recruiter == kNoRecruiter; }
    friend bool operator==(const recruitment_record&, const recruitment_record&) = default;
};

/// Ordered recruitment trace of one sample.
struct rds_sample {
    std::size_t population = 0;  // N of the graph it was drawn from
    std::vector<recruitment_record> records;

    std::size_t size() const noexcept { return records.size(); }
    friend bool operator==(const rds_sample&, const rds_sample&) = default;
};

/// One realization of the chain-referral model on `g`:
///
///   active <- {}
///   until the sample has n nodes:
///     if active is empty: a seed drawn uniformly from the unsampled nodes
///       joins the sample and active
///     else: a recruiter r drawn uniformly from active; available = its
///       unsampled neighbors; s2 ~ p; min(|available|, s2) of them, a
///       uniform subset in uniform order, join the sample and active
///       (cut at the remaining quota); r leaves active.
///
/// Throws config_error unless 1 <= n <= N.
rds_sample draw_sample(const graph& g, std::size_t n, const recruitment_distribution& p, rng& gen);

/// Indicator vector of length N.
std::vector<std::uint8_t> sample_membership(const rds_sample& s);

/// Replays a trace against `g` and checks every invariant: distinct nodes,
/// honest degrees, recruiters earlier and adjacent, waves, draw order, and
/// that each recruiter acted at most once. Returns an empty string when
/// valid, otherwise the first violation.
std::string validate_trace(const graph& g, const rds_sample& s);

/// CSV "order,node,degree,recruiter,wave"; recruiter empty for seeds.
void write_trace_csv(const rds_sample& s, const std::filesystem::path& path);
std::string trace_csv(const rds_sample& s);

}  // namespace rdslab
