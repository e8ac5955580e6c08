#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rdslab/graph.hpp"
#include "rdslab/rds_sampler.hpp"

namespace rdslab {

/// Study variable y over the whole population and its true mean.
class outcome_assignment {
public:
    explicit outcome_assignment(std::vector<double> y);

    std::span<const double> y() const noexcept { return y_; }
    double operator[](node_id i) const { return y_[i]; }
    double mu() const noexcept { return mu_; }
    std::size_t size() const noexcept { return y_.size(); }

private:
    std::vector<double> y_;
    double mu_ = 0.0;
};

/// Per-node inclusion probabilities (or any positive proxy) handed to the
/// weighted estimators. Only the ratios matter.
struct weight_oracle {
    std::string name;
    std::vector<double> pi;
};

/// (sum y_i / pi_i) / (sum 1 / pi_i) over the sampled nodes. Throws
/// config_error naming the node when pi is missing, non-positive, or NaN.
double horvitz_thompson(const rds_sample& sample, const outcome_assignment& y, const weight_oracle& w);

/// Horvitz-Thompson with pi_i taken as the reported degree. Throws
/// config_error on a sampled node of degree 0.
double rds_two(const rds_sample& sample, const outcome_assignment& y);

double naive_mean(const rds_sample& sample, const outcome_assignment& y);

struct bernoulli_independent {
    double q = 0.5;
};
/// y_i ~ Bernoulli(logistic(a + b log d_i)); isolated nodes use logistic(a).
struct degree_logistic {
    double a = 0.0;
    double b = 0.0;
};
using outcome_model = std::variant<bernoulli_independent, degree_logistic>;

outcome_assignment synth_outcomes(const graph& g, const outcome_model& model, rng& gen);

struct bias_row {
    std::string estimator;
    std::string oracle;
    double mean = 0.0;
    double bias = 0.0;
    double stderr_ = 0.0;  // Monte Carlo standard error of `mean`
    double rmse = 0.0;
};

struct bias_options {
    std::size_t workers = 1;
};

/// Over R fresh samples (replication r uses rng::for_replication(master_seed, r)):
/// naive_mean, rds_two, and horvitz_thompson once per oracle. Rows in that
/// order. Deterministic for any worker count.
std::vector<bias_row> bias_report(const graph& g, std::size_t n, const recruitment_distribution& p,
                                  const outcome_assignment& y, std::span<const weight_oracle> oracles,
                                  std::size_t replications, std::uint64_t master_seed,
                                  const bias_options& opts = {});

/// CSV "estimator,oracle,mean,bias,stderr,rmse".
std::string bias_csv(std::span<const bias_row> rows);
void write_bias_csv(std::span<const bias_row> rows, const std::filesystem::path& path);

}  // namespace rdslab
