#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "rdslab/degseq.hpp"
#include "rdslab/graph.hpp"
#include "rdslab/inclusion.hpp"

namespace rdslab {

/// Full pipeline configuration. Defaults reproduce the published setup:
/// N = 5000 nodes, samples of n = 373, R = 10000 replications, and the
/// observed recruitment proportions.
struct experiment_config {
    /// Path to a degree-source file; empty means the synthetic pool.
    std::string degree_source;
    synthetic_pool_spec synthetic;
    std::size_t N = 5000;
    std::size_t n = 373;
    std::size_t R = 10000;
    std::vector<double> probs{0.5898, 0.1555, 0.1019, 0.0965, 0.0349, 0.0134, 0.008};
    std::uint64_t master_seed = 20111;
    std::vector<std::string> builders{"raman", "bks"};
    std::size_t max_retries = 100;
    std::string output_dir = "rdslab-out";
    /// Not echoed: must not influence any output.
    std::size_t workers = 1;

    /// Throws config_error on any broken invariant (n > N, probs not
    /// summing to 1, unknown builder, ...).
    void validate() const;
    /// Multiplies N, n and R by `factor`, rounding, keeping each >= 1.
    void scale(double factor);
};

nlohmann::json to_json(const experiment_config& cfg);
/// Overlays the fields present in `j` onto `cfg`. Unknown keys are an error.
void apply_json(experiment_config& cfg, const nlohmann::json& j);
nlohmann::json read_config_json(const std::filesystem::path& path);
experiment_config load_config(const std::filesystem::path& path);

/// Stream seeds used by the pipeline stages, all derived from master_seed.
struct stage_seeds {
    std::uint64_t degrees;
    std::uint64_t bks;
    std::uint64_t inclusion_raman;
    std::uint64_t inclusion_bks;
};
stage_seeds derive_stage_seeds(std::uint64_t master_seed);

/// Resamples from `source` until the sequence is graphical (or
/// `max_attempts` draws fail). Returns the sequence and the draw count.
std::pair<degree_sequence, std::size_t> resample_graphical(const degree_source& source, std::size_t N,
                                                            rng& gen, std::size_t max_attempts = 1000);

struct graph_summary {
    std::string builder;
    graph g;
    std::size_t attempts = 1;
    std::optional<double> assortativity;
    inclusion_estimate inclusion;
    loglog_fit fit;
};

struct experiment_result {
    experiment_config config;
    degree_sequence degrees;
    std::size_t resample_draws = 0;
    std::vector<graph_summary> graphs;
    nlohmann::json summary;
};

/// Runs degrees -> graphs -> inclusion -> fits and writes into
/// cfg.output_dir: config.json, degrees.txt, graph_<b>.edges,
/// inclusion_<b>.csv, scatter.csv, figure.svg, summary.json. A marker file
/// INCOMPLETE exists while the run is in progress and is left behind (with a
/// stage-named error inside) if a stage fails; the error is rethrown as
/// stage_error.
experiment_result run_experiment(const experiment_config& cfg);

class stage_error : public std::runtime_error {
public:
    stage_error(std::string stage, const std::string& what, std::exception_ptr cause)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), cause_(std::move(cause)) {}
    const std::string& stage() const noexcept { return stage_; }
    std::exception_ptr cause() const noexcept { return cause_; }

private:
    std::string stage_;
    std::exception_ptr cause_;
};

/// Side-by-side scatter of pi_hat against degree, identical axes per panel.
std::string scatter_svg(const std::vector<graph_summary>& graphs, std::span<const std::uint32_t> degrees);

}  // namespace rdslab
