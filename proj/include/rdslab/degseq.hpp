#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rdslab/rng.hpp"

namespace rdslab {

using degree_t = std::uint32_t;

/// Target degrees D_1 >= ... >= D_N of a population network.
///
/// Every entry is < N, since no simple graph on N nodes can realize a
/// larger degree. Zero degrees (isolated nodes) are allowed.
class degree_sequence {
public:
    degree_sequence() = default;

    /// Validates the invariants. Throws config_error if the input is not
    /// sorted non-increasing or has an entry >= N.
    explicit degree_sequence(std::vector<degree_t> degrees);

    /// Sorts first, then validates the upper bound.
    static degree_sequence from_unsorted(std::vector<degree_t> degrees);

    std::size_t size() const noexcept { return degrees_.size(); }
    bool empty() const noexcept { return degrees_.empty(); }
    degree_t operator[](std::size_t i) const { return degrees_[i]; }
    std::span<const degree_t> values() const noexcept { return degrees_; }
    std::uint64_t total() const noexcept;
    degree_t max() const noexcept { return degrees_.empty() ? 0 : degrees_.front(); }

    auto begin() const noexcept { return degrees_.begin(); }
    auto end() const noexcept { return degrees_.end(); }

    friend bool operator==(const degree_sequence&, const degree_sequence&) = default;

private:
    std::vector<degree_t> degrees_;
};

/// Empirical pool of positive degrees to resample from (self-reports, or a
/// synthetic stand-in).
class degree_source {
public:
    /// Throws config_error when empty or when any value is < 1.
    explicit degree_source(std::vector<degree_t> values);

    std::span<const degree_t> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    std::vector<degree_t> values_;
};

/// Reads one integer per line. Blank lines and lines starting with '#' are
/// skipped. Throws io_error / parse_error (with line number).
degree_source load_degree_source(const std::filesystem::path& path);

/// Draws N values uniformly with replacement from the pool and sorts them
/// non-increasing. Throws compute_error if a draw is >= N.
degree_sequence resample_degrees(const degree_source& source, std::size_t n_nodes, rng& gen);

/// Parameters of the synthetic right-skewed pool: values 1 + floor(Exp(mean)),
/// redrawn while above `cap`.
struct synthetic_pool_spec {
    std::size_t pool_size = 373;
    double mean = 4.0;
    degree_t cap = 50;
};

/// SYNTHETIC degree pool; a stand-in when no empirical degrees are available.
degree_source synthetic_degree_source(const synthetic_pool_spec& spec, rng& gen);

/// Outcome of the graphicality test. `failing_k` is the first k (1-based) at
/// which sum_{i<=k} max(D_i - k + 1, 0) <= sum_{i>k} D_i is violated.
struct graphicality {
    bool graphical = false;
    bool even_sum = false;
    std::optional<std::size_t> failing_k;

    std::string describe() const;
};

graphicality check_graphical(const degree_sequence& seq);

inline bool is_graphical(const degree_sequence& seq) { return check_graphical(seq).graphical; }

/// One value per line, non-increasing.
void write_degree_sequence(const degree_sequence& seq, const std::filesystem::path& path);

/// Reads a degree file in the same format as degree sources (zeros allowed)
/// and sorts it.
degree_sequence read_degree_sequence(const std::filesystem::path& path);

}  // namespace rdslab
