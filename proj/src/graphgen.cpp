#include "rdslab/graphgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include <fmt/core.h>

#include "rdslab/errors.hpp"

namespace rdslab {

namespace {

void require_graphical(const degree_sequence& seq) {
    if (const auto verdict = check_graphical(seq); !verdict.graphical)
        throw config_error("degree sequence is " + verdict.describe());
}

// Fenwick tree over non-negative integer weights; samples an index with
// probability weight / total.
class weight_tree {
public:
    explicit weight_tree(std::span<const degree_t> weights) : tree_(weights.size() + 1, 0) {
        for (std::size_t i = 0; i < weights.size(); ++i) add(i, weights[i]);
        top_bit_ = 1;
        while (top_bit_ * 2 <= weights.size()) top_bit_ *= 2;
    }

    void add(std::size_t i, std::int64_t delta) {
        total_ += delta;
        for (std::size_t k = i + 1; k < tree_.size(); k += k & (~k + 1)) tree_[k] += delta;
    }

    std::int64_t total() const { return total_; }

    // Smallest index whose prefix sum exceeds `target`, target in [0, total).
    std::size_t find(std::int64_t target) const {
        std::size_t pos = 0;
        for (std::size_t step = top_bit_; step > 0; step /= 2) {
            const std::size_t next = pos + step;
            if (next < tree_.size() && tree_[next] <= target) {
                pos = next;
                target -= tree_[next];
            }
        }
        return pos;
    }

    std::size_t sample(rng& gen) const {
        return find(static_cast<std::int64_t>(gen.below(static_cast<std::uint64_t>(total_))));
    }

private:
    std::vector<std::int64_t> tree_;
    std::int64_t total_ = 0;
    std::size_t top_bit_ = 1;
};

std::uint64_t pair_key(std::size_t u, std::size_t v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(u) << 32) | v;
}

enum class attempt_status { done, stuck };

// Number of consecutive rejections before one exact enumeration step.
constexpr std::size_t kRejectionStreak = 64;
// Largest positive-residual node count for which the exact step enumerates pairs.
constexpr std::size_t kExactPairBudget = 4'000'000;

class bks_attempt {
public:
    bks_attempt(const degree_sequence& seq, rng& gen)
        : seq_(seq), gen_(gen), residual_(seq.begin(), seq.end()), tree_(residual_),
          two_total_(2.0 * static_cast<double>(seq.total())) {}

    attempt_status run() {
        std::size_t streak = 0;
        while (tree_.total() > 0) {
            if (streak < kRejectionStreak) {
                if (try_rejection_step()) streak = 0;
                else ++streak;
                continue;
            }
            streak = 0;
            const auto step = exact_step();
            if (step == exact_outcome::stuck) return attempt_status::stuck;
        }
        return attempt_status::done;
    }

    std::vector<edge> take_edges() { return std::move(edges_); }

private:
    enum class exact_outcome { added, stuck, skipped };

    double factor(std::size_t i, std::size_t j) const {
        return 1.0 - static_cast<double>(seq_[i]) * static_cast<double>(seq_[j]) / two_total_;
    }

    bool eligible(std::size_t i, std::size_t j) const {
        return i != j && residual_[i] > 0 && residual_[j] > 0 && !adjacent_.contains(pair_key(i, j));
    }

    // Ordered draws i, j each proportional to R give the unordered pair
    // probability 2 R_i R_j / S^2, proportional to R_i R_j; the acceptance
    // test then applies the degree factor.
    bool try_rejection_step() {
        const std::size_t i = tree_.sample(gen_);
        const std::size_t j = tree_.sample(gen_);
        if (!eligible(i, j)) return false;
        if (!(gen_.unit() < factor(i, j))) return false;
        add_edge(i, j);
        return true;
    }

    exact_outcome exact_step() {
        std::vector<std::size_t> live;
        for (std::size_t i = 0; i < residual_.size(); ++i)
            if (residual_[i] > 0) live.push_back(i);
        if (live.size() > 1 && live.size() * (live.size() - 1) / 2 > kExactPairBudget)
            return exact_outcome::skipped;

        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        std::vector<double> cumulative;
        double total = 0.0;
        for (std::size_t a = 0; a < live.size(); ++a)
            for (std::size_t b = a + 1; b < live.size(); ++b) {
                const std::size_t i = live[a], j = live[b];
                if (adjacent_.contains(pair_key(i, j))) continue;
                const double w = static_cast<double>(residual_[i]) * residual_[j] * factor(i, j);
                if (w <= 0.0) continue;
                total += w;
                pairs.emplace_back(i, j);
                cumulative.push_back(total);
            }
        if (pairs.empty()) return exact_outcome::stuck;
        const double u = gen_.unit() * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) --it;
        const auto& [i, j] = pairs[static_cast<std::size_t>(it - cumulative.begin())];
        add_edge(i, j);
        return exact_outcome::added;
    }

    void add_edge(std::size_t i, std::size_t j) {
        adjacent_.insert(pair_key(i, j));
        --residual_[i];
        --residual_[j];
        tree_.add(i, -1);
        tree_.add(j, -1);
        edges_.emplace_back(static_cast<node_id>(std::min(i, j)), static_cast<node_id>(std::max(i, j)));
    }

    const degree_sequence& seq_;
    rng& gen_;
    std::vector<degree_t> residual_;
    weight_tree tree_;
    double two_total_;
    std::unordered_set<std::uint64_t> adjacent_;
    std::vector<edge> edges_;
};

}  // namespace

graph build_raman(const degree_sequence& seq) {
    require_graphical(seq);
    const std::size_t n = seq.size();
    std::vector<degree_t> residual(seq.begin(), seq.end());

    // Nodes with positive residual, ordered by (residual desc, id asc).
    std::vector<node_id> order;
    order.reserve(n);
    for (node_id i = 0; i < n; ++i)
        if (residual[i] > 0) order.push_back(i);
    const auto before = [&](node_id a, node_id b) {
        return residual[a] != residual[b] ? residual[a] > residual[b] : a < b;
    };
    std::sort(order.begin(), order.end(), before);

    std::vector<edge> edges;
    edges.reserve(seq.total() / 2);
    while (!order.empty()) {
        const node_id hub = order.front();
        const std::size_t k = residual[hub];
        if (k >= order.size())
            throw std::logic_error(fmt::format("raman: node {} needs {} partners, {} available", hub, k,
                                               order.size() - 1));
        residual[hub] = 0;
        for (std::size_t t = 1; t <= k; ++t) {
            const node_id v = order[t];
            --residual[v];
            edges.emplace_back(std::min(hub, v), std::max(hub, v));
        }
        // order[1..k] and order[k+1..] are each still sorted; merge them and
        // drop the exhausted tail.
        order.erase(order.begin());
        std::inplace_merge(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                           before);
        while (!order.empty() && residual[order.back()] == 0) order.pop_back();
    }
    return graph(n, edges);
}

bks_result build_bks(const degree_sequence& seq, rng& gen, const bks_options& opts) {
    require_graphical(seq);
    const double two_total = 2.0 * static_cast<double>(seq.total());
    bks_result result;
    if (seq.size() >= 2 && seq[1] > 0) {
        const double worst = static_cast<double>(seq[0]) * seq[1] / two_total;
        if (worst > 1.0)
            throw config_error(fmt::format(
                "degrees {} and {} give a negative pair weight (sum of degrees {})", seq[0], seq[1],
                seq.total()));
        result.outside_applicability = static_cast<double>(seq[0]) * seq[0] / two_total > 0.5;
    }

    const std::size_t attempts_allowed = opts.max_retries + 1;
    for (std::size_t attempt = 1; attempt <= attempts_allowed; ++attempt) {
        bks_attempt run(seq, gen);
        if (run.run() == attempt_status::done) {
            const auto edges = run.take_edges();
            result.g = graph(seq.size(), edges);
            result.attempts = attempt;
            return result;
        }
    }
    throw compute_error(fmt::format("bks: no realization after {} attempts", attempts_allowed));
}

std::optional<double> degree_assortativity(const graph& g) {
    if (g.edge_count() == 0) return std::nullopt;
    // Both orientations make the two marginals identical, so the correlation
    // reduces to (E[xy] - E[x]^2) / (E[x^2] - E[x]^2) over edge ends.
    double sum_x = 0, sum_xx = 0, sum_xy = 0;
    for (const auto& [u, v] : g.edges()) {
        const double du = static_cast<double>(g.degree(u));
        const double dv = static_cast<double>(g.degree(v));
        sum_x += du + dv;
        sum_xx += du * du + dv * dv;
        sum_xy += 2 * du * dv;
    }
    const double m2 = 2.0 * static_cast<double>(g.edge_count());
    const double mean = sum_x / m2;
    const double var = sum_xx / m2 - mean * mean;
    const double cov = sum_xy / m2 - mean * mean;
    if (!(var > 1e-12 * std::max(1.0, sum_xx / m2))) return std::nullopt;
    return std::clamp(cov / var, -1.0, 1.0);
}

}  // namespace rdslab
