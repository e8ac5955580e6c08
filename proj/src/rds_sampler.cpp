#include "rdslab/rds_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <fmt/core.h>

#include "rdslab/errors.hpp"

namespace rdslab {

recruitment_distribution::recruitment_distribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
    if (probs_.empty()) throw config_error("recruitment distribution is empty");
    double sum = 0.0;
    for (double q : probs_) {
        if (!(q >= 0.0) || !std::isfinite(q))
            throw config_error(fmt::format("recruitment probability {} is not a non-negative number", q));
        sum += q;
        cumulative_.push_back(sum);
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw config_error(fmt::format("recruitment probabilities sum to {:.17g}, not 1", sum));
}

recruitment_distribution recruitment_distribution::observed_default() {
    return recruitment_distribution({0.5898, 0.1555, 0.1019, 0.0965, 0.0349, 0.0134, 0.008});
}

std::size_t recruitment_distribution::draw(rng& gen) const noexcept {
    // Scale by the actual total so rounding in the sum never leaves a gap.
    const double u = gen.unit() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), probs_.size() - 1);
}

double recruitment_distribution::mean() const noexcept {
    double m = 0.0;
    for (std::size_t k = 0; k < probs_.size(); ++k) m += static_cast<double>(k) * probs_[k];
    return m;
}

namespace {

// Set of node ids with O(1) insert, erase, and uniform pick.
class indexed_set {
public:
    explicit indexed_set(std::size_t universe) : pos_(universe, kAbsent) {}

    void insert(node_id v) {
        pos_[v] = items_.size();
        items_.push_back(v);
    }
    void erase(node_id v) {
        const std::size_t at = pos_[v];
        const node_id last = items_.back();
        items_[at] = last;
        pos_[last] = at;
        items_.pop_back();
        pos_[v] = kAbsent;
    }
    bool empty() const noexcept { return items_.empty(); }
    node_id pick(rng& gen) const { return items_[gen.below(items_.size())]; }

private:
    static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
    std::vector<std::size_t> pos_;
    std::vector<node_id> items_;
};

}  // namespace

rds_sample draw_sample(const graph& g, std::size_t n, const recruitment_distribution& p, rng& gen) {
    const std::size_t N = g.node_count();
    if (n < 1) throw config_error("sample size must be >= 1");
    if (n > N) throw config_error(fmt::format("sample size {} exceeds population {}", n, N));

    rds_sample out;
    out.population = N;
    out.records.reserve(n);

    std::vector<std::uint8_t> in_sample(N, 0);
    std::vector<std::uint32_t> wave(N, 0);
    indexed_set unsampled(N);
    for (node_id v = 0; v < N; ++v) unsampled.insert(v);
    indexed_set active(N);
    std::vector<node_id> available;

    const auto admit = [&](node_id v, node_id recruiter, std::uint32_t w) {
        in_sample[v] = 1;
        wave[v] = w;
        unsampled.erase(v);
        active.insert(v);
        out.records.push_back({out.records.size(), v, static_cast<std::uint32_t>(g.degree(v)), recruiter, w});
    };

    while (out.records.size() < n) {
        if (active.empty()) {
            admit(unsampled.pick(gen), kNoRecruiter, 0);
            continue;
        }
        const node_id recruiter = active.pick(gen);
        available.clear();
        for (node_id v : g.neighbors(recruiter))
            if (!in_sample[v]) available.push_back(v);
        const std::size_t wanted = p.draw(gen);
        const std::size_t quota = n - out.records.size();
        const std::size_t k = std::min({available.size(), wanted, quota});
        gen.partial_shuffle(std::span<node_id>(available), k);
        for (std::size_t i = 0; i < k; ++i) admit(available[i], recruiter, wave[recruiter] + 1);
        active.erase(recruiter);
    }
    return out;
}

std::vector<std::uint8_t> sample_membership(const rds_sample& s) {
    std::vector<std::uint8_t> out(s.population, 0);
    for (const auto& r : s.records) out[r.node] = 1;
    return out;
}

std::string validate_trace(const graph& g, const rds_sample& s) {
    const std::size_t N = g.node_count();
    if (s.population != N) return fmt::format("trace population {} != graph size {}", s.population, N);
    std::vector<std::uint8_t> seen(N, 0), recruited_already(N, 0);
    std::vector<std::uint32_t> wave(N, 0);
    node_id current_recruiter = kNoRecruiter;
    for (std::size_t i = 0; i < s.records.size(); ++i) {
        const auto& r = s.records[i];
        if (r.order != i) return fmt::format("record {} has order {}", i, r.order);
        if (r.node >= N) return fmt::format("record {} node {} out of range", i, r.node);
        if (seen[r.node]) return fmt::format("node {} sampled twice", r.node);
        if (r.degree != g.degree(r.node)) return fmt::format("node {} reported degree {} != {}", r.node, r.degree, g.degree(r.node));
        if (r.is_seed()) {
            if (r.wave != 0) return fmt::format("seed {} has wave {}", r.node, r.wave);
            if (current_recruiter != kNoRecruiter) recruited_already[current_recruiter] = 1;
            current_recruiter = kNoRecruiter;
        } else {
            if (r.recruiter >= N || !seen[r.recruiter])
                return fmt::format("recruiter of {} not sampled before it", r.node);
            if (!g.has_edge(r.node, r.recruiter))
                return fmt::format("recruiter {} not adjacent to {}", r.recruiter, r.node);
            if (r.wave != wave[r.recruiter] + 1) return fmt::format("node {} has wave {}", r.node, r.wave);
            // A recruiter's batch is contiguous; once another batch starts it is spent.
            if (r.recruiter != current_recruiter) {
                if (current_recruiter != kNoRecruiter) recruited_already[current_recruiter] = 1;
                if (recruited_already[r.recruiter])
                    return fmt::format("recruiter {} acted twice", r.recruiter);
                current_recruiter = r.recruiter;
            }
        }
        seen[r.node] = 1;
        wave[r.node] = r.wave;
    }
    return {};
}

std::string trace_csv(const rds_sample& s) {
    std::string out = "order,node,degree,recruiter,wave\n";
    for (const auto& r : s.records) {
        if (r.is_seed())
            out += fmt::format("{},{},{},,{}\n", r.order, r.node, r.degree, r.wave);
        else
            out += fmt::format("{},{},{},{},{}\n", r.order, r.node, r.degree, r.recruiter, r.wave);
    }
    return out;
}

void write_trace_csv(const rds_sample& s, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw io_error(fmt::format("cannot write '{}'", path.string()));
    out << trace_csv(s);
    if (!out) throw io_error(fmt::format("write failure on '{}'", path.string()));
}

}  // namespace rdslab
