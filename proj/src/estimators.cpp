#include "rdslab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <numeric>
#include <thread>

#include <fmt/core.h>

#include "rdslab/errors.hpp"

namespace rdslab {

outcome_assignment::outcome_assignment(std::vector<double> y) : y_(std::move(y)) {
    if (y_.empty()) throw config_error("outcome assignment is empty");
    mu_ = std::accumulate(y_.begin(), y_.end(), 0.0) / static_cast<double>(y_.size());
}

namespace {

void require_matching(const rds_sample& sample, const outcome_assignment& y) {
    if (sample.records.empty()) throw config_error("estimator called on an empty sample");
    if (y.size() != sample.population)
        throw config_error(fmt::format("outcomes cover {} nodes, population is {}", y.size(), sample.population));
}

template <class WeightOf>
double ratio_estimate(const rds_sample& sample, const outcome_assignment& y, WeightOf&& pi_of) {
    double num = 0.0, den = 0.0;
    for (const auto& r : sample.records) {
        const double inv = 1.0 / pi_of(r);
        num += y[r.node] * inv;
        den += inv;
    }
    return num / den;
}

}  // namespace

double horvitz_thompson(const rds_sample& sample, const outcome_assignment& y, const weight_oracle& w) {
    require_matching(sample, y);
    return ratio_estimate(sample, y, [&](const recruitment_record& r) {
        if (r.node >= w.pi.size())
            throw config_error(fmt::format("oracle '{}' has no weight for node {}", w.name, r.node));
        const double pi = w.pi[r.node];
        if (!(pi > 0.0) || !std::isfinite(pi))
            throw config_error(fmt::format("oracle '{}' gives node {} weight {}", w.name, r.node, pi));
        return pi;
    });
}

double rds_two(const rds_sample& sample, const outcome_assignment& y) {
    require_matching(sample, y);
    return ratio_estimate(sample, y, [](const recruitment_record& r) {
        if (r.degree == 0) throw config_error(fmt::format("sampled node {} reports degree 0", r.node));
        return static_cast<double>(r.degree);
    });
}

double naive_mean(const rds_sample& sample, const outcome_assignment& y) {
    require_matching(sample, y);
    double sum = 0.0;
    for (const auto& r : sample.records) sum += y[r.node];
    return sum / static_cast<double>(sample.records.size());
}

outcome_assignment synth_outcomes(const graph& g, const outcome_model& model, rng& gen) {
    const std::size_t N = g.node_count();
    if (N == 0) throw config_error("graph has no nodes");
    std::vector<double> y(N);
    if (const auto* b = std::get_if<bernoulli_independent>(&model)) {
        if (!(b->q >= 0.0 && b->q <= 1.0)) throw config_error(fmt::format("q = {} is not in [0, 1]", b->q));
        for (auto& v : y) v = gen.bernoulli(b->q) ? 1.0 : 0.0;
    } else {
        const auto& m = std::get<degree_logistic>(model);
        for (node_id i = 0; i < N; ++i) {
            const double d = static_cast<double>(g.degree(i));
            const double eta = m.a + (d > 0 ? m.b * std::log(d) : 0.0);
            y[i] = gen.bernoulli(1.0 / (1.0 + std::exp(-eta))) ? 1.0 : 0.0;
        }
    }
    return outcome_assignment(std::move(y));
}

std::vector<bias_row> bias_report(const graph& g, std::size_t n, const recruitment_distribution& p,
                                  const outcome_assignment& y, std::span<const weight_oracle> oracles,
                                  std::size_t replications, std::uint64_t master_seed,
                                  const bias_options& opts) {
    if (replications == 0) throw config_error("replication count must be >= 1");
    if (y.size() != g.node_count()) throw config_error("outcomes do not match the graph");
    const std::size_t columns = 2 + oracles.size();

    // estimates[r * columns + c]; reduced in replication order afterwards so
    // the floating-point sums are independent of scheduling.
    std::vector<double> estimates(replications * columns);
    std::size_t workers = opts.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.workers;
    workers = std::min(workers, replications);
    std::vector<std::exception_ptr> failures(workers);

    const auto run = [&](std::size_t w) {
        try {
            for (std::size_t r = w; r < replications; r += workers) {
                rng gen = rng::for_replication(master_seed, r);
                const auto s = draw_sample(g, n, p, gen);
                double* row = &estimates[r * columns];
                row[0] = naive_mean(s, y);
                row[1] = rds_two(s, y);
                for (std::size_t o = 0; o < oracles.size(); ++o) row[2 + o] = horvitz_thompson(s, y, oracles[o]);
            }
        } catch (...) {
            failures[w] = std::current_exception();
        }
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run, w);
        run(0);
    }
    for (auto& f : failures)
        if (f) std::rethrow_exception(f);

    std::vector<bias_row> rows;
    const auto R = static_cast<double>(replications);
    for (std::size_t c = 0; c < columns; ++c) {
        bias_row row;
        if (c == 0) row = {"naive_mean", "none"};
        else if (c == 1) row = {"rds_ii", "degree"};
        else row = {"horvitz_thompson", oracles[c - 2].name};
        double sum = 0.0, sq_err = 0.0;
        for (std::size_t r = 0; r < replications; ++r) {
            const double e = estimates[r * columns + c];
            sum += e;
            sq_err += (e - y.mu()) * (e - y.mu());
        }
        row.mean = sum / R;
        row.bias = row.mean - y.mu();
        double ss = 0.0;
        for (std::size_t r = 0; r < replications; ++r) {
            const double d = estimates[r * columns + c] - row.mean;
            ss += d * d;
        }
        row.stderr_ = replications > 1 ? std::sqrt(ss / (R - 1.0) / R) : 0.0;
        row.rmse = std::sqrt(sq_err / R);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string bias_csv(std::span<const bias_row> rows) {
    std::string out = "estimator,oracle,mean,bias,stderr,rmse\n";
    for (const auto& r : rows)
        out += fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.estimator, r.oracle, r.mean, r.bias,
                           r.stderr_, r.rmse);
    return out;
}

void write_bias_csv(std::span<const bias_row> rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw io_error(fmt::format("cannot write '{}'", path.string()));
    out << bias_csv(rows);
    if (!out) throw io_error(fmt::format("write failure on '{}'", path.string()));
}

}  // namespace rdslab
