#include "rdslab/inclusion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>

#include <fmt/core.h>

#include "rdslab/errors.hpp"

namespace rdslab {

double inclusion_estimate::stderr_of(node_id i) const {
    const double p = pi_hat(i);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(replications));
}

std::vector<double> inclusion_estimate::pi_hats() const {
    std::vector<double> out(counts.size());
    for (node_id i = 0; i < counts.size(); ++i) out[i] = pi_hat(i);
    return out;
}

bool inclusion_estimate::counts_balance() const {
    const auto total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    return total == static_cast<std::uint64_t>(sample_size) * replications;
}

inclusion_estimate estimate_inclusion(const graph& g, std::size_t n, const recruitment_distribution& p,
                                      std::size_t replications, std::uint64_t master_seed,
                                      const inclusion_options& opts) {
    if (replications == 0) throw config_error("replication count must be >= 1");
    if (n < 1 || n > g.node_count())
        throw config_error(fmt::format("sample size {} outside [1, {}]", n, g.node_count()));

    std::size_t workers = opts.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.workers;
    workers = std::min(workers, replications);

    const std::size_t N = g.node_count();
    std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(N, 0));
    std::vector<std::exception_ptr> failures(workers);

    const auto run_range = [&](std::size_t w, std::size_t first, std::size_t last) {
        try {
            auto& tally = partial[w];
            for (std::size_t r = first; r < last; ++r) {
                rng gen = rng::for_replication(master_seed, r);
                for (const auto& rec : draw_sample(g, n, p, gen).records) ++tally[rec.node];
            }
        } catch (...) {
            failures[w] = std::current_exception();
        }
    };

    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = replications / workers, extra = replications % workers;
        std::size_t first = 0;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t last = first + chunk + (w < extra ? 1 : 0);
            if (w + 1 == workers) run_range(w, first, last);
            else pool.emplace_back(run_range, w, first, last);
            first = last;
        }
    }
    for (auto& f : failures)
        if (f) std::rethrow_exception(f);

    inclusion_estimate est;
    est.counts.assign(N, 0);
    est.replications = replications;
    est.sample_size = n;
    for (const auto& tally : partial)
        for (std::size_t i = 0; i < N; ++i) est.counts[i] += tally[i];
    return est;
}

loglog_fit fit_loglog(std::span<const double> pi_hat, std::span<const std::uint32_t> degrees) {
    if (pi_hat.size() != degrees.size())
        throw config_error(fmt::format("{} estimates for {} degrees", pi_hat.size(), degrees.size()));
    loglog_fit fit;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < pi_hat.size(); ++i) {
        if (pi_hat[i] > 0.0 && degrees[i] > 0) {
            xs.push_back(std::log(static_cast<double>(degrees[i])));
            ys.push_back(std::log(pi_hat[i]));
        } else {
            ++fit.excluded;
        }
    }
    fit.used = xs.size();
    if (fit.used < 2) throw compute_error(fmt::format("log-log fit needs 2 usable nodes, have {}", fit.used));

    const double k = static_cast<double>(fit.used);
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / k;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / k;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx <= 0.0) throw compute_error("log-log fit: all usable nodes have the same degree");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

loglog_fit loglog_slope(const inclusion_estimate& est, const degree_sequence& degrees) {
    const std::vector<std::uint32_t> d(degrees.begin(), degrees.end());
    return fit_loglog(est.pi_hats(), d);
}

void write_inclusion_csv(const inclusion_estimate& est, std::span<const std::uint32_t> degrees,
                         const std::filesystem::path& path) {
    if (degrees.size() != est.counts.size())
        throw config_error("degree vector does not match the estimate's node count");
    std::ofstream out(path);
    if (!out) throw io_error(fmt::format("cannot write '{}'", path.string()));
    out << "node,degree,count,pi_hat,stderr\n";
    for (node_id i = 0; i < est.counts.size(); ++i)
        out << fmt::format("{},{},{},{:.17g},{:.17g}\n", i, degrees[i], est.counts[i], est.pi_hat(i),
                           est.stderr_of(i));
    if (!out) throw io_error(fmt::format("write failure on '{}'", path.string()));
}

std::vector<double> read_inclusion_pi(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error(fmt::format("cannot open '{}'", path.string()));
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line) || line.rfind("node,degree,count,pi_hat,stderr", 0) != 0)
        throw parse_error("missing inclusion CSV header", lineno);
    std::vector<double> pi;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream row(line);
        for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
        if (cells.size() != 5) throw parse_error("expected 5 columns", lineno);
        try {
            const auto node = std::stoull(cells[0]);
            if (node != pi.size()) throw parse_error(fmt::format("expected node {}", pi.size()), lineno);
            pi.push_back(std::stod(cells[3]));
        } catch (const std::logic_error&) {
            throw parse_error(fmt::format("malformed row '{}'", line), lineno);
        }
    }
    return pi;
}

}  // namespace rdslab
