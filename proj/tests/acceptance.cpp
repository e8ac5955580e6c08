// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance               criteria 1-10 at desk scale
//   acceptance --full-scale  additionally criterion 7 at N=5000, n=373, R=10000

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "oracles.hpp"
#include "rdslab/errors.hpp"
#include "rdslab/estimators.hpp"
#include "rdslab/experiment.hpp"
#include "rdslab/graphgen.hpp"
#include "rdslab/inclusion.hpp"
#include "rdslab/rds_sampler.hpp"

using namespace rdslab;
namespace fs = std::filesystem;

namespace {

struct outcome {
    bool pass;
    std::string detail;
};

// Every inclusion run in the suite is checked against the counting identity.
std::size_t inclusion_runs = 0, unbalanced_runs = 0;

inclusion_estimate tracked_inclusion(const graph& g, std::size_t n, const recruitment_distribution& p,
                                     std::size_t R, std::uint64_t seed, std::size_t workers = 1) {
    auto est = estimate_inclusion(g, n, p, R, seed, {workers});
    ++inclusion_runs;
    if (!est.counts_balance()) ++unbalanced_runs;
    return est;
}

degree_sequence synthetic_graphical(std::size_t N, rng& gen) {
    return resample_graphical(synthetic_degree_source({}, gen), N, gen).first;
}

outcome graphicality_equivalence() {
    const auto start = std::chrono::steady_clock::now();
    std::size_t cases = 0, mismatches = 0;
    for (std::size_t n = 1; n <= 7; ++n) {
        const auto realizable = oracle::realizable_sequences(n);
        oracle::for_each_sequence(n, 6, [&](const std::vector<std::uint32_t>& d) {
            ++cases;
            const bool truth = realizable.contains(d);
            bool verdict = false;
            if (d.front() < n) verdict = is_graphical(degree_sequence(d));
            else {
                // Entries >= N are refused at construction: non-graphical by type.
                try {
                    degree_sequence seq(d);
                    verdict = is_graphical(seq);
                } catch (const config_error&) {
                    verdict = false;
                }
            }
            if (verdict != truth) ++mismatches;
        });
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {mismatches == 0 && secs < 120,
            fmt::format("{} sequences, {} mismatches, {:.1f}s (limit 120s)", cases, mismatches, secs)};
}

outcome constructor_exactness() {
    rng gen(2);
    int raman_exact = 0, bks_exact = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t N = 60 + gen.below(141);
        const auto seq = synthetic_graphical(N, gen);
        const auto exact = [&](const graph& g) {
            if (!validate(g).empty()) return false;
            for (node_id i = 0; i < N; ++i)
                if (g.degree(i) != seq[i]) return false;
            return true;
        };
        if (exact(build_raman(seq))) ++raman_exact;
        try {
            if (exact(build_bks(seq, gen, {100}).g)) ++bks_exact;
        } catch (const std::exception&) {
        }
    }
    return {raman_exact == 100 && bks_exact >= 95,
            fmt::format("raman exact {}/100, bks succeeded and exact {}/100 (need >= 95)", raman_exact, bks_exact)};
}

outcome bks_uniformity() {
    rng gen(3);
    std::map<std::vector<edge>, int> freq;
    for (int r = 0; r < 30000; ++r) ++freq[build_bks(degree_sequence({1, 1, 1, 1}), gen).g.edges()];
    bool ok = freq.size() == 3;
    std::string detail = "frequencies";
    for (const auto& [edges, count] : freq) {
        const double f = count / 30000.0;
        ok = ok && std::abs(f - 1.0 / 3) <= 0.02;
        detail += fmt::format(" {:.4f}", f);
    }
    return {ok, detail + " (target 1/3 +- 0.02)"};
}

outcome degenerate_model() {
    rng gen(4);
    const auto g = build_bks(synthetic_graphical(100, gen), gen).g;
    const auto est = tracked_inclusion(g, 20, recruitment_distribution({1.0}), 50000, 44);
    double worst = 0;
    for (node_id i = 0; i < 100; ++i) worst = std::max(worst, std::abs(est.pi_hat(i) - 0.2));
    return {worst <= 0.01, fmt::format("max |pi_hat - 0.20| = {:.4f} (limit 0.01)", worst)};
}

outcome complete_graph_symmetry() {
    std::vector<edge> e;
    for (node_id i = 0; i < 30; ++i)
        for (node_id j = i + 1; j < 30; ++j) e.emplace_back(i, j);
    const graph g(30, e);
    const auto est = tracked_inclusion(g, 10, recruitment_distribution::observed_default(), 20000, 55);
    double worst = 0;
    for (node_id i = 0; i < 30; ++i) worst = std::max(worst, std::abs(est.pi_hat(i) - 1.0 / 3));
    return {worst <= 0.02, fmt::format("max |pi_hat - 1/3| = {:.4f} (limit 0.02)", worst)};
}

struct figure_run {
    double raman = 0, bks = 0;
    double seconds = 0;
};

figure_run figure_slopes(std::size_t N, std::size_t n, std::size_t R, const std::string& dir) {
    experiment_config cfg;
    cfg.N = N;
    cfg.n = n;
    cfg.R = R;
    cfg.output_dir = (fs::temp_directory_path() / dir).string();
    fs::remove_all(cfg.output_dir);
    const auto start = std::chrono::steady_clock::now();
    const auto res = run_experiment(cfg);
    figure_run out;
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& g : res.graphs) {
        ++inclusion_runs;
        if (!g.inclusion.counts_balance()) ++unbalanced_runs;
        (g.builder == "raman" ? out.raman : out.bks) = g.fit.slope;
    }
    return out;
}

outcome figure_reproduction(std::size_t N, std::size_t n, std::size_t R, double time_limit) {
    const auto r = figure_slopes(N, n, R, fmt::format("rdslab_acceptance_{}", N));
    const bool raman_ok = r.raman >= 0.35 && r.raman <= 0.70;
    const bool bks_ok = r.bks >= 0.85 && r.bks <= 1.15;
    const bool gap_ok = r.bks - r.raman >= 0.25;
    return {raman_ok && bks_ok && gap_ok && r.seconds < time_limit,
            fmt::format("N={} n={} R={}: slope raman {:.3f} [0.35,0.70] {}, bks {:.3f} [0.85,1.15] {}, "
                        "gap {:.3f} (>= 0.25) {}, {:.1f}s",
                        N, n, R, r.raman, raman_ok ? "ok" : "OUT", r.bks, bks_ok ? "ok" : "OUT", r.bks - r.raman,
                        gap_ok ? "ok" : "OUT", r.seconds)};
}

outcome estimator_identities() {
    rng gen(8);
    const auto g = build_bks(synthetic_graphical(300, gen), gen).g;
    const auto p = recruitment_distribution::observed_default();
    weight_oracle degrees{"degree", {}};
    for (node_id i = 0; i < g.node_count(); ++i) degrees.pi.push_back(static_cast<double>(g.degree(i)));
    double worst_uniform = 0, worst_scale = 0;
    int rds_mismatch = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const auto s = draw_sample(g, 1 + gen.below(80), p, gen);
        std::vector<double> yv(g.node_count());
        for (auto& v : yv) v = gen.unit() * 4 - 1;
        const outcome_assignment y(yv);
        weight_oracle w{"w", std::vector<double>(g.node_count())};
        for (auto& v : w.pi) v = 0.001 + gen.unit();
        weight_oracle scaled = w;
        const double c = std::exp(gen.unit() * 20 - 10);
        for (auto& v : scaled.pi) v *= c;
        const weight_oracle uniform{"u", std::vector<double>(g.node_count(), 0.25)};
        worst_uniform = std::max(worst_uniform, std::abs(horvitz_thompson(s, y, uniform) - naive_mean(s, y)));
        worst_scale = std::max(worst_scale, std::abs(horvitz_thompson(s, y, scaled) - horvitz_thompson(s, y, w)));
        if (rds_two(s, y) != horvitz_thompson(s, y, degrees)) ++rds_mismatch;
    }
    return {worst_uniform <= 1e-12 && worst_scale <= 1e-12 && rds_mismatch == 0,
            fmt::format("max |HT_uniform - mean| {:.2e}, max scale drift {:.2e} (limit 1e-12), "
                        "RDS-II != HT_degree in {} of 1000",
                        worst_uniform, worst_scale, rds_mismatch)};
}

outcome parallel_reproducibility() {
    rng gen(9);
    const auto g = build_bks(synthetic_graphical(500, gen), gen).g;
    const auto p = recruitment_distribution::observed_default();
    const auto one = tracked_inclusion(g, 75, p, 3000, 0xC0FFEE, 1);
    const auto two = tracked_inclusion(g, 75, p, 3000, 0xC0FFEE, 2);
    const auto eight = tracked_inclusion(g, 75, p, 3000, 0xC0FFEE, 8);
    const auto bits = [](const inclusion_estimate& e) {
        std::vector<std::uint64_t> out;
        for (node_id i = 0; i < e.counts.size(); ++i) {
            const double v = e.pi_hat(i);
            std::uint64_t b;
            std::memcpy(&b, &v, sizeof b);
            out.push_back(b);
        }
        return out;
    };
    const bool ok = one.counts == two.counts && one.counts == eight.counts && bits(one) == bits(two) &&
                    bits(one) == bits(eight);
    return {ok, ok ? "workers 1, 2, 8 bit-identical" : "estimates differ across worker counts"};
}

outcome headline_demonstration() {
    rng gen(10);
    const auto seq = synthetic_graphical(1000, gen);
    const auto g = build_raman(seq);
    const auto p = recruitment_distribution::observed_default();
    const auto y = synth_outcomes(g, degree_logistic{-1.0, 0.8}, gen);
    // Weights come from an independent inclusion run.
    const auto mc = tracked_inclusion(g, 150, p, 20000, 1001);
    const std::vector<weight_oracle> oracles{{"mc", mc.pi_hats()}};
    const auto rows = bias_report(g, 150, p, y, oracles, 5000, 2002);
    const auto& rds = rows[1];
    const auto& ht = rows[2];
    const double gap = std::abs(rds.bias) - std::abs(ht.bias);
    const double se = std::sqrt(rds.stderr_ * rds.stderr_ + ht.stderr_ * ht.stderr_);
    return {gap > 3 * se,
            fmt::format("mu {:.4f}: |bias| HT(mc pi) {:.4f}, RDS-II {:.4f}, naive {:.4f}; gap {:.4f} vs 3 SE {:.4f}",
                        y.mu(), std::abs(ht.bias), std::abs(rds.bias), std::abs(rows[0].bias), gap, 3 * se)};
}

}  // namespace

int main(int argc, char** argv) {
    const bool full_scale = argc > 1 && std::string(argv[1]) == "--full-scale";
    int failures = 0;
    const auto report = [&](int id, const char* name, const std::function<outcome()>& check) {
        outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::cout << fmt::format("[{}] AC{:<2} {}: {}", o.pass ? "PASS" : "FAIL", id, name, o.detail) << std::endl;
    };

    if (full_scale) {
        report(7, "figure reproduction, full scale", [] { return figure_reproduction(5000, 373, 10000, 7200); });
        return failures == 0 ? 0 : 1;
    }

    report(1, "graphicality oracle equivalence", graphicality_equivalence);
    report(2, "constructor exactness", constructor_exactness);
    report(3, "bks uniformity on (1,1,1,1)", bks_uniformity);
    report(4, "degenerate model p_0 = 1", degenerate_model);
    report(5, "complete-graph symmetry", complete_graph_symmetry);
    report(7, "figure reproduction, desk scale", [] { return figure_reproduction(1000, 150, 2000, 600); });
    report(8, "estimator identities", estimator_identities);
    report(9, "parallel reproducibility", parallel_reproducibility);
    report(10, "headline: HT with MC pi beats RDS-II", headline_demonstration);
    // Criterion 6 covers every inclusion run above, so it is reported last.
    report(6, "counting identity", [] {
        return outcome{inclusion_runs > 0 && unbalanced_runs == 0,
                       fmt::format("sum(count) == n*R exactly in {}/{} inclusion runs", inclusion_runs - unbalanced_runs,
                                   inclusion_runs)};
    });
    std::cout << (failures == 0 ? "all criteria passed" : fmt::format("{} criteria failed", failures)) << std::endl;
    return failures == 0 ? 0 : 1;
}
