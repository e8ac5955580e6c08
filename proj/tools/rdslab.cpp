// rdslab: degree sequences, graph construction, chain-referral sampling,
// inclusion estimation and estimator bias, one subcommand per stage.
//
// Exit status: 0 ok, 64 usage, 65 invalid configuration or input,
// 70 compute failure, 74 I/O failure.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "rdslab/degseq.hpp"
#include "rdslab/errors.hpp"
#include "rdslab/estimators.hpp"
#include "rdslab/experiment.hpp"
#include "rdslab/graphgen.hpp"
#include "rdslab/inclusion.hpp"
#include "rdslab/rds_sampler.hpp"

using namespace rdslab;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitConfig = 65;
constexpr int kExitCompute = 70;
constexpr int kExitIo = 74;

std::vector<double> parse_probs(const std::string& text) {
    std::vector<double> out;
    std::stringstream in(text);
    for (std::string cell; std::getline(in, cell, ',');) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::logic_error&) {
            throw config_error(fmt::format("bad probability '{}'", cell));
        }
    }
    return out;
}

std::string join_probs(const std::vector<double>& p) {
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) out += fmt::format("{}{}", i ? "," : "", p[i]);
    return out;
}

outcome_model parse_outcome(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const auto args = colon == std::string::npos ? std::vector<double>{} : parse_probs(spec.substr(colon + 1));
    if (kind == "bernoulli" && args.size() == 1) return bernoulli_independent{args[0]};
    if (kind == "logistic" && args.size() == 2) return degree_logistic{args[0], args[1]};
    throw config_error(fmt::format("outcome '{}': expected bernoulli:q or logistic:a,b", spec));
}

void echo(const json& config) { std::cerr << "config: " << config.dump() << '\n'; }

struct common_sampling {
    std::string graph_path;
    std::size_t n = 373;
    std::string probs = join_probs(experiment_config{}.probs);
    std::uint64_t seed = experiment_config{}.master_seed;
    std::size_t workers = 1;
};

void add_sampling_options(CLI::App* cmd, common_sampling& o) {
    cmd->add_option("-g,--graph", o.graph_path, "Edge-list file")->required();
    cmd->add_option("-n,--sample-size", o.n, "Sample size n");
    cmd->add_option("-p,--probs", o.probs, "Recruitment probabilities p_0,p_1,...");
    cmd->add_option("-s,--seed", o.seed, "Master seed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chain-referral sampling laboratory"};
    app.require_subcommand(1);

    // degrees
    auto* degrees_cmd = app.add_subcommand("degrees", "Resample a degree sequence or check one for graphicality");
    std::string source_path, check_path, degrees_out;
    synthetic_pool_spec pool;
    std::size_t deg_N = 5000;
    std::uint64_t deg_seed = experiment_config{}.master_seed;
    bool allow_nongraphical = false;
    degrees_cmd->add_option("--source", source_path, "Degree-source file (default: synthetic pool)");
    degrees_cmd->add_option("--pool-size", pool.pool_size, "Synthetic pool size");
    degrees_cmd->add_option("--pool-mean", pool.mean, "Synthetic pool exponential mean");
    degrees_cmd->add_option("--pool-cap", pool.cap, "Synthetic pool maximum degree");
    degrees_cmd->add_option("-N,--nodes", deg_N, "Population size N");
    degrees_cmd->add_option("-s,--seed", deg_seed, "Seed");
    degrees_cmd->add_flag("--allow-nongraphical", allow_nongraphical, "Keep the first resample even if not graphical");
    degrees_cmd->add_option("--check", check_path, "Only test the sequence in this file for graphicality");
    degrees_cmd->add_option("-o,--output", degrees_out, "Output file (default: stdout)");

    // graph
    auto* graph_cmd = app.add_subcommand("graph", "Build a graph realizing a degree sequence");
    std::string graph_degrees, builder = "raman", graph_out;
    std::uint64_t graph_seed = experiment_config{}.master_seed;
    std::size_t max_retries = 100;
    graph_cmd->add_option("-d,--degrees", graph_degrees, "Degree-sequence file")->required();
    graph_cmd->add_option("-b,--builder", builder, "raman | bks")->check(CLI::IsMember({"raman", "bks"}));
    graph_cmd->add_option("-s,--seed", graph_seed, "Seed (bks)");
    graph_cmd->add_option("--max-retries", max_retries, "Restart budget (bks)");
    graph_cmd->add_option("-o,--output", graph_out, "Edge-list output")->required();

    // sample
    auto* sample_cmd = app.add_subcommand("sample", "Draw one sample and write its recruitment trace");
    common_sampling sample_opts;
    std::string trace_out;
    add_sampling_options(sample_cmd, sample_opts);
    sample_cmd->add_option("-o,--output", trace_out, "Trace CSV (default: stdout)");

    // inclusion
    auto* inclusion_cmd = app.add_subcommand("inclusion", "Monte Carlo inclusion probabilities");
    common_sampling incl_opts;
    std::size_t incl_R = 10000;
    std::string incl_out;
    add_sampling_options(inclusion_cmd, incl_opts);
    inclusion_cmd->add_option("-R,--replications", incl_R, "Replications");
    inclusion_cmd->add_option("-w,--workers", incl_opts.workers, "Worker threads (does not change results)");
    inclusion_cmd->add_option("-o,--output", incl_out, "Inclusion CSV")->required();

    // estimate
    auto* estimate_cmd = app.add_subcommand("estimate", "Estimator bias over repeated samples");
    common_sampling est_opts;
    std::size_t est_R = 5000;
    std::string outcome_spec = "logistic:-1,0.8", mc_path, est_out;
    estimate_cmd->add_option("-R,--replications", est_R, "Replications");
    add_sampling_options(estimate_cmd, est_opts);
    estimate_cmd->add_option("--outcome", outcome_spec, "bernoulli:q or logistic:a,b");
    estimate_cmd->add_option("--inclusion", mc_path, "Inclusion CSV used as the 'mc' weight oracle");
    estimate_cmd->add_option("-w,--workers", est_opts.workers, "Worker threads");
    estimate_cmd->add_option("-o,--output", est_out, "Bias CSV (default: stdout)");

    // experiment
    auto* exp_cmd = app.add_subcommand("experiment", "Full pipeline: degrees, both graphs, inclusion, fits, figure");
    std::string config_path;
    double scale = 1.0;
    std::optional<std::size_t> x_N, x_n, x_R, x_retries;
    std::optional<std::uint64_t> x_seed;
    std::optional<std::string> x_probs, x_source, x_out;
    std::vector<std::string> x_builders;
    std::size_t x_workers = 1;
    exp_cmd->add_option("-c,--config", config_path, "JSON config file");
    exp_cmd->add_option("--scale", scale, "Multiply N, n, R from file/defaults by this factor");
    exp_cmd->add_option("-N,--nodes", x_N, "Population size");
    exp_cmd->add_option("-n,--sample-size", x_n, "Sample size");
    exp_cmd->add_option("-R,--replications", x_R, "Replications");
    exp_cmd->add_option("-s,--seed", x_seed, "Master seed");
    exp_cmd->add_option("-p,--probs", x_probs, "Recruitment probabilities");
    exp_cmd->add_option("--source", x_source, "Degree-source file");
    exp_cmd->add_option("--builders", x_builders, "Subset of raman,bks")->delimiter(',');
    exp_cmd->add_option("--max-retries", x_retries, "BKS restart budget");
    exp_cmd->add_option("-o,--output-dir", x_out, "Output directory (default $RDSLAB_OUT or ./rdslab-out)");
    exp_cmd->add_option("-w,--workers", x_workers, "Worker threads (does not change results)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*degrees_cmd) {
            if (!check_path.empty()) {
                const auto seq = read_degree_sequence(check_path);
                const auto verdict = check_graphical(seq);
                json out = {{"nodes", seq.size()}, {"total", seq.total()}, {"graphical", verdict.graphical},
                            {"verdict", verdict.describe()}};
                if (verdict.failing_k) out["failing_k"] = *verdict.failing_k;
                std::cout << out.dump() << '\n';
                return verdict.graphical ? 0 : kExitConfig;
            }
            echo({{"source", source_path.empty() ? "synthetic" : source_path}, {"N", deg_N}, {"seed", deg_seed},
                  {"pool", {{"size", pool.pool_size}, {"mean", pool.mean}, {"cap", pool.cap}}}});
            rng gen(derive_stage_seeds(deg_seed).degrees);
            const degree_source source =
                source_path.empty() ? synthetic_degree_source(pool, gen) : load_degree_source(source_path);
            degree_sequence seq = allow_nongraphical ? resample_degrees(source, deg_N, gen)
                                                     : resample_graphical(source, deg_N, gen).first;
            if (degrees_out.empty()) {
                for (auto d : seq) std::cout << d << '\n';
            } else {
                write_degree_sequence(seq, degrees_out);
            }
            std::cerr << check_graphical(seq).describe() << '\n';
        } else if (*graph_cmd) {
            echo({{"degrees", graph_degrees}, {"builder", builder}, {"seed", graph_seed}, {"max_retries", max_retries}});
            const auto seq = read_degree_sequence(graph_degrees);
            graph g;
            json info = {{"builder", builder}};
            if (builder == "raman") {
                g = build_raman(seq);
            } else {
                rng gen(derive_stage_seeds(graph_seed).bks);
                auto res = build_bks(seq, gen, {max_retries});
                if (res.outside_applicability)
                    std::cerr << "warning: max degree is large relative to the degree total; "
                                 "bks output may be far from uniform\n";
                info["attempts"] = res.attempts;
                g = std::move(res.g);
            }
            write_edge_list(g, graph_out);
            const auto r = degree_assortativity(g);
            info["nodes"] = g.node_count();
            info["edges"] = g.edge_count();
            info["assortativity"] = r ? json(*r) : json(nullptr);
            std::cout << info.dump() << '\n';
        } else if (*sample_cmd) {
            echo({{"graph", sample_opts.graph_path}, {"n", sample_opts.n}, {"probs", sample_opts.probs},
                  {"seed", sample_opts.seed}});
            const auto g = read_edge_list(sample_opts.graph_path);
            const recruitment_distribution p(parse_probs(sample_opts.probs));
            rng gen = rng::for_replication(sample_opts.seed, 0);
            const auto s = draw_sample(g, sample_opts.n, p, gen);
            if (trace_out.empty()) std::cout << trace_csv(s);
            else write_trace_csv(s, trace_out);
        } else if (*inclusion_cmd) {
            echo({{"graph", incl_opts.graph_path}, {"n", incl_opts.n}, {"probs", incl_opts.probs},
                  {"seed", incl_opts.seed}, {"R", incl_R}});
            const auto g = read_edge_list(incl_opts.graph_path);
            const recruitment_distribution p(parse_probs(incl_opts.probs));
            const auto est = estimate_inclusion(g, incl_opts.n, p, incl_R, incl_opts.seed, {incl_opts.workers});
            const auto deg = g.degrees();
            write_inclusion_csv(est, deg, incl_out);
            json info = {{"counts_balance", est.counts_balance()}};
            try {
                const auto fit = fit_loglog(est.pi_hats(), deg);
                info["loglog"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2},
                                  {"used", fit.used}, {"excluded", fit.excluded}};
            } catch (const compute_error& e) {
                info["loglog"] = e.what();
            }
            std::cout << info.dump() << '\n';
        } else if (*estimate_cmd) {
            echo({{"graph", est_opts.graph_path}, {"n", est_opts.n}, {"probs", est_opts.probs},
                  {"seed", est_opts.seed}, {"R", est_R}, {"outcome", outcome_spec}, {"inclusion", mc_path}});
            const auto g = read_edge_list(est_opts.graph_path);
            const recruitment_distribution p(parse_probs(est_opts.probs));
            // Outcomes draw from a stream disjoint from the replication streams.
            rng ygen(mix64(est_opts.seed ^ 0x6F7574636F6D6573ULL));
            const auto y = synth_outcomes(g, parse_outcome(outcome_spec), ygen);
            std::vector<weight_oracle> oracles;
            if (!mc_path.empty()) oracles.push_back({"mc", read_inclusion_pi(mc_path)});
            const auto rows = bias_report(g, est_opts.n, p, y, oracles, est_R, est_opts.seed, {est_opts.workers});
            if (est_out.empty()) std::cout << bias_csv(rows);
            else write_bias_csv(rows, est_out);
            std::cerr << fmt::format("true mean {:.17g}\n", y.mu());
        } else if (*exp_cmd) {
            experiment_config cfg;
            if (const char* env = std::getenv("RDSLAB_OUT"); env && *env) cfg.output_dir = env;
            if (!config_path.empty()) apply_json(cfg, read_config_json(config_path));
            if (scale != 1.0) cfg.scale(scale);
            if (x_N) cfg.N = *x_N;
            if (x_n) cfg.n = *x_n;
            if (x_R) cfg.R = *x_R;
            if (x_seed) cfg.master_seed = *x_seed;
            if (x_probs) cfg.probs = parse_probs(*x_probs);
            if (x_source) cfg.degree_source = *x_source;
            if (!x_builders.empty()) cfg.builders = x_builders;
            if (x_retries) cfg.max_retries = *x_retries;
            if (x_out) cfg.output_dir = *x_out;
            cfg.workers = x_workers;
            cfg.validate();
            std::cout << to_json(cfg).dump() << '\n';
            const auto res = run_experiment(cfg);
            std::cout << res.summary["graphs"].dump() << '\n';
        }
    } catch (const stage_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        try {
            std::rethrow_exception(e.cause());
        } catch (const stage_error&) {
        } catch (const config_error&) {
            return kExitConfig;
        } catch (const io_error&) {
            return kExitIo;
        } catch (...) {
        }
        return kExitCompute;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCompute;
    }
    return 0;
}
