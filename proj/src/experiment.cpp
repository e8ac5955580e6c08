#include "rdslab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/core.h>

#include "rdslab/errors.hpp"
#include "rdslab/graphgen.hpp"
#include "rdslab/rds_sampler.hpp"

namespace rdslab {

namespace fs = std::filesystem;

void experiment_config::validate() const {
    if (N < 1) throw config_error("N must be >= 1");
    if (n < 1 || n > N) throw config_error(fmt::format("n = {} must lie in [1, N = {}]", n, N));
    if (R < 1) throw config_error("R must be >= 1");
    (void)recruitment_distribution(probs);
    if (builders.empty()) throw config_error("no graph builders selected");
    std::set<std::string> seen;
    for (const auto& b : builders) {
        if (b != "raman" && b != "bks") throw config_error(fmt::format("unknown builder '{}'", b));
        if (!seen.insert(b).second) throw config_error(fmt::format("builder '{}' listed twice", b));
    }
    if (output_dir.empty()) throw config_error("output directory is empty");
}

void experiment_config::scale(double factor) {
    if (!(factor > 0.0) || !std::isfinite(factor)) throw config_error("scale must be positive");
    const auto shrink = [factor](std::size_t v) {
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(v) * factor)));
    };
    N = shrink(N);
    n = shrink(n);
    R = shrink(R);
}

nlohmann::json to_json(const experiment_config& cfg) {
    return {
        {"degree_source", cfg.degree_source},
        {"synthetic", {{"pool_size", cfg.synthetic.pool_size}, {"mean", cfg.synthetic.mean}, {"cap", cfg.synthetic.cap}}},
        {"N", cfg.N},
        {"n", cfg.n},
        {"R", cfg.R},
        {"probs", cfg.probs},
        {"master_seed", cfg.master_seed},
        {"builders", cfg.builders},
        {"max_retries", cfg.max_retries},
        {"output_dir", cfg.output_dir},
    };
}

void apply_json(experiment_config& cfg, const nlohmann::json& j) {
    if (!j.is_object()) throw config_error("config must be a JSON object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "degree_source") cfg.degree_source = value.get<std::string>();
            else if (key == "synthetic") {
                for (const auto& [k, v] : value.items()) {
                    if (k == "pool_size") cfg.synthetic.pool_size = v.get<std::size_t>();
                    else if (k == "mean") cfg.synthetic.mean = v.get<double>();
                    else if (k == "cap") cfg.synthetic.cap = v.get<degree_t>();
                    else throw config_error(fmt::format("unknown synthetic key '{}'", k));
                }
            } else if (key == "N") cfg.N = value.get<std::size_t>();
            else if (key == "n") cfg.n = value.get<std::size_t>();
            else if (key == "R") cfg.R = value.get<std::size_t>();
            else if (key == "probs") cfg.probs = value.get<std::vector<double>>();
            else if (key == "master_seed") cfg.master_seed = value.get<std::uint64_t>();
            else if (key == "builders") cfg.builders = value.get<std::vector<std::string>>();
            else if (key == "max_retries") cfg.max_retries = value.get<std::size_t>();
            else if (key == "output_dir") cfg.output_dir = value.get<std::string>();
            else throw config_error(fmt::format("unknown config key '{}'", key));
        }
    } catch (const nlohmann::json::exception& e) {
        throw config_error(fmt::format("config: {}", e.what()));
    }
}

nlohmann::json read_config_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error(fmt::format("cannot open '{}'", path.string()));
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(fmt::format("{}: {}", path.string(), e.what()));
    }
}

experiment_config load_config(const fs::path& path) {
    experiment_config cfg;
    apply_json(cfg, read_config_json(path));
    return cfg;
}

// Stage k draws from mix64(master_seed ^ mix64(k)); k = 1 degrees, 2 bks,
// 3 raman inclusion, 4 bks inclusion.
stage_seeds derive_stage_seeds(std::uint64_t master_seed) {
    const auto seed = [master_seed](std::uint64_t k) { return mix64(master_seed ^ mix64(k)); };
    return {seed(1), seed(2), seed(3), seed(4)};
}

std::pair<degree_sequence, std::size_t> resample_graphical(const degree_source& source, std::size_t N,
                                                            rng& gen, std::size_t max_attempts) {
    for (std::size_t draw = 1; draw <= max_attempts; ++draw) {
        auto seq = resample_degrees(source, N, gen);
        if (is_graphical(seq)) return {std::move(seq), draw};
    }
    throw compute_error(fmt::format("no graphical resample of size {} in {} draws", N, max_attempts));
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error(fmt::format("cannot write '{}'", path.string()));
    out << text;
    if (!out) throw io_error(fmt::format("write failure on '{}'", path.string()));
}

template <class F>
auto stage(const char* name, F&& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        throw stage_error(name, e.what(), std::current_exception());
    }
}

nlohmann::json fit_json(const graph_summary& s) {
    nlohmann::json j = {
        {"builder", s.builder},
        {"edges", s.g.edge_count()},
        {"attempts", s.attempts},
        {"loglog", {{"slope", s.fit.slope}, {"intercept", s.fit.intercept}, {"r2", s.fit.r2},
                    {"used", s.fit.used}, {"excluded", s.fit.excluded}}},
        {"counts_balance", s.inclusion.counts_balance()},
    };
    j["assortativity"] = s.assortativity ? nlohmann::json(*s.assortativity) : nlohmann::json(nullptr);
    return j;
}

}  // namespace

experiment_result run_experiment(const experiment_config& cfg) {
    cfg.validate();
    const fs::path dir = cfg.output_dir;
    const fs::path marker = dir / "INCOMPLETE";
    stage("output", [&] {
        fs::create_directories(dir);
        write_text(marker, "run in progress\n");
        write_text(dir / "config.json", to_json(cfg).dump(2) + "\n");
        return 0;
    });

    try {
        experiment_result res;
        res.config = cfg;
        const auto seeds = derive_stage_seeds(cfg.master_seed);
        const recruitment_distribution probs(cfg.probs);

        stage("degrees", [&] {
            rng gen(seeds.degrees);
            const degree_source source = cfg.degree_source.empty()
                                             ? synthetic_degree_source(cfg.synthetic, gen)
                                             : load_degree_source(cfg.degree_source);
            auto [seq, draws] = resample_graphical(source, cfg.N, gen);
            res.degrees = std::move(seq);
            res.resample_draws = draws;
            write_degree_sequence(res.degrees, dir / "degrees.txt");
            return 0;
        });

        for (const auto& builder : cfg.builders) {
            graph_summary s;
            s.builder = builder;
            stage("graph", [&] {
                if (builder == "raman") {
                    s.g = build_raman(res.degrees);
                } else {
                    rng gen(seeds.bks);
                    auto built = build_bks(res.degrees, gen, {cfg.max_retries});
                    s.g = std::move(built.g);
                    s.attempts = built.attempts;
                }
                s.assortativity = degree_assortativity(s.g);
                write_edge_list(s.g, dir / fmt::format("graph_{}.edges", builder));
                return 0;
            });
            stage("inclusion", [&] {
                const std::uint64_t seed = builder == "raman" ? seeds.inclusion_raman : seeds.inclusion_bks;
                s.inclusion = estimate_inclusion(s.g, cfg.n, probs, cfg.R, seed, {cfg.workers});
                if (!s.inclusion.counts_balance()) throw compute_error("inclusion tallies do not sum to n * R");
                const auto deg = s.g.degrees();
                write_inclusion_csv(s.inclusion, deg, dir / fmt::format("inclusion_{}.csv", builder));
                s.fit = fit_loglog(s.inclusion.pi_hats(), deg);
                return 0;
            });
            res.graphs.push_back(std::move(s));
        }

        stage("report", [&] {
            const std::vector<std::uint32_t> deg(res.degrees.begin(), res.degrees.end());
            std::string scatter = "graph,node,degree,pi_hat\n";
            for (const auto& s : res.graphs)
                for (node_id i = 0; i < deg.size(); ++i)
                    scatter += fmt::format("{},{},{},{:.17g}\n", s.builder, i, deg[i], s.inclusion.pi_hat(i));
            write_text(dir / "scatter.csv", scatter);
            write_text(dir / "figure.svg", scatter_svg(res.graphs, deg));

            nlohmann::json summary;
            summary["complete"] = true;
            summary["config"] = to_json(cfg);
            summary["seeds"] = {{"master", cfg.master_seed}, {"degrees", seeds.degrees}, {"bks", seeds.bks},
                                {"inclusion_raman", seeds.inclusion_raman}, {"inclusion_bks", seeds.inclusion_bks}};
            summary["degrees"] = {{"N", res.degrees.size()}, {"total", res.degrees.total()},
                                  {"max", res.degrees.max()}, {"resample_draws", res.resample_draws},
                                  {"synthetic", cfg.degree_source.empty()}};
            summary["graphs"] = nlohmann::json::object();
            for (const auto& s : res.graphs) summary["graphs"][s.builder] = fit_json(s);
            res.summary = summary;
            write_text(dir / "summary.json", summary.dump(2) + "\n");
            return 0;
        });
        fs::remove(marker);
        return res;
    } catch (const stage_error& e) {
        std::ofstream(marker, std::ios::app) << "failed in stage " << e.what() << '\n';
        throw;
    }
}

std::string scatter_svg(const std::vector<graph_summary>& graphs, std::span<const std::uint32_t> degrees) {
    constexpr double panel_w = 420, panel_h = 320, margin = 50, gap = 30;
    const double width = margin + graphs.size() * (panel_w + gap) + margin - gap;
    const double height = margin + panel_h + margin;

    double x_max = 1, y_max = 0;
    for (auto d : degrees) x_max = std::max(x_max, static_cast<double>(d));
    for (const auto& s : graphs)
        for (node_id i = 0; i < s.inclusion.counts.size(); ++i) y_max = std::max(y_max, s.inclusion.pi_hat(i));
    y_max = y_max > 0 ? std::min(1.0, y_max * 1.05) : 1.0;

    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
        "font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        width, height);
    for (std::size_t p = 0; p < graphs.size(); ++p) {
        const auto& s = graphs[p];
        const double x0 = margin + p * (panel_w + gap), y0 = margin;
        svg += fmt::format("<g>\n<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"13\">{} (slope {:.3f})</text>\n",
                           x0, y0 - 12, s.builder, s.fit.slope);
        svg += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"none\" stroke=\"black\"/>\n",
                           x0, y0, panel_w, panel_h);
        for (int t = 0; t <= 4; ++t) {
            const double fx = t / 4.0;
            svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.0f}</text>\n",
                               x0 + fx * panel_w, y0 + panel_h + 14, fx * x_max);
            svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.2f}</text>\n", x0 - 4,
                               y0 + panel_h - fx * panel_h + 4, fx * y_max);
        }
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">degree</text>\n",
                           x0 + panel_w / 2, y0 + panel_h + 32);
        for (node_id i = 0; i < s.inclusion.counts.size(); ++i) {
            const double cx = x0 + degrees[i] / x_max * panel_w;
            const double cy = y0 + panel_h - s.inclusion.pi_hat(i) / y_max * panel_h;
            svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"1.5\" fill=\"#1f4e99\" fill-opacity=\"0.5\"/>\n",
                               cx, cy);
        }
        svg += "</g>\n";
    }
    svg += fmt::format("<text x=\"14\" y=\"{:.1f}\" transform=\"rotate(-90 14 {:.1f})\" text-anchor=\"middle\">inclusion probability</text>\n",
                       margin + panel_h / 2, margin + panel_h / 2);
    svg += "</svg>\n";
    return svg;
}

}  // namespace rdslab
