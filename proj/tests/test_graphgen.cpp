#include <array>
#include <cmath>
#include <map>

#include "doctest.h"
#include "rdslab/errors.hpp"
#include "rdslab/experiment.hpp"
#include "rdslab/graphgen.hpp"
#include "test_support.hpp"

using namespace rdslab;

namespace {

std::vector<edge> E(std::initializer_list<edge> e) { return e; }

bool degrees_match(const graph& g, const degree_sequence& seq) {
    for (node_id i = 0; i < seq.size(); ++i)
        if (g.degree(i) != seq[i]) return false;
    return true;
}

degree_sequence random_graphical(rng& gen, std::size_t n) {
    const auto pool = synthetic_degree_source({}, gen);
    return resample_graphical(pool, n, gen).first;
}

}  // namespace

TEST_CASE("graph construction rejects malformed edge sets") {
    CHECK_THROWS_AS(graph(3, E({{0, 0}})), config_error);
    CHECK_THROWS_AS(graph(3, E({{0, 1}, {1, 0}})), config_error);
    CHECK_THROWS_AS(graph(3, E({{0, 3}})), config_error);
    const graph g(4, E({{2, 1}, {0, 1}}));
    CHECK(g.edges() == E({{0, 1}, {1, 2}}));
    CHECK(g.has_edge(2, 1));
    CHECK_FALSE(g.has_edge(0, 2));
    CHECK(g.degree(3) == 0);
    CHECK(validate(g).empty());
}

TEST_CASE("build_raman examples") {
    CHECK(build_raman(degree_sequence({2, 2, 2})).edges() == E({{0, 1}, {0, 2}, {1, 2}}));
    CHECK(build_raman(degree_sequence({3, 3, 3, 3})) == testing::complete_graph(4));
    CHECK(build_raman(degree_sequence({1, 1})).edges() == E({{0, 1}}));
    CHECK(build_raman(degree_sequence({0, 0})).edge_count() == 0);
    CHECK_THROWS_AS(build_raman(degree_sequence({3, 3, 1, 1})), config_error);
    CHECK_THROWS_AS(build_raman(degree_sequence({1, 1, 1})), config_error);
}

TEST_CASE("build_raman ties go to the lower node id") {
    // Node 0 (R=2) takes the two lowest-id nodes among residual-1 ties.
    const auto g = build_raman(degree_sequence({2, 1, 1, 1, 1}));
    CHECK(g.edges() == E({{0, 1}, {0, 2}, {3, 4}}));
}

TEST_CASE("build_bks examples") {
    rng gen(5);
    CHECK(build_bks(degree_sequence({1, 1}), gen).g.edges() == E({{0, 1}}));
    CHECK(build_bks(degree_sequence({2, 2, 2}), gen).g == testing::complete_graph(3));
    CHECK_THROWS_AS(build_bks(degree_sequence({3, 3, 1, 1}), gen), config_error);
}

TEST_CASE("build_bks on (1,1,1,1) is uniform over the three matchings") {
    rng gen(2024);
    std::map<std::vector<edge>, int> freq;
    constexpr int runs = 30000;
    for (int r = 0; r < runs; ++r) ++freq[build_bks(degree_sequence({1, 1, 1, 1}), gen).g.edges()];
    REQUIRE(freq.size() == 3);
    double chi2 = 0;
    for (const auto& [edges, count] : freq) {
        CHECK(std::abs(count / double(runs) - 1.0 / 3) < 0.02);
        chi2 += std::pow(count - runs / 3.0, 2) / (runs / 3.0);
    }
    CHECK(chi2 < 13.8);  // chi-square(2) at p = 0.001
}

TEST_CASE("build_bks restarts from stuck states and reports exhaustion") {
    // (2,2,2,2): closing a triangle first leaves node 3 with no partner.
    int exhausted = 0, ok = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        rng gen(s);
        try {
            const auto res = build_bks(degree_sequence({2, 2, 2, 2}), gen, {0});
            CHECK(res.attempts == 1);
            CHECK(res.g.edge_count() == 4);
            CHECK(validate(res.g).empty());
            for (node_id i = 0; i < 4; ++i) CHECK(res.g.degree(i) == 2);
            ++ok;
        } catch (const compute_error& e) {
            CHECK(std::string(e.what()).find("1 attempts") != std::string::npos);
            ++exhausted;
        }
    }
    CHECK(exhausted > 0);
    CHECK(ok > 0);

    rng gen(9);
    std::size_t max_attempts = 0;
    for (int r = 0; r < 200; ++r) max_attempts = std::max(max_attempts, build_bks(degree_sequence({2, 2, 2, 2}), gen).attempts);
    CHECK(max_attempts > 1);
}

TEST_CASE("build_bks refuses sequences with negative pair weights") {
    // 8 * 8 > 2 * 30
    rng gen(1);
    CHECK_THROWS_AS(build_bks(degree_sequence({8, 8, 2, 2, 2, 2, 2, 2, 2}), gen), config_error);
}

TEST_CASE("both builders realize random graphical sequences exactly") {
    rng gen(77);
    int bks_ok = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 60 + gen.below(141);  // >= 60 > pool cap of 50
        const auto seq = random_graphical(gen, n);
        const auto g1 = build_raman(seq);
        CHECK(validate(g1).empty());
        CHECK(degrees_match(g1, seq));
        CHECK(build_raman(seq) == g1);
        try {
            const auto res = build_bks(seq, gen);
            CHECK(validate(res.g).empty());
            CHECK(degrees_match(res.g, seq));
            ++bks_ok;
        } catch (const compute_error&) {
        } catch (const config_error&) {
            // negative pair weight: outside the procedure's domain, counted as a failure
        }
    }
    CHECK(bks_ok >= 95);
}

TEST_CASE("raman graphs are more degree-assortative than bks graphs") {
    rng gen(31);
    int separated = 0;
    constexpr int trials = 20;
    for (int t = 0; t < trials; ++t) {
        const auto seq = random_graphical(gen, 500);
        const auto a1 = degree_assortativity(build_raman(seq));
        const auto a2 = degree_assortativity(build_bks(seq, gen).g);
        REQUIRE(a1);
        REQUIRE(a2);
        if (*a1 > *a2) ++separated;
    }
    CHECK(separated >= 19);
}

TEST_CASE("degree_assortativity") {
    CHECK_FALSE(degree_assortativity(testing::complete_graph(4)));
    CHECK(*degree_assortativity(testing::star_graph(3)) == doctest::Approx(-1.0));
    CHECK_FALSE(degree_assortativity(graph(4, E({{0, 1}, {2, 3}}))));
    CHECK_FALSE(degree_assortativity(graph(3, {})));
    // Path 0-1-2-3: edge-end degree pairs (1,2),(2,2),(2,1) both ways -> r = -1/2.
    CHECK(*degree_assortativity(graph(4, E({{0, 1}, {1, 2}, {2, 3}}))) == doctest::Approx(-0.5));
}

TEST_CASE("edge-list files") {
    SUBCASE("canonical form") {
        const auto path = testing::temp_file("tri.edges");
        write_edge_list(testing::complete_graph(3), path);
        CHECK(testing::slurp(path) == "# nodes=3\n0 1\n0 2\n1 2\n");
    }
    SUBCASE("isolated nodes survive via the header") {
        const graph g(5, E({{0, 1}}));
        const auto path = testing::temp_file("iso.edges");
        write_edge_list(g, path);
        CHECK(read_edge_list(path) == g);
    }
    SUBCASE("round trip of a bks graph") {
        rng gen(3);
        const auto g = build_bks(random_graphical(gen, 100), gen).g;
        const auto path = testing::temp_file("bks100.edges");
        write_edge_list(g, path);
        CHECK(read_edge_list(path) == g);
    }
    SUBCASE("parse errors carry line numbers") {
        const auto expect_line = [](const std::string& body, std::size_t line) {
            try {
                read_edge_list(testing::write_temp("bad.edges", body));
                FAIL("expected parse error");
            } catch (const parse_error& e) {
                CHECK(e.line() == line);
            }
        };
        expect_line("# nodes=3\n0 1\n2 2\n", 3);
        expect_line("# nodes=3\n0 1\n1 0\n", 3);
        expect_line("# nodes=3\n0 1\n1 3\n", 3);
        expect_line("0 1\nfoo\n", 2);
        expect_line("0 1 2\n", 1);
    }
    SUBCASE("missing header infers N from ids") {
        CHECK(read_edge_list(testing::write_temp("nohdr.edges", "1 2\n")).node_count() == 3);
    }
}
