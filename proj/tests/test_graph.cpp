#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fpp/graph.hpp"

using namespace fpp;

namespace {

// hand-built fixture helper
WeightedGraph make_graph(long long n, const std::vector<std::tuple<int, int, double>>& edges) {
    WeightedGraph g;
    g.n = n;
    g.adj.assign(static_cast<std::size_t>(n) + 1, {});
    for (auto [u, v, w] : edges) {
        g.adj[u].push_back({v, w});
        g.adj[v].push_back({u, w});
    }
    return g;
}

}  // namespace

TEST_CASE("generation is deterministic and has the right density") {
    auto model = WeightModel::exponential(1.0);
    {
        RandomStream a(5), b(5);
        auto g1 = generate(1000, 2.0, model, a);
        auto g2 = generate(1000, 2.0, model, b);
        CHECK(g1.edge_count() == g2.edge_count());
        bool same = true;
        for (int v = 1; v <= 1000; ++v) same = same && g1.adj[v] == g2.adj[v];
        CHECK(same);
    }
    {
        // n = 2, p = lambda/n = 1: edge always present
        RandomStream rng(1);
        auto g = generate(2, 2.0, model, rng);
        CHECK(g.edge_count() == 1);
    }
    {
        // mean edge count C(n,2) * lambda/n ~ lambda(n-1)/2
        RandomStream rng(9);
        long long n = 10000;
        double total = 0.0;
        const int reps = 200;
        for (int i = 0; i < reps; ++i) total += generate(n, 2.0, model, rng).edge_count();
        double mean = total / reps;
        double expect = (n - 1.0);  // lambda = 2
        double se = std::sqrt(expect / reps);  // binomial, p small
        CHECK(std::abs(mean - expect) < 5 * se);
    }
}

TEST_CASE("shortest paths and hop counts on fixtures") {
    // diamond: 1-2-4 (0.3+0.4) and 1-3-4 (0.1+0.2)
    auto g = make_graph(4, {{1, 2, 0.3}, {2, 4, 0.4}, {1, 3, 0.1}, {3, 4, 0.2}});
    auto d = dijkstra_from(g, 1);
    CHECK(d[4] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(d[2] == doctest::Approx(0.3).epsilon(1e-15));
    auto h = bfs_hops_from(g, 1);
    CHECK(h[4] == 2);
    auto m = min_paths(g);
    CHECK(m.status == ConnStatus::connected);
    CHECK(m.l_min == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(m.p_min == 1);
    CHECK(m.hopcounts == std::vector<int>{2});

    // disconnected
    auto g2 = make_graph(4, {{1, 2, 1.0}, {3, 4, 1.0}});
    auto m2 = min_paths(g2);
    CHECK(m2.status == ConnStatus::disconnected);
    CHECK(bfs_hops_from(g2, 1)[4] == -1);
    CHECK(std::isinf(dijkstra_from(g2, 1)[4]));

    // two vertex-disjoint minimal paths of equal weight, different hopcounts
    auto g3 = make_graph(5,
                         {{1, 2, 0.5}, {2, 5, 0.5}, {1, 3, 0.3}, {3, 4, 0.3}, {4, 5, 0.4}});
    auto m3 = min_paths(g3);
    CHECK(m3.l_min == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m3.p_min == 2);
    CHECK(m3.hopcounts == std::vector<int>{2, 3});
}

TEST_CASE("lattice tie handling uses exact integers") {
    // weights all on the 0.5 lattice; floating sums along the two routes
    auto g = make_graph(5,
                        {{1, 2, 0.5}, {2, 5, 1.0}, {1, 3, 0.5}, {3, 4, 0.5}, {4, 5, 0.5}});
    auto m = min_paths(g, 0.5);
    CHECK(m.l_min == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(m.p_min == 2);
    CHECK(m.hopcounts == std::vector<int>{2, 3});
}

TEST_CASE("path enumeration with thresholds") {
    // triangle 1-2-3 plus the direct edge 1-3
    auto g = make_graph(3, {{1, 2, 1.0}, {2, 3, 1.0}, {1, 3, 1.5}});
    auto both = enumerate_paths(g, 2.0, 2);
    CHECK(both.size() == 2);
    auto direct_only = enumerate_paths(g, 2.0, 1);
    REQUIRE(direct_only.size() == 1);
    CHECK(direct_only[0].hops == 1);
    CHECK(direct_only[0].weight == doctest::Approx(1.5));
    CHECK(enumerate_paths(g, 1.4, 5).empty());
    for (const auto& p : both) {
        CHECK(p.vertices.front() == 1);
        CHECK(p.vertices.back() == 3);
        CHECK(p.hops == static_cast<int>(p.vertices.size()) - 1);
    }
}

TEST_CASE("enumeration budget raises") {
    // complete-ish graph with generous thresholds forces a huge search
    RandomStream rng(3);
    auto g = generate(40, 39.0, WeightModel::exponential(1.0), rng);
    CHECK_THROWS_AS(enumerate_paths(g, 1e9, 40, 1000), BudgetError);
}

TEST_CASE("window points rescale invertibly") {
    auto params = build_params(WeightModel::exponential(1.0), 2.0);
    ScalingSchedule s = schedule(params, 8103);  // log n ~ 9
    std::vector<PathRecord> paths{{{0}, 22, s.rho_n + 0.5}, {{0}, 18, s.rho_n - 1.0}};
    auto pts = point_process(paths, s, params);
    REQUIRE(pts.size() == 2);
    double denom = std::sqrt(params.beta * s.log_n);
    CHECK(pts[0].z == doctest::Approx((22 - params.gamma * s.log_n) / denom).epsilon(1e-12));
    CHECK(pts[0].u == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(pts[1].u == doctest::Approx(-1.0).epsilon(1e-9));
    // invert back to the raw hopcount/weight
    CHECK(pts[0].z * denom + params.gamma * s.log_n == doctest::Approx(22.0).epsilon(1e-9));
    CHECK(point_process({}, s, params).empty());
}

TEST_CASE("crossing detection") {
    auto path = [](std::vector<int> v) {
        PathRecord p;
        p.vertices = std::move(v);
        p.hops = static_cast<int>(p.vertices.size()) - 1;
        return p;
    };
    // share an interior vertex with different entry and exit: crossing
    auto a = path({1, 2, 5, 3, 9});
    auto b = path({1, 4, 5, 6, 9});
    CHECK(crosses(a, b));
    CHECK(crosses(b, a));
    // same entry into the shared vertex: a shared prefix, not a crossing
    auto c = path({1, 2, 5, 6, 9});
    CHECK_FALSE(crosses(a, c));
    // vertex-disjoint interiors never cross
    auto d = path({1, 7, 8, 9});
    CHECK_FALSE(crosses(a, d));
    // endpoints do not count as crossings
    CHECK_FALSE(crosses(path({1, 2, 9}), path({1, 3, 9})));

    auto kept = uncrossed_filter({a, b, d});
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].vertices == d.vertices);
}

TEST_CASE("edge list round trip") {
    RandomStream rng(17);
    auto g = generate(200, 3.0, WeightModel::uniform_interval(0.0, 1.0), rng);
    std::stringstream ss;
    dump_edge_list(g, ss);
    auto back = load_edge_list(ss);
    CHECK(back.n == g.n);
    REQUIRE(back.edge_count() == g.edge_count());
    auto d1 = dijkstra_from(g, 1), d2 = dijkstra_from(back, 1);
    for (int v = 1; v <= 200; ++v)
        CHECK(((std::isinf(d1[v]) && std::isinf(d2[v])) ||
               d1[v] == doctest::Approx(d2[v]).epsilon(1e-12)));
}
