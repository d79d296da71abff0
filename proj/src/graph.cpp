#include "fpp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <unordered_map>

namespace fpp {

std::size_t WeightedGraph::edge_count() const {
    std::size_t deg = 0;
    for (auto& a : adj) deg += a.size();
    return deg / 2;
}

WeightedGraph generate(long long n, double lambda, const WeightModel& model, RandomStream& rng) {
    if (n < 2) throw std::domain_error("generate: n must be >= 2");
    if (lambda > static_cast<double>(n))
        throw std::domain_error("generate: lambda must not exceed n");
    const double p = lambda / static_cast<double>(n);

    WeightedGraph g;
    g.n = n;
    g.adj.assign(static_cast<std::size_t>(n) + 1, {});

    auto add_edge = [&](long long i, long long j) {
        double w = model.sample(rng);
        g.adj[static_cast<std::size_t>(i)].emplace_back(static_cast<int>(j), w);
        g.adj[static_cast<std::size_t>(j)].emplace_back(static_cast<int>(i), w);
    };

    if (p >= 1.0) {
        for (long long i = 1; i <= n; ++i)
            for (long long j = i + 1; j <= n; ++j) add_edge(i, j);
        return g;
    }

    // Walk the C(n,2) pairs in lexicographic order with geometric gaps, so
    // the cost is proportional to the number of present edges.
    const double log1mp = std::log1p(-p);
    long long i = 1, j = 1;  // sentinel position just before pair (1,2)
    for (;;) {
        double u = rng.uniform_pos();
        long long gap = 1 + static_cast<long long>(std::floor(std::log(u) / log1mp));
        long long remaining = gap;
        while (remaining > 0 && i < n) {
            long long avail = n - j;
            if (remaining <= avail) {
                j += remaining;
                remaining = 0;
            } else {
                remaining -= avail;
                ++i;
                j = i;
            }
        }
        if (i >= n) break;
        add_edge(i, j);
    }
    return g;
}

std::vector<double> dijkstra_from(const WeightedGraph& g, int src) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(g.adj.size(), inf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[static_cast<std::size_t>(src)] = 0.0;
    pq.emplace(0.0, src);
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > dist[static_cast<std::size_t>(v)]) continue;
        for (auto& [w, len] : g.adj[static_cast<std::size_t>(v)]) {
            double nd = d + len;
            if (nd < dist[static_cast<std::size_t>(w)]) {
                dist[static_cast<std::size_t>(w)] = nd;
                pq.emplace(nd, w);
            }
        }
    }
    return dist;
}

std::vector<int> bfs_hops_from(const WeightedGraph& g, int src) {
    std::vector<int> hops(g.adj.size(), -1);
    std::queue<int> q;
    hops[static_cast<std::size_t>(src)] = 0;
    q.push(src);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (auto& [w, len] : g.adj[static_cast<std::size_t>(v)]) {
            if (hops[static_cast<std::size_t>(w)] < 0) {
                hops[static_cast<std::size_t>(w)] = hops[static_cast<std::size_t>(v)] + 1;
                q.push(w);
            }
        }
    }
    return hops;
}

namespace {

struct Enumerator {
    const WeightedGraph& g;
    double weight_threshold;
    int hop_threshold;
    std::uint64_t budget;
    double slack;
    const std::vector<double>& dist_t;
    const std::vector<int>& hops_t;

    std::uint64_t expansions = 0;
    std::vector<char> visited;
    std::vector<int> path;
    std::vector<PathRecord> out;

    void dfs(int v, double w_so_far) {
        if (++expansions > budget)
            throw BudgetError("enumerate_paths: node-expansion budget exhausted");
        if (v == static_cast<int>(g.n)) {
            if (w_so_far <= weight_threshold)
                out.push_back(
                    {path, static_cast<int>(path.size()) - 1, w_so_far});
            return;
        }
        int hops_so_far = static_cast<int>(path.size()) - 1;
        for (auto& [w, len] : g.adj[static_cast<std::size_t>(v)]) {
            if (visited[static_cast<std::size_t>(w)]) continue;
            int ht = hops_t[static_cast<std::size_t>(w)];
            if (ht < 0 || hops_so_far + 1 + ht > hop_threshold) continue;
            double nw = w_so_far + len;
            if (nw + dist_t[static_cast<std::size_t>(w)] > weight_threshold + slack) continue;
            visited[static_cast<std::size_t>(w)] = 1;
            path.push_back(w);
            dfs(w, nw);
            path.pop_back();
            visited[static_cast<std::size_t>(w)] = 0;
        }
    }
};

}  // namespace

std::vector<PathRecord> enumerate_paths(const WeightedGraph& g, double weight_threshold,
                                        int hop_threshold, std::uint64_t budget) {
    if (hop_threshold < 1 || weight_threshold < 0.0 || g.n < 2) return {};
    std::vector<double> dist_t = dijkstra_from(g, static_cast<int>(g.n));
    if (dist_t[1] > weight_threshold * (1.0 + 1e-9)) return {};
    std::vector<int> hops_t = bfs_hops_from(g, static_cast<int>(g.n));

    Enumerator e{g,
                 weight_threshold,
                 hop_threshold,
                 budget,
                 1e-9 * (1.0 + std::abs(weight_threshold)),
                 dist_t,
                 hops_t};
    e.visited.assign(g.adj.size(), 0);
    e.visited[1] = 1;
    e.path.push_back(1);
    e.dfs(1, 0.0);
    return std::move(e.out);
}

MinRecord min_paths(const WeightedGraph& g, std::optional<double> lattice_span,
                    std::uint64_t budget) {
    MinRecord rec;
    std::vector<double> d1 = dijkstra_from(g, 1);
    double lmin = d1[static_cast<std::size_t>(g.n)];
    if (!std::isfinite(lmin)) return rec;  // disconnected, L_min = infinity

    rec.status = ConnStatus::connected;
    rec.l_min = lmin;

    // Enumerate ties; lattice models compare in integer lattice units,
    // continuous models by exact float equality (ties have probability 0).
    double threshold = lmin;
    if (lattice_span) threshold += *lattice_span * 1e-6;
    auto paths = enumerate_paths(g, threshold, static_cast<int>(g.n) - 1, budget);
    for (auto& p : paths) {
        bool tie;
        if (lattice_span) {
            double M = *lattice_span;
            tie = std::llround(p.weight / M) == std::llround(lmin / M);
        } else {
            tie = p.weight == lmin;
        }
        if (tie) rec.hopcounts.push_back(p.hops);
    }
    std::sort(rec.hopcounts.begin(), rec.hopcounts.end());
    rec.p_min = static_cast<int>(rec.hopcounts.size());
    return rec;
}

std::vector<PointSample> point_process(const std::vector<PathRecord>& paths,
                                       const ScalingSchedule& schedule,
                                       const LimitParams& params) {
    std::vector<PointSample> out;
    out.reserve(paths.size());
    const double denom = std::sqrt(params.beta * schedule.log_n);
    for (auto& p : paths)
        out.push_back({(p.hops - params.gamma * schedule.log_n) / denom,
                       p.weight - schedule.rho_n});
    return out;
}

bool crosses(const PathRecord& p1, const PathRecord& p2) {
    const auto& a = p1.vertices;
    const auto& b = p2.vertices;
    std::unordered_map<int, std::size_t> pos_b;
    pos_b.reserve(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) pos_b.emplace(b[j], j);

    auto prefixes_equal = [&](std::size_t i, std::size_t j) {
        if (i != j) return false;
        for (std::size_t k = 0; k <= i; ++k)
            if (a[k] != b[k]) return false;
        return true;
    };
    auto suffixes_equal = [&](std::size_t i, std::size_t j) {
        if (a.size() - i != b.size() - j) return false;
        for (std::size_t k = i, l = j; k < a.size(); ++k, ++l)
            if (a[k] != b[l]) return false;
        return true;
    };

    for (std::size_t i = 1; i + 1 < a.size(); ++i) {
        auto it = pos_b.find(a[i]);
        if (it == pos_b.end()) continue;
        std::size_t j = it->second;
        if (!prefixes_equal(i, j) && !suffixes_equal(i, j)) return true;
    }
    return false;
}

std::vector<PathRecord> uncrossed_filter(const std::vector<PathRecord>& paths) {
    std::vector<PathRecord> out;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        bool crossed = false;
        for (std::size_t j = 0; j < paths.size() && !crossed; ++j)
            if (j != i && crosses(paths[i], paths[j])) crossed = true;
        if (!crossed) out.push_back(paths[i]);
    }
    return out;
}

void dump_edge_list(const WeightedGraph& g, std::ostream& os) {
    os << g.n << " " << g.edge_count() << "\n";
    char buf[64];
    for (long long u = 1; u <= g.n; ++u) {
        for (auto& [v, w] : g.adj[static_cast<std::size_t>(u)]) {
            if (v < u) continue;  // each undirected edge once
            std::snprintf(buf, sizeof(buf), "%.17g", w);
            os << u << " " << v << " " << buf << "\n";
        }
    }
}

WeightedGraph load_edge_list(std::istream& is) {
    long long n = 0;
    std::size_t m = 0;
    if (!(is >> n >> m)) throw std::runtime_error("load_edge_list: bad header");
    if (n < 2) throw std::runtime_error("load_edge_list: bad vertex count");
    WeightedGraph g;
    g.n = n;
    g.adj.assign(static_cast<std::size_t>(n) + 1, {});
    for (std::size_t k = 0; k < m; ++k) {
        long long u, v;
        double w;
        if (!(is >> u >> v >> w)) throw std::runtime_error("load_edge_list: bad edge line");
        if (u < 1 || u > n || v < 1 || v > n || u == v || w < 0.0)
            throw std::runtime_error("load_edge_list: invalid edge");
        g.adj[static_cast<std::size_t>(u)].emplace_back(static_cast<int>(v), w);
        g.adj[static_cast<std::size_t>(v)].emplace_back(static_cast<int>(u), w);
    }
    return g;
}

}  // namespace fpp
