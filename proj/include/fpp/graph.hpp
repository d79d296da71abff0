#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fpp/limit_params.hpp"
#include "fpp/rng.hpp"
#include "fpp/weights.hpp"

namespace fpp {

// Thrown when path enumeration exceeds its node-expansion budget.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Undirected weighted graph on vertices 1..n, each undirected edge stored
// in both adjacency lists. Immutable after generation.
struct WeightedGraph {
    long long n = 0;
    std::vector<std::vector<std::pair<int, double>>> adj;  // 1-based, adj[0] unused

    std::size_t edge_count() const;
};

// A simple path from vertex 1 to vertex n.
struct PathRecord {
    std::vector<int> vertices;  // starts at 1, ends at n, all distinct
    int hops = 0;               // vertices.size() - 1
    double weight = 0.0;        // sum of edge weights in path order
};

struct PointSample {
    double z = 0.0;  // (H - gamma log n) / sqrt(beta log n)
    double u = 0.0;  // L - rho_n
};

enum class ConnStatus { connected, disconnected };

struct MinRecord {
    ConnStatus status = ConnStatus::disconnected;
    double l_min = std::numeric_limits<double>::infinity();
    int p_min = 0;
    std::vector<int> hopcounts;  // ascending, one per minimal path
};

// G(n, lambda/n) with i.i.d. edge weights; geometric skipping over the
// C(n,2) vertex pairs so generation is O(#edges).
WeightedGraph generate(long long n, double lambda, const WeightModel& model, RandomStream& rng);

// Dijkstra distances from src (infinity when unreachable). Handles zero
// edge weights.
std::vector<double> dijkstra_from(const WeightedGraph& g, int src);

// BFS hop distances from src (-1 when unreachable).
std::vector<int> bfs_hops_from(const WeightedGraph& g, int src);

// All simple paths p from 1 to n with L(p) <= weight_threshold and
// H(p) <= hop_threshold. Depth-first extension pruned by Dijkstra-to-target
// and BFS-to-target lower bounds. Output order unspecified.
std::vector<PathRecord> enumerate_paths(const WeightedGraph& g, double weight_threshold,
                                        int hop_threshold,
                                        std::uint64_t budget = 100000000ULL);

// L_min, P_min and the ordered hopcounts of all minimal-weight paths.
// For arithmetic models pass the span so tie detection runs in exact
// lattice integers; otherwise ties require exact float equality.
MinRecord min_paths(const WeightedGraph& g, std::optional<double> lattice_span = std::nullopt,
                    std::uint64_t budget = 100000000ULL);

std::vector<PointSample> point_process(const std::vector<PathRecord>& paths,
                                       const ScalingSchedule& schedule,
                                       const LimitParams& params);

// True iff the two paths have a maximal joint segment containing neither
// endpoint: a shared vertex v (not 1 or n) whose 1->v prefixes differ and
// whose v->n suffixes differ.
bool crosses(const PathRecord& p1, const PathRecord& p2);

// Keeps the paths not crossed by any other path of the window.
std::vector<PathRecord> uncrossed_filter(const std::vector<PathRecord>& paths);

// Plain edge-list text format: "n m" header, then "u v weight" per line.
void dump_edge_list(const WeightedGraph& g, std::ostream& os);
WeightedGraph load_edge_list(std::istream& is);

}  // namespace fpp
