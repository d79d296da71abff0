#pragma once

#include <cstdint>
#include <vector>

#include "fpp/limit_params.hpp"
#include "fpp/rng.hpp"
#include "fpp/weights.hpp"

namespace fpp {

// E[W^r] and the tree sums M^(r) for r = 1..r_max, computed by two
// independent recursions; they must agree.
struct MomentTable {
    int r_max = 0;
    std::vector<double> ew;  // ew[r-1] = E[W^r]
    std::vector<double> mr;  // mr[r-1] = M^(r)
};

// One draw of W(depth) from the iteration W(1) = 1,
// W(k+1) = sum_{i<=D} e^{-alpha X_i} W_i(k), D ~ Poisson(lambda).
// Exact recursive tree realization; cost grows like lambda^depth, so keep
// depth small here and use sample_w_bank for mass production.
double sample_w_fixed_point(const LimitParams& params, const WeightModel& model, int depth,
                            RandomStream& rng);

// Draws inside one resampled pool are correlated; banks are built from
// independent sub-pools of this size, and standard errors over a bank
// should batch by sub-pool.
inline constexpr std::size_t w_pool_block = 10000;

// count draws of W(depth) by population iteration: a pool of samples of
// W(k) is pushed through the fixed-point map to give a pool for W(k+1),
// resampling parents from the previous pool. O(count * depth) instead of
// lambda^depth per draw; resampling bias is O(depth/pool size).
std::vector<double> sample_w_bank(const LimitParams& params, const WeightModel& model, int depth,
                                  std::size_t count, RandomStream& rng);

// Continuous-time Galton-Watson realization of W (requires P(X=0) = 0):
// individuals live ~F and leave Poisson(lambda) children; W is
// (sum of D population ratios N_i(t)/E[N(t)]) / lambda. E[N(t)] is
// estimated from pilot runs at construction.
class BranchingSampler {
  public:
    BranchingSampler(const LimitParams& params, const WeightModel& model, double t_horizon,
                     int pilot_reps, RandomStream& rng,
                     std::uint64_t population_cap = 50000000ULL);

    double sample(RandomStream& rng) const;
    double mean_population() const { return mean_population_; }

  private:
    std::uint64_t run_population(RandomStream& rng) const;

    LimitParams params_;
    WeightModel model_;
    double t_horizon_;
    std::uint64_t population_cap_;
    double mean_population_ = 0.0;
};

// E[W^r] for r = 1..r_max via the partition recursion (restricted growth
// string enumeration). Refuses r_max > 20.
std::vector<double> moments_w(const LimitParams& params, const WeightModel& model, int r_max);

// M^(r) for r = 1..r_max from the tree-sum recursion; independent code
// path from moments_w (its own partition enumeration and transforms).
std::vector<double> m_r_recursive(const LimitParams& params, const WeightModel& model, int r_max);

// Direct truncated evaluation of the marked-tree series: all trees with at
// most size_cap nodes. Nondecreasing in size_cap, converges to M^(r) from
// below. Supports 2 <= r <= 4, size_cap <= 12.
double m_r_tree_sum(const LimitParams& params, const WeightModel& model, int r, int size_cap);

MomentTable moment_table(const LimitParams& params, const WeightModel& model, int r_max);

// Enumerates all set partitions of {0,...,r-1}; visitor receives the block
// index of each element.
void for_each_partition(int r, const std::function<void(const std::vector<int>&, int)>& visit);

}  // namespace fpp
