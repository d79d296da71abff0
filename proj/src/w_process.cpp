#include "fpp/w_process.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "fpp/graph.hpp"  // BudgetError

namespace fpp {

void for_each_partition(int r, const std::function<void(const std::vector<int>&, int)>& visit) {
    // restricted growth strings: a[i] <= 1 + max(a[0..i-1])
    std::vector<int> a(static_cast<std::size_t>(r), 0);
    std::vector<int> b(static_cast<std::size_t>(r), 0);  // b[i] = max(a[0..i-1])
    for (;;) {
        int blocks = 0;
        for (int x : a) blocks = std::max(blocks, x + 1);
        visit(a, blocks);
        int i = r - 1;
        while (i > 0 && a[static_cast<std::size_t>(i)] == b[static_cast<std::size_t>(i)] + 1) --i;
        if (i == 0) return;
        ++a[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < r; ++j) {
            b[static_cast<std::size_t>(j)] =
                std::max(b[static_cast<std::size_t>(i)], a[static_cast<std::size_t>(i)]);
            a[static_cast<std::size_t>(j)] = 0;
        }
    }
}

std::vector<double> moments_w(const LimitParams& params, const WeightModel& model, int r_max) {
    if (r_max < 1) throw std::invalid_argument("moments_w: r_max must be >= 1");
    if (r_max > 20) throw std::invalid_argument("moments_w: r_max > 20 refused (Bell-number blowup)");
    const double lambda = params.lambda, alpha = params.alpha;

    std::vector<double> ew(static_cast<std::size_t>(r_max));
    ew[0] = 1.0;
    for (int r = 2; r <= r_max; ++r) {
        double sum = 0.0;
        for_each_partition(r, [&](const std::vector<int>& rgs, int blocks) {
            if (blocks == 1) return;  // exclude the whole-set partition
            std::vector<int> size(static_cast<std::size_t>(blocks), 0);
            for (int x : rgs) ++size[static_cast<std::size_t>(x)];
            double prod = 1.0;
            for (int s : size)
                prod *= lambda * model.laplace(s * alpha) * ew[static_cast<std::size_t>(s - 1)];
            sum += prod;
        });
        ew[static_cast<std::size_t>(r - 1)] = sum / (1.0 - lambda * model.laplace(r * alpha));
    }
    return ew;
}

namespace {

// partitions of {0..r-1} by recursing on the block of the smallest
// unassigned element; independent of the growth-string enumeration above
void partitions_by_smallest(std::vector<int>& elems, std::vector<int>& block_sizes,
                            const std::function<void(const std::vector<int>&)>& visit) {
    if (elems.empty()) {
        visit(block_sizes);
        return;
    }
    int head = elems.front();
    std::vector<int> rest(elems.begin() + 1, elems.end());
    int m = static_cast<int>(rest.size());
    for (std::uint32_t bits = 0; bits < (1u << m); ++bits) {
        std::vector<int> block{head}, remaining;
        for (int i = 0; i < m; ++i)
            ((bits >> i) & 1u ? block : remaining).push_back(rest[static_cast<std::size_t>(i)]);
        block_sizes.push_back(static_cast<int>(block.size()));
        partitions_by_smallest(remaining, block_sizes, visit);
        block_sizes.pop_back();
    }
}

}  // namespace

std::vector<double> m_r_recursive(const LimitParams& params, const WeightModel& model, int r_max) {
    if (r_max < 1) throw std::invalid_argument("m_r_recursive: r_max must be >= 1");
    if (r_max > 20)
        throw std::invalid_argument("m_r_recursive: r_max > 20 refused (Bell-number blowup)");
    const double lambda = params.lambda, alpha = params.alpha;

    std::vector<double> mr(static_cast<std::size_t>(r_max));
    mr[0] = 1.0;  // M^(1) := 1
    for (int r = 2; r <= r_max; ++r) {
        double sum = 0.0;
        std::vector<int> elems(static_cast<std::size_t>(r));
        for (int i = 0; i < r; ++i) elems[static_cast<std::size_t>(i)] = i;
        std::vector<int> sizes;
        partitions_by_smallest(elems, sizes, [&](const std::vector<int>& block_sizes) {
            if (block_sizes.size() == 1) return;
            double prod = 1.0;
            for (int s : block_sizes)
                prod *= lambda * model.laplace(s * alpha) * mr[static_cast<std::size_t>(s - 1)];
            sum += prod;
        });
        mr[static_cast<std::size_t>(r - 1)] = sum / (1.0 - lambda * model.laplace(r * alpha));
    }
    return mr;
}

double m_r_tree_sum(const LimitParams& params, const WeightModel& model, int r, int size_cap) {
    if (r < 2 || r > 4) throw std::invalid_argument("m_r_tree_sum: r must be in [2,4]");
    if (size_cap < 1 || size_cap > 12)
        throw std::invalid_argument("m_r_tree_sum: size_cap must be in [1,12]");
    const double lambda = params.lambda, alpha = params.alpha;

    // candidate marks: subsets of [r] with at least two elements
    std::vector<std::uint32_t> marks;
    const std::uint32_t full = (1u << r) - 1u;
    for (std::uint32_t m = 0; m <= full; ++m)
        if (__builtin_popcount(m) >= 2) marks.push_back(m);

    // f[mask][s] = weighted sum over subtrees with root mark `mask` and
    // exactly s nodes, by increasing mark cardinality
    std::map<std::uint32_t, std::vector<double>> f;
    std::sort(marks.begin(), marks.end(), [](std::uint32_t a, std::uint32_t b) {
        int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
        return pa != pb ? pa < pb : a < b;
    });

    for (std::uint32_t mask : marks) {
        std::vector<double> fm(static_cast<std::size_t>(size_cap) + 1, 0.0);
        fm[1] = 1.0;  // bare node

        // collections of pairwise disjoint child marks inside `mask`
        // (a single child may repeat the parent mark: the chain case)
        std::vector<std::uint32_t> inside;
        for (std::uint32_t m : marks)
            if ((m & mask) == m) inside.push_back(m);

        std::vector<std::vector<std::uint32_t>> collections;
        std::vector<std::uint32_t> cur;
        std::function<void(std::size_t, std::uint32_t)> pick = [&](std::size_t from,
                                                                   std::uint32_t used) {
            if (!cur.empty()) collections.push_back(cur);
            for (std::size_t i = from; i < inside.size(); ++i) {
                if (inside[i] & used) continue;
                cur.push_back(inside[i]);
                pick(i + 1, used | inside[i]);
                cur.pop_back();
            }
        };
        pick(0, 0);

        for (int s = 2; s <= size_cap; ++s) {
            double total = 0.0;
            for (auto& coll : collections) {
                // distribute the s-1 non-root nodes over the child subtrees
                std::vector<double> conv(static_cast<std::size_t>(s), 0.0);
                conv[0] = 1.0;
                double edge_factor = 1.0;
                for (std::uint32_t child : coll) {
                    edge_factor *=
                        lambda * model.laplace(__builtin_popcount(child) * alpha);
                    const auto& fc = child == mask ? fm : f.at(child);
                    std::vector<double> next(static_cast<std::size_t>(s), 0.0);
                    for (int a = 0; a < s; ++a) {
                        if (conv[static_cast<std::size_t>(a)] == 0.0) continue;
                        for (int b = 1; a + b < s; ++b)
                            next[static_cast<std::size_t>(a + b)] +=
                                conv[static_cast<std::size_t>(a)] *
                                fc[static_cast<std::size_t>(b)];
                    }
                    conv = std::move(next);
                }
                total += edge_factor * conv[static_cast<std::size_t>(s - 1)];
            }
            fm[static_cast<std::size_t>(s)] = total;
        }
        f[mask] = std::move(fm);
    }

    double sum = 0.0;
    for (int s = 1; s <= size_cap; ++s) sum += f.at(full)[static_cast<std::size_t>(s)];
    return sum;
}

MomentTable moment_table(const LimitParams& params, const WeightModel& model, int r_max) {
    MomentTable t;
    t.r_max = r_max;
    t.ew = moments_w(params, model, r_max);
    t.mr = m_r_recursive(params, model, r_max);
    return t;
}

double sample_w_fixed_point(const LimitParams& params, const WeightModel& model, int depth,
                            RandomStream& rng) {
    if (depth < 1) throw std::invalid_argument("sample_w_fixed_point: depth must be >= 1");
    if (depth == 1) return 1.0;
    int d = rng.poisson(params.lambda);
    double sum = 0.0;
    for (int i = 0; i < d; ++i) {
        double x = model.sample(rng);
        sum += std::exp(-params.alpha * x) * sample_w_fixed_point(params, model, depth - 1, rng);
    }
    return sum;
}

std::vector<double> sample_w_bank(const LimitParams& params, const WeightModel& model, int depth,
                                  std::size_t count, RandomStream& rng) {
    if (depth < 1) throw std::invalid_argument("sample_w_bank: depth must be >= 1");
    // Independent sub-pools: resampling parents inside one pool makes its
    // draws correlated (the pool mean drifts like a multiplicative random
    // walk across levels), so the bank is built from blocks of at most
    // w_pool_block samples evolved separately. Error bars over the bank
    // should batch by block.
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t start = 0; start < count; start += w_pool_block) {
        std::size_t len = std::min(w_pool_block, count - start);
        std::vector<double> pool(len, 1.0);  // W(1) = 1
        std::vector<double> next(len);
        for (int level = 2; level <= depth; ++level) {
            for (std::size_t i = 0; i < len; ++i) {
                int d = rng.poisson(params.lambda);
                double sum = 0.0;
                for (int j = 0; j < d; ++j) {
                    double x = model.sample(rng);
                    sum += std::exp(-params.alpha * x) * pool[rng.uniform_below(len)];
                }
                next[i] = sum;
            }
            std::swap(pool, next);
        }
        out.insert(out.end(), pool.begin(), pool.end());
    }
    return out;
}

BranchingSampler::BranchingSampler(const LimitParams& params, const WeightModel& model,
                                   double t_horizon, int pilot_reps, RandomStream& rng,
                                   std::uint64_t population_cap)
    : params_(params), model_(model), t_horizon_(t_horizon), population_cap_(population_cap) {
    if (model.prob_zero() > 0.0)
        throw std::invalid_argument("BranchingSampler: requires P(X=0) = 0");
    if (t_horizon <= 0.0) throw std::invalid_argument("BranchingSampler: t_horizon must be > 0");
    if (pilot_reps < 1) throw std::invalid_argument("BranchingSampler: pilot_reps must be >= 1");
    double total = 0.0;
    for (int i = 0; i < pilot_reps; ++i)
        total += static_cast<double>(run_population(rng));
    mean_population_ = total / pilot_reps;
    if (mean_population_ <= 0.0)
        throw std::runtime_error("BranchingSampler: pilot population estimate is zero");
}

std::uint64_t BranchingSampler::run_population(RandomStream& rng) const {
    // individuals are (birth time); alive at t iff birth <= t < death
    std::vector<double> stack{0.0};
    std::uint64_t alive = 0, born = 1;
    while (!stack.empty()) {
        double birth = stack.back();
        stack.pop_back();
        double death = birth + model_.sample(rng);
        if (death > t_horizon_) {
            ++alive;
            continue;
        }
        int d = rng.poisson(params_.lambda);
        born += static_cast<std::uint64_t>(d);
        if (born > population_cap_)
            throw BudgetError("BranchingSampler: population cap exceeded");
        for (int i = 0; i < d; ++i) stack.push_back(death);
    }
    return alive;
}

double BranchingSampler::sample(RandomStream& rng) const {
    int d = rng.poisson(params_.lambda);
    double sum = 0.0;
    for (int i = 0; i < d; ++i)
        sum += static_cast<double>(run_population(rng)) / mean_population_;
    return sum / params_.lambda;
}

}  // namespace fpp
