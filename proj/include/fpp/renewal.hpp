#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "fpp/limit_params.hpp"
#include "fpp/rng.hpp"
#include "fpp/weights.hpp"

namespace fpp {

enum class RenewalMethod { closed_form, lattice_dp, monte_carlo };

// One evaluation of V(x) = sum_l lambda^l P(S_l <= x).
struct RenewalEval {
    double x = 0.0;
    double value = 1.0;  // >= 1, the l=0 term
    RenewalMethod method = RenewalMethod::closed_form;
    std::optional<double> stderr_;  // present iff monte_carlo
};

// Evaluates V(x). Exponential weights use the closed form
// 1 + lambda/(lambda-1) (e^{(lambda-1) rate x} - 1); lattice weights use an
// exact convolution DP; everything else falls back to Monte Carlo with
// mc_paths sample paths. The l-sum is truncated via the 2*alpha tilt:
// lambda^l P(S_l <= x) <= e^{2 alpha x} (lambda R(2 alpha))^l, geometric.
RenewalEval V(const WeightModel& model, double lambda, double alpha, double x,
              std::size_t mc_paths = 200000, std::uint64_t mc_seed = 12345);

// Forced Monte Carlo evaluation (any model), used to cross-check the
// closed form and the DP.
RenewalEval V_monte_carlo(const WeightModel& model, double lambda, double alpha, double x,
                          std::size_t paths, RandomStream& rng);

// lim V(x)/e^{alpha x}: 1/(alpha nu_bar), or M/((1-e^{-alpha M}) nu_bar)
// along the lattice for arithmetic models.
double renewal_limit(const LimitParams& params);

// max over the grid of (V(x)-1)/e^{alpha x}: an empirical stand-in for the
// uniform constant C in V(x)-1 <= C e^{alpha x}.
double uniform_bound_check(const WeightModel& model, double lambda, double alpha,
                           const std::vector<double>& grid);

// CSV rows "x,V,ratio,method,stderr" for plotting V(x) e^{-alpha x} vs x.
void ratio_table(const WeightModel& model, double lambda, double alpha,
                 const std::vector<double>& grid, std::ostream& os);

}  // namespace fpp
