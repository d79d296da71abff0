#pragma once

#include <cstdint>
#include <optional>

#include "fpp/weights.hpp"

namespace fpp {

// All constants derived from (F, lambda): the Malthusian parameter alpha,
// the tilted-law moments, the CLT scalings beta and gamma, the extinction
// probability eta, and for arithmetic weights the span M.
struct LimitParams {
    double lambda = 0.0;
    double alpha = 0.0;
    double nu_bar = 0.0;
    double sigma2_bar = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double eta = 0.0;
    std::optional<double> span;   // set iff the weight law is arithmetic
    std::optional<double> theta;  // lattice offset rho_n - log(n)/alpha, bound to an n

    nlohmann::json to_json() const;
};

// n-dependent centering rho_n and the lattice correction factor tau_n.
struct ScalingSchedule {
    long long n = 0;
    double rho_n = 0.0;
    double tau_n = 1.0;
    double log_n = 0.0;
};

// Unique positive root of lambda * R(alpha) = 1 (bisection + Newton).
// Requires lambda * P(X=0) < 1, otherwise the zero-weight subgraph is not
// subcritical and the model is rejected.
double solve_alpha(const WeightModel& model, double lambda);

// Smallest fixed point of s -> e^{lambda(s-1)} in [0,1), lambda > 1.
double eta_lambda(double lambda);

LimitParams build_params(const WeightModel& model, double lambda);

ScalingSchedule schedule(const LimitParams& params, long long n);

// floor(z * sqrt(beta log n) + gamma log n); may be < 1 (empty hop window)
long long k_n(const LimitParams& params, long long n, double z);

// rho_n - log(n)/alpha in (-M, 0]; arithmetic models only
double subsequence_offset(const LimitParams& params, long long n);

}  // namespace fpp
