#include "fpp/limit_params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fpp {

double solve_alpha(const WeightModel& model, double lambda) {
    if (lambda <= 1.0) throw std::domain_error("solve_alpha: lambda must exceed 1");
    if (lambda * model.prob_zero() >= 1.0)
        throw std::domain_error(
            "supercritical zero-weight subgraph: lambda * P(X=0) >= 1 is out of scope");

    auto f = [&](double s) { return lambda * model.laplace(s) - 1.0; };

    // R(0)=1 and R(inf)=P(X=0) with lambda*P(X=0)<1 guarantee a bracket
    double lo = 0.0, hi = 1.0;
    while (f(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) throw std::runtime_error("solve_alpha: failed to bracket the root");
    }

    while (hi - lo > 1e-8) {
        double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }

    // Newton polishing with analytic R'(s) = -E[X e^{-sX}]
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 8; ++it) {
        double val = f(s);
        double deriv = -lambda * model.mean_tilt(s);
        if (deriv == 0.0) break;
        double step = val / deriv;
        s -= step;
        s = std::clamp(s, lo, hi);  // keep the iterate inside the bracket
        if (std::abs(step) < 1e-15 * std::max(1.0, s)) break;
    }
    if (std::abs(f(s)) > 1e-12)
        throw std::runtime_error("solve_alpha: solver did not reach tolerance");
    return s;
}

double eta_lambda(double lambda) {
    if (lambda <= 1.0) throw std::domain_error("eta_lambda: lambda must exceed 1");
    // monotone iteration from 0 converges to the smallest fixed point in [0,1)
    double s = 0.0;
    for (int it = 0; it < 100000; ++it) {
        double next = std::exp(lambda * (s - 1.0));
        if (std::abs(next - s) < 1e-15) return next;
        s = next;
    }
    return s;
}

LimitParams build_params(const WeightModel& model, double lambda) {
    LimitParams p;
    p.lambda = lambda;
    p.alpha = solve_alpha(model, lambda);
    TiltedMoments tm = model.tilt_moments(lambda, p.alpha);
    p.nu_bar = tm.nu_bar;
    p.sigma2_bar = tm.sigma2_bar;
    p.beta = tm.sigma2_bar / (p.alpha * tm.nu_bar * tm.nu_bar * tm.nu_bar);
    p.gamma = 1.0 / (p.alpha * tm.nu_bar);
    p.eta = eta_lambda(lambda);
    p.span = model.detect_span();
    return p;
}

ScalingSchedule schedule(const LimitParams& params, long long n) {
    if (n < 2) throw std::domain_error("schedule: n must be >= 2");
    ScalingSchedule s;
    s.n = n;
    s.log_n = std::log(static_cast<double>(n));
    if (params.span) {
        double M = *params.span;
        s.rho_n = M * std::floor(s.log_n / (M * params.alpha));
        s.tau_n = static_cast<double>(n) * std::exp(-params.alpha * s.rho_n);
    } else {
        s.rho_n = s.log_n / params.alpha;
        s.tau_n = 1.0;
    }
    return s;
}

long long k_n(const LimitParams& params, long long n, double z) {
    if (n < 2) throw std::domain_error("k_n: n must be >= 2");
    double log_n = std::log(static_cast<double>(n));
    return static_cast<long long>(
        std::floor(z * std::sqrt(params.beta * log_n) + params.gamma * log_n));
}

double subsequence_offset(const LimitParams& params, long long n) {
    if (!params.span) throw std::invalid_argument("subsequence_offset: non-arithmetic model");
    ScalingSchedule s = schedule(params, n);
    return s.rho_n - s.log_n / params.alpha;
}

nlohmann::json LimitParams::to_json() const {
    nlohmann::json j{{"lambda", lambda},   {"alpha", alpha}, {"nu_bar", nu_bar},
                     {"sigma2_bar", sigma2_bar}, {"beta", beta},   {"gamma", gamma},
                     {"eta", eta}};
    if (span) j["span"] = *span;
    if (theta) j["theta"] = *theta;
    return j;
}

}  // namespace fpp
