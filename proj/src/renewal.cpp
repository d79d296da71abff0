#include "fpp/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "fpp/stats.hpp"

namespace fpp {

namespace {

// number of l-terms needed so the geometric 2*alpha-tilt tail bound
// e^{2 alpha x} q^{l} / (1 - q), q = lambda R(2 alpha) < 1, drops below tol
int truncation_length(const WeightModel& model, double lambda, double alpha, double x,
                      double tol) {
    double q = lambda * model.laplace(2.0 * alpha);
    if (!(q < 1.0)) throw std::runtime_error("renewal: lambda R(2 alpha) >= 1");
    double log_bound = 2.0 * alpha * x - std::log1p(-q);
    // q^l <= tol e^{-2 alpha x} (1-q)
    double l = (std::log(tol) - log_bound) / std::log(q);
    return std::max(1, static_cast<int>(std::ceil(l)) + 1);
}

RenewalEval lattice_dp(const WeightModel& model, double lambda, double alpha, double x) {
    auto span = model.detect_span();
    if (!span) throw std::logic_error("renewal: lattice DP needs an arithmetic model");
    const double M = *span;
    const long long J = static_cast<long long>(std::floor(x / M + 1e-9));

    // support as lattice steps
    std::vector<std::pair<long long, double>> steps;
    for (auto& [v, p] : model.support())
        steps.emplace_back(std::llround(v / M), p);

    std::vector<double> dist(static_cast<std::size_t>(J) + 1, 0.0);
    dist[0] = 1.0;  // S_0 = 0
    double value = 1.0;
    double weight = 1.0;  // lambda^l
    int l_max = truncation_length(model, lambda, alpha, x, 1e-12);
    for (int l = 1; l <= l_max; ++l) {
        std::vector<double> next(static_cast<std::size_t>(J) + 1, 0.0);
        double below = 0.0;
        for (long long j = 0; j <= J; ++j) {
            double pj = dist[static_cast<std::size_t>(j)];
            if (pj == 0.0) continue;
            for (auto& [step, p] : steps) {
                long long t = j + step;
                if (t <= J) next[static_cast<std::size_t>(t)] += pj * p;
            }
        }
        for (double p : next) below += p;
        if (below == 0.0) break;  // positive min step: S_l has left the window
        weight *= lambda;
        value += weight * below;
        dist = std::move(next);
    }
    return {x, value, RenewalMethod::lattice_dp, std::nullopt};
}

}  // namespace

RenewalEval V_monte_carlo(const WeightModel& model, double lambda, double alpha, double x,
                          std::size_t paths, RandomStream& rng) {
    if (x < 0.0) throw std::domain_error("V: x must be >= 0");
    if (paths == 0) throw std::invalid_argument("V_monte_carlo: paths must be > 0");
    int l_max = truncation_length(model, lambda, alpha, x, 1e-12);
    std::vector<double> vals(paths);
    for (std::size_t i = 0; i < paths; ++i) {
        // sum of lambda^l over the l with S_l <= x; weights are
        // non-negative so the walk can be stopped at the first exit
        double s = 0.0, v = 1.0, w = 1.0;
        for (int l = 1; l <= l_max; ++l) {
            s += model.sample(rng);
            if (s > x) break;
            w *= lambda;
            v += w;
        }
        vals[i] = v;
    }
    auto ms = mean_stderr(vals);
    return {x, ms.mean, RenewalMethod::monte_carlo, ms.stderr_};
}

RenewalEval V(const WeightModel& model, double lambda, double alpha, double x,
              std::size_t mc_paths, std::uint64_t mc_seed) {
    if (x < 0.0) throw std::domain_error("V: x must be >= 0");
    if (model.kind() == WeightKind::exponential) {
        double r = model.rate();
        double value = 1.0 + lambda / (lambda - 1.0) * std::expm1((lambda - 1.0) * r * x);
        return {x, value, RenewalMethod::closed_form, std::nullopt};
    }
    if (model.kind() == WeightKind::finite_support && model.detect_span())
        return lattice_dp(model, lambda, alpha, x);
    RandomStream rng = RandomStream::derive(mc_seed, "renewal", 0);
    return V_monte_carlo(model, lambda, alpha, x, mc_paths, rng);
}

double renewal_limit(const LimitParams& params) {
    if (params.span) {
        double M = *params.span;
        return M / ((1.0 - std::exp(-params.alpha * M)) * params.nu_bar);
    }
    return 1.0 / (params.alpha * params.nu_bar);
}

double uniform_bound_check(const WeightModel& model, double lambda, double alpha,
                           const std::vector<double>& grid) {
    double best = 0.0;
    for (double x : grid) {
        RenewalEval e = V(model, lambda, alpha, x);
        best = std::max(best, (e.value - 1.0) * std::exp(-alpha * x));
    }
    return best;
}

void ratio_table(const WeightModel& model, double lambda, double alpha,
                 const std::vector<double>& grid, std::ostream& os) {
    os << "x,V,ratio,method,stderr\n";
    char buf[160];
    for (double x : grid) {
        RenewalEval e = V(model, lambda, alpha, x);
        const char* method = e.method == RenewalMethod::closed_form ? "closed_form"
                             : e.method == RenewalMethod::lattice_dp ? "lattice_dp"
                                                                     : "monte_carlo";
        double ratio = e.value * std::exp(-alpha * x);
        if (e.stderr_)
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%s,%.17g\n", x, e.value, ratio,
                          method, *e.stderr_);
        else
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%s,\n", x, e.value, ratio, method);
        os << buf;
    }
}

}  // namespace fpp
