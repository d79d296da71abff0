#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "fpp/graph.hpp"
#include "fpp/limit_params.hpp"
#include "fpp/rng.hpp"
#include "fpp/stats.hpp"
#include "fpp/w_process.hpp"

namespace fpp {

// The deterministic part of the limiting intensity. The point process
// limit is Cox: Poisson with random intensity W1 W2 times this measure
// (times e^{alpha theta} in the lattice case).
struct IntensitySpec {
    LimitParams params;
    bool arithmetic = false;
    double theta = 0.0;  // in (-M, 0], lattice case only

    static IntensitySpec nonarithmetic(const LimitParams& params);
    static IntensitySpec lattice(const LimitParams& params, double theta);
};

// Query rectangle (z_lo, z_hi] x (u_lo, u_hi]; infinities allowed except
// u_hi = +inf where the intensity mass diverges.
struct Rect {
    double z_lo, z_hi, u_lo, u_hi;
};

// Lambda((-inf, z] x (-inf, u]), the deterministic cumulative intensity.
double lambda_mass(const IntensitySpec& spec, double z, double u);

double lambda_mass_rect(const IntensitySpec& spec, const Rect& rect);

// lambda_mass_rect times the lattice offset factor e^{alpha theta}; the
// per-unit-W1W2 Poisson mean of the limit process on the rectangle.
double mean_mass(const IntensitySpec& spec, const Rect& rect);

// One conditional draw of the limit process given (w1, w2): Poisson count,
// z i.i.d. truncated standard normal, u i.i.d. from the normalized
// restriction of the weight-axis measure (exact lattice atoms when
// arithmetic). Throws std::domain_error when the rectangle has infinite
// mass (u_hi = +inf).
std::vector<PointSample> sample_cox(const IntensitySpec& spec, double w1, double w2,
                                    const Rect& rect, RandomStream& rng);

// Limit law of the minimal path, non-lattice case:
// P(H-standardized <= z, L_min - log(n)/alpha <= u) ->
// Phi(z) (1 - E[exp(-W1 W2 e^{alpha u}/(alpha nu_bar))]), the expectation
// replaced by a Monte Carlo mean over the supplied bank of (W1, W2) pairs.
MeanStderr cdf_joint_min(const IntensitySpec& spec, double z, double u,
                         const std::vector<std::pair<double, double>>& w_bank);

// P(N_(1) <= z_1, ..., N_(k) <= z_k) for the order statistics of k i.i.d.
// standard normals: exact multinomial enumeration for k <= 4, Monte Carlo
// with 10^6 draws beyond (needs the rng then).
double order_stat_prob(const std::vector<double>& z_vec, RandomStream* rng = nullptr);

// Limit pmf of (L_min - rho_n = u, P_min = k, ordered hopcount z-scores
// below z_vec) in the lattice case: with a_u = M W1 W2 e^{alpha(theta+u)}/nu_bar,
// E[ exp(-a_u/(e^{alpha M}-1)) a_u^k e^{-a_u} / k! ] times the order
// statistic probability. Expectation over the bank.
MeanStderr pmf_arithmetic_min(const IntensitySpec& spec, double u, int k,
                              const std::vector<double>& z_vec,
                              const std::vector<std::pair<double, double>>& w_bank,
                              RandomStream* rng = nullptr);

// Limit of the r-th factorial moment of the point count on the rectangle:
// mean_mass^r (E[W^r])^2.
double factorial_moment_limit(const IntensitySpec& spec, const Rect& rect, int r,
                              const MomentTable& table);

// (1 - eta)^2, the limiting two-endpoint connectivity probability.
double connect_prob_limit(const LimitParams& params);

// plain text persistence for (W1, W2) banks: "count" header then one
// "%.17g %.17g" pair per line
void save_w_pairs(const std::vector<std::pair<double, double>>& bank, std::ostream& os);
std::vector<std::pair<double, double>> load_w_pairs(std::istream& is);

}  // namespace fpp
