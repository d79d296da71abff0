#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fpp/rng.hpp"
#include "vendor_json.hpp"

namespace fpp {

enum class WeightKind { exponential, uniform, finite_support, zero_mix };

struct TiltedMoments {
    double nu_bar = 0.0;     // E[X~]
    double sigma2_bar = 0.0; // Var(X~)
};

// A non-negative, non-degenerate edge-weight distribution from the closed
// family {exponential, uniform, finite support, zero mixture}. Closed-form
// Laplace transform R(s) = E[e^{-sX}] and tilted moments are available for
// every member, which is what the Malthusian-parameter solver needs.
// Immutable after construction.
class WeightModel {
  public:
    static WeightModel exponential(double rate);
    static WeightModel uniform_interval(double lo, double hi);
    static WeightModel finite_support(std::vector<std::pair<double, double>> support,
                                      std::optional<double> declared_span = std::nullopt);
    // q = P(X = 0), tail must be a continuous model (exponential or uniform
    // with positive support)
    static WeightModel zero_mix(double q, WeightModel tail);

    WeightKind kind() const { return kind_; }

    // R(s) = E[e^{-sX}], s >= 0
    double laplace(double s) const;
    // E[X e^{-sX}] = -R'(s)
    double mean_tilt(double s) const;
    // E[X^2 e^{-sX}] = R''(s)
    double mean_sq_tilt(double s) const;

    double prob_zero() const;
    double mean() const;

    double sample(RandomStream& rng) const;
    // draw from the tilted law dF~ = lambda e^{-alpha x} dF
    double sample_tilted(double lambda, double alpha, RandomStream& rng) const;

    // Largest M with all support in M*Z: gcd construction on finite support
    // (values taken as rationals with denominator <= max_denominator), none
    // for models with a continuous part. A declared span overrides and is
    // verified against the support.
    std::optional<double> detect_span(std::uint64_t max_denominator = 1000000) const;

    TiltedMoments tilt_moments(double lambda, double alpha) const;

    nlohmann::json to_json() const;
    static WeightModel from_json(const nlohmann::json& j);
    std::string describe() const;

    // accessors for the per-kind parameters
    double rate() const { return rate_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double q() const { return q_; }
    const std::vector<std::pair<double, double>>& support() const { return support_; }
    const WeightModel& tail() const;

  private:
    WeightModel() = default;

    WeightKind kind_ = WeightKind::exponential;
    double rate_ = 1.0;                                  // exponential
    double lo_ = 0.0, hi_ = 1.0;                         // uniform
    std::vector<std::pair<double, double>> support_;     // finite_support
    std::optional<double> declared_span_;
    double q_ = 0.0;                                     // zero_mix
    std::shared_ptr<const WeightModel> tail_;            // zero_mix
};

}  // namespace fpp
