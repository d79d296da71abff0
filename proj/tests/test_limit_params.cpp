#include <doctest.h>

#include <cmath>

#include "fpp/limit_params.hpp"

using namespace fpp;

TEST_CASE("exponential weights, lambda = 2: everything is exact") {
    auto p = build_params(WeightModel::exponential(1.0), 2.0);
    CHECK(p.alpha == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.nu_bar == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.sigma2_bar == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(p.beta == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(p.gamma == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(p.eta == doctest::Approx(0.2031878700).epsilon(1e-8));
    CHECK_FALSE(p.span.has_value());
}

TEST_CASE("two-point weights on {1,2}") {
    auto p = build_params(WeightModel::finite_support({{1.0, 0.5}, {2.0, 0.5}}), 2.0);
    CHECK(p.alpha == doctest::Approx(0.4812118250596034).epsilon(1e-12));
    // e^{-alpha} is the golden-ratio conjugate here, nu_bar = 1 + 1/phi^2
    CHECK(p.nu_bar == doctest::Approx(1.3819660112501051).epsilon(1e-10));
    REQUIRE(p.span.has_value());
    CHECK(*p.span == doctest::Approx(1.0));
}

TEST_CASE("zero mixture keeps a Malthusian parameter while q*lambda < 1") {
    auto p = build_params(WeightModel::zero_mix(0.25, WeightModel::exponential(1.0)), 2.0);
    CHECK(p.alpha == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(p.nu_bar == doctest::Approx(1.0 / 6.0).epsilon(1e-10));
    // q*lambda >= 1: zero-weight subgraph percolates, model refused
    CHECK_THROWS(build_params(WeightModel::zero_mix(0.6, WeightModel::exponential(1.0)), 2.0));
    CHECK_THROWS(solve_alpha(WeightModel::zero_mix(0.5, WeightModel::exponential(1.0)), 2.0));
}

TEST_CASE("extinction probability of Poisson branching") {
    CHECK(eta_lambda(2.0) == doctest::Approx(0.2031878700).epsilon(1e-7));
    CHECK(eta_lambda(4.0) == doctest::Approx(0.0198270060).epsilon(1e-6));
    // near criticality eta ~ 1 - 2(lambda-1)
    CHECK(eta_lambda(1.0001) == doctest::Approx(0.9998).epsilon(1e-3));
    CHECK_THROWS(eta_lambda(1.0));
    CHECK_THROWS(eta_lambda(0.5));
}

TEST_CASE("subcritical requirement lambda > 1") {
    CHECK_THROWS(build_params(WeightModel::exponential(1.0), 1.0));
    CHECK_THROWS(build_params(WeightModel::exponential(1.0), 0.9));
}

TEST_CASE("scaling schedule") {
    auto exp_p = build_params(WeightModel::exponential(1.0), 2.0);
    auto s = schedule(exp_p, 10000);
    CHECK(s.log_n == doctest::Approx(std::log(10000.0)).epsilon(1e-14));
    CHECK(s.rho_n == doctest::Approx(std::log(10000.0)).epsilon(1e-12));  // alpha = 1
    CHECK(s.tau_n == doctest::Approx(1.0));

    auto lat = build_params(WeightModel::finite_support({{1.0, 0.5}, {2.0, 0.5}}), 2.0);
    auto sl = schedule(lat, 10000);
    // rho_n is the largest lattice point <= log(n)/alpha
    double target = std::log(10000.0) / lat.alpha;
    CHECK(sl.rho_n <= target);
    CHECK(target - sl.rho_n < 1.0);
    CHECK(sl.rho_n == doctest::Approx(std::round(sl.rho_n)));  // on the unit lattice
    CHECK(sl.tau_n == doctest::Approx(std::exp(lat.alpha * (target - sl.rho_n))).epsilon(1e-12));
    CHECK(sl.tau_n >= 1.0);
    CHECK(sl.tau_n < std::exp(lat.alpha));

    double theta = subsequence_offset(lat, 10000);
    CHECK(theta <= 0.0);
    CHECK(theta > -1.0);
    CHECK(theta == doctest::Approx(sl.rho_n - target).epsilon(1e-12));
    CHECK_THROWS(subsequence_offset(exp_p, 10000));
}

TEST_CASE("hop window endpoint") {
    auto p = build_params(WeightModel::exponential(1.0), 2.0);
    long long n = 10000;
    double ln = std::log(static_cast<double>(n));
    CHECK(k_n(p, n, 0.0) == static_cast<long long>(std::floor(p.gamma * ln)));
    CHECK(k_n(p, n, 1.0) ==
          static_cast<long long>(std::floor(p.gamma * ln + std::sqrt(p.beta * ln))));
    CHECK(k_n(p, n, -100.0) < 1);  // empty window is representable
}
