#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fpp/renewal.hpp"

using namespace fpp;

TEST_CASE("exponential closed form") {
    auto model = WeightModel::exponential(1.0);
    auto e = V(model, 2.0, 1.0, 1.0);
    CHECK(e.method == RenewalMethod::closed_form);
    CHECK(e.value == doctest::Approx(1.0 + 2.0 * (std::exp(1.0) - 1.0)).epsilon(1e-14));
    CHECK(e.value == doctest::Approx(4.43656365691809).epsilon(1e-12));
    CHECK(V(model, 2.0, 1.0, 0.0).value == doctest::Approx(1.0));
    // ratio V(x)/e^{alpha x} -> lambda/(lambda-1) * ... = 2 here
    double x = 20.0;
    CHECK(V(model, 2.0, 1.0, x).value / std::exp(x) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK_THROWS(V(model, 2.0, 1.0, -0.5));
}

TEST_CASE("lattice convolution is exact") {
    auto model = WeightModel::finite_support({{1.0, 0.5}, {2.0, 0.5}});
    double alpha = solve_alpha(model, 2.0);
    auto e = V(model, 2.0, alpha, 2.0);
    CHECK(e.method == RenewalMethod::lattice_dp);
    // l=0: 1, l=1: 2*P(S1<=2)=2, l=2: 4*P(S2<=2)=4*0.25=1
    CHECK(e.value == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(V(model, 2.0, alpha, 0.5).value == doctest::Approx(1.0));   // below the support
    CHECK(V(model, 2.0, alpha, 1.0).value == doctest::Approx(2.0));   // l=1 half the mass
    // along the lattice the ratio settles on the arithmetic limit
    auto params = build_params(model, 2.0);
    double lim = renewal_limit(params);
    double x = 30.0;
    CHECK(V(model, 2.0, alpha, x).value / std::exp(alpha * x) ==
          doctest::Approx(lim).epsilon(0.05));
}

TEST_CASE("limit constants") {
    auto p1 = build_params(WeightModel::exponential(1.0), 2.0);
    CHECK(renewal_limit(p1) == doctest::Approx(2.0).epsilon(1e-12));  // 1/(alpha nu_bar)
    auto p2 = build_params(WeightModel::finite_support({{1.0, 0.5}, {2.0, 0.5}}), 2.0);
    CHECK(renewal_limit(p2) == doctest::Approx(1.8944271909999159).epsilon(1e-9));
    // as the span shrinks the lattice constant collapses to the continuous one
    LimitParams synth = p1;
    synth.span = 1e-6;
    CHECK(renewal_limit(synth) == doctest::Approx(renewal_limit(p1)).epsilon(1e-5));
}

TEST_CASE("monte carlo agrees with the closed form") {
    auto model = WeightModel::exponential(1.0);
    RandomStream rng(55);
    for (double x : {0.5, 2.0}) {
        auto mc = V_monte_carlo(model, 2.0, 1.0, x, 200000, rng);
        REQUIRE(mc.stderr_.has_value());
        double exact = 1.0 + 2.0 * (std::exp(x) - 1.0);
        CHECK(std::abs(mc.value - exact) < 4 * *mc.stderr_);
    }
    // uniform weights have no closed form or lattice; dispatch goes MC
    auto u = V(WeightModel::uniform_interval(0.0, 1.0), 2.0, solve_alpha(WeightModel::uniform_interval(0.0, 1.0), 2.0), 1.0);
    CHECK(u.method == RenewalMethod::monte_carlo);
    CHECK(u.value >= 1.0);
}

TEST_CASE("monotonicity and the uniform bound") {
    auto model = WeightModel::exponential(1.0);
    double prev = 0.0;
    for (double x : {0.0, 0.5, 1.0, 2.0, 4.0}) {
        double v = V(model, 2.0, 1.0, x).value;
        CHECK(v >= 1.0);
        CHECK(v >= prev);
        prev = v;
    }
    // (V(x)-1)e^{-x} = 2 - 2e^{-x} climbs to 2 on a grid out to 20
    std::vector<double> grid;
    for (double x = 0.0; x <= 20.0; x += 0.5) grid.push_back(x);
    CHECK(uniform_bound_check(model, 2.0, 1.0, grid) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("ratio table emits csv") {
    std::stringstream ss;
    ratio_table(WeightModel::exponential(1.0), 2.0, 1.0, {0.5, 1.0, 2.0}, ss);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "x,V,ratio,method,stderr");
    int rows = 0;
    while (std::getline(ss, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 3);
}
