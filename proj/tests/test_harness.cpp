#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fpp/harness.hpp"

using namespace fpp;

TEST_CASE("factorial moment estimator") {
    CHECK(estimate_factorial_moment({0, 0, 0}, 1, 1.0).mean == 0.0);
    CHECK(estimate_factorial_moment({1, 1, 1, 1}, 2, 1.0).mean == 0.0);
    // mean of (c)_2 over {3,1,0,2} is (6+0+0+2)/4 = 2
    auto m = estimate_factorial_moment({3, 1, 0, 2}, 2, 1.0);
    CHECK(m.mean == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(m.stderr_ > 0.0);
    // tau scales with the r-th power
    CHECK(estimate_factorial_moment({3, 1, 0, 2}, 2, 2.0).mean ==
          doctest::Approx(8.0).epsilon(1e-14));
    CHECK(estimate_factorial_moment({}, 1, 1.0).count == 0);
    CHECK_THROWS(estimate_factorial_moment({1, 2}, 0, 1.0));
}

TEST_CASE("config json round trip") {
    ExperimentConfig c;
    c.model = WeightModel::finite_support({{1.0, 0.5}, {2.0, 0.5}});
    c.lambda = 2.0;
    c.n = 1234;
    c.replications = 7;
    c.z_window = std::numeric_limits<double>::infinity();
    c.u_window = -2.5;
    c.rects.push_back(Rect{-std::numeric_limits<double>::infinity(), 1.0, -4.0, -2.5});
    c.r_max = 3;
    c.seed = 99;
    c.budget = 5000;
    c.w_pairs = 321;
    c.w_depth = 17;
    c.checks = {"min", "moments"};
    auto j = c.to_json();
    CHECK_FALSE(j.contains("threads"));  // results do not depend on it
    auto back = ExperimentConfig::from_json(j);
    CHECK(back.n == c.n);
    CHECK(back.replications == c.replications);
    CHECK(std::isinf(back.z_window));
    CHECK(back.u_window == c.u_window);
    REQUIRE(back.rects.size() == 1);
    CHECK(std::isinf(back.rects[0].z_lo));
    CHECK(back.rects[0].u_hi == -2.5);
    CHECK(back.seed == 99);
    CHECK(back.budget == 5000);
    CHECK(back.w_pairs == 321);
    CHECK(back.w_depth == 17);
    CHECK(back.checks == c.checks);
    CHECK(back.wants("min"));
    CHECK_FALSE(back.wants("window"));
    ExperimentConfig d;  // empty checks means everything
    CHECK(d.wants("min"));
    CHECK(d.wants("window"));
}

namespace {
ExperimentConfig small_config() {
    ExperimentConfig c;
    c.model = WeightModel::exponential(1.0);
    c.lambda = 2.0;
    c.n = 500;
    c.replications = 120;
    c.z_window = 5.0;
    c.u_window = -1.0;
    c.rects.push_back(Rect{-std::numeric_limits<double>::infinity(),
                           std::numeric_limits<double>::infinity(), -5.0, -1.0});
    c.r_max = 2;
    c.seed = 424242;
    c.threads = 1;
    c.w_pairs = 20000;
    return c;
}
}  // namespace

TEST_CASE("experiments are reproducible and thread-invariant") {
    auto c = small_config();
    auto r1 = run_experiment(c);
    auto r2 = run_experiment(c);
    c.threads = 3;
    auto r3 = run_experiment(c);
    CHECK(r1.to_json().dump() == r2.to_json().dump());
    CHECK(r1.to_json().dump() == r3.to_json().dump());
    CHECK_FALSE(r1.to_json().dump().find("timestamp") != std::string::npos);

    // basic shape of the aggregates
    CHECK(r1.connected + r1.disconnected + r1.truncated == c.replications);
    CHECK(r1.connected_fraction ==
          doctest::Approx(static_cast<double>(r1.connected) /
                          (c.replications - r1.truncated)));
    CHECK(static_cast<long long>(r1.hmin_std_sorted.size()) == r1.connected);
    CHECK(std::is_sorted(r1.hmin_std_sorted.begin(), r1.hmin_std_sorted.end()));
    CHECK(r1.ks_hmin >= 0.0);
    CHECK(r1.ks_lmin >= 0.0);
    CHECK(r1.pmin_one_fraction >= 0.0);
    CHECK(r1.pmin_one_fraction <= 1.0);
    REQUIRE(!r1.moments.empty());
    for (const auto& row : r1.moments) CHECK(row.theory > 0.0);
}

TEST_CASE("connectivity fraction approaches the two-endpoint limit") {
    ExperimentConfig c;
    c.model = WeightModel::exponential(1.0);
    c.lambda = 2.0;
    c.n = 5000;
    c.replications = 400;
    c.seed = 7;
    c.checks = {"min"};
    c.w_pairs = 10000;
    auto r = run_experiment(c);
    // (1-eta)^2 = 0.6349; finite-n bias at n = 5000 is small
    CHECK(r.connected_fraction == doctest::Approx(0.6349).epsilon(0.08));
    CHECK(r.pmin_one_fraction > 0.95);  // continuous weights: ties have measure zero
}

TEST_CASE("report files") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "fpp_report_test";
    fs::remove_all(dir);

    auto c = small_config();
    c.replications = 30;
    auto r = run_experiment(c);
    write_report(r, dir.string(), false);
    for (const char* f : {"report.json", "ecdf_hmin.csv", "ecdf_lmin.csv",
                          "factorial_moments.csv", "points.csv"})
        CHECK(fs::exists(dir / f));
    // refuses to clobber without force
    CHECK_THROWS(write_report(r, dir.string(), false));
    write_report(r, dir.string(), true);

    // timestamp is confined to metadata.timestamp
    std::ifstream in(dir / "report.json");
    nlohmann::json j = nlohmann::json::parse(in);
    CHECK(j.contains("metadata"));
    CHECK(j["metadata"].contains("timestamp"));
    j.erase("metadata");
    CHECK(j.dump() == r.to_json().dump());
    fs::remove_all(dir);
}
