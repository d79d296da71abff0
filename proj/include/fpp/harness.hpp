#pragma once

#include <string>
#include <vector>

#include "fpp/cox.hpp"
#include "fpp/graph.hpp"
#include "fpp/limit_params.hpp"
#include "fpp/weights.hpp"

namespace fpp {

// Full description of a replicated experiment. Everything that affects
// the numbers lives here; the thread count deliberately does not appear in
// the serialized echo, since results are invariant to it.
struct ExperimentConfig {
    WeightModel model = WeightModel::exponential(1.0);
    double lambda = 2.0;
    long long n = 10000;
    int replications = 100;
    double z_window = 1.0;   // hopcount window: z <= z_window
    double u_window = -2.0;  // weight window: u <= u_window
    std::vector<Rect> rects;  // query rectangles inside the window
    int r_max = 2;            // factorial moments up to this order
    std::uint64_t seed = 1;
    int threads = 1;
    std::uint64_t budget = 100000000ULL;
    std::size_t w_pairs = 100000;  // bank size for the limit-law overlays
    int w_depth = 40;
    std::vector<std::string> checks;  // subset of {min, window, moments}; empty = all

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    bool wants(const std::string& check) const;
};

struct ReplicationSummary {
    bool truncated = false;  // enumeration budget exhausted, excluded from stats
    MinRecord min;
    std::vector<PointSample> points;  // window point process
};

struct FactorialMomentRow {
    int rect_index = 0;
    int r = 0;
    double estimate = 0.0;
    double stderr_ = 0.0;
    double theory = 0.0;
};

struct ExperimentReport {
    nlohmann::json config_echo;
    LimitParams params;
    ScalingSchedule sched;

    long long connected = 0, disconnected = 0, truncated = 0;
    double connected_fraction = 0.0;
    double pmin_one_fraction = 0.0;  // among connected replications

    // over connected replications
    std::vector<double> hmin_std_sorted;   // (H_min - gamma log n)/sqrt(beta log n)
    std::vector<double> lmin_shift_sorted; // L_min - log(n)/alpha
    // The hopcount CLT allows an O(1) centering offset that decays only
    // like 1/sqrt(log n); it is reported here and the KS check below is a
    // shape test on the studentized sample.
    double hmin_mean_offset = 0.0;
    double hmin_sd = 0.0;
    double ks_hmin = -1.0;  // studentized H_min vs standard normal
    double ks_lmin = -1.0;  // vs the conditional limit CDF from the W-bank

    std::vector<FactorialMomentRow> moments;
    std::vector<ReplicationSummary> reps;  // kept in memory, not serialized

    nlohmann::json to_json() const;  // aggregates only, no timestamp
};

ExperimentReport run_experiment(const ExperimentConfig& config);

// tau_n^r times the mean falling factorial (count)_r; standard error by
// batching into up to 100 batches.
MeanStderr estimate_factorial_moment(const std::vector<long long>& counts, int r, double tau_n);

// report.json plus CSV sidecars (ecdf_hmin.csv, ecdf_lmin.csv,
// factorial_moments.csv, points.csv) under out_dir. Refuses to overwrite
// an existing report.json unless force. The timestamp lands in
// metadata.timestamp of report.json and nowhere else.
void write_report(const ExperimentReport& report, const std::string& out_dir, bool force);

}  // namespace fpp
