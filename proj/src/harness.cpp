#include "fpp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "fpp/stats.hpp"
#include "fpp/w_process.hpp"

namespace fpp {

namespace {

double json_real(const nlohmann::json& j) {
    if (j.is_string()) {
        const std::string& s = j.get_ref<const std::string&>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw std::invalid_argument("config: bad numeric string \"" + s + "\"");
    }
    return j.get<double>();
}

nlohmann::json real_json(double x) {
    if (x == std::numeric_limits<double>::infinity()) return "inf";
    if (x == -std::numeric_limits<double>::infinity()) return "-inf";
    return x;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.model = WeightModel::from_json(j.at("model"));
    c.lambda = j.at("lambda").get<double>();
    c.n = j.at("n").get<long long>();
    c.replications = j.at("replications").get<int>();
    if (c.replications < 1) throw std::invalid_argument("config: replications must be >= 1");
    if (j.contains("z_window")) c.z_window = json_real(j["z_window"]);
    if (j.contains("u_window")) c.u_window = json_real(j["u_window"]);
    if (j.contains("rects"))
        for (auto& r : j["rects"])
            c.rects.push_back({json_real(r.at("z_lo")), json_real(r.at("z_hi")),
                               json_real(r.at("u_lo")), json_real(r.at("u_hi"))});
    if (j.contains("r_max")) c.r_max = j["r_max"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threads")) c.threads = j["threads"].get<int>();
    if (j.contains("budget")) c.budget = j["budget"].get<std::uint64_t>();
    if (j.contains("w_pairs")) c.w_pairs = j["w_pairs"].get<std::size_t>();
    if (j.contains("w_depth")) c.w_depth = j["w_depth"].get<int>();
    if (j.contains("checks")) c.checks = j["checks"].get<std::vector<std::string>>();
    return c;
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json rects = nlohmann::json::array();
    for (auto& r : this->rects)
        rects.push_back({{"z_lo", real_json(r.z_lo)},
                         {"z_hi", real_json(r.z_hi)},
                         {"u_lo", real_json(r.u_lo)},
                         {"u_hi", real_json(r.u_hi)}});
    // threads deliberately omitted: the report must not depend on it
    return {{"model", model.to_json()},
            {"lambda", lambda},
            {"n", n},
            {"replications", replications},
            {"z_window", real_json(z_window)},
            {"u_window", real_json(u_window)},
            {"rects", rects},
            {"r_max", r_max},
            {"seed", seed},
            {"budget", budget},
            {"w_pairs", w_pairs},
            {"w_depth", w_depth},
            {"checks", checks}};
}

bool ExperimentConfig::wants(const std::string& check) const {
    if (checks.empty()) return true;
    return std::find(checks.begin(), checks.end(), check) != checks.end();
}

MeanStderr estimate_factorial_moment(const std::vector<long long>& counts, int r, double tau_n) {
    if (r < 1) throw std::invalid_argument("estimate_factorial_moment: r must be >= 1");
    const std::size_t n = counts.size();
    if (n == 0) return {0.0, 0.0, 0};
    const double scale = std::pow(tau_n, r);
    std::vector<double> vals(n);
    for (std::size_t i = 0; i < n; ++i)
        vals[i] = falling_factorial(static_cast<double>(counts[i]), r);
    double total = 0.0;
    for (double v : vals) total += v;
    double mean = scale * total / static_cast<double>(n);

    // stderr from up to 100 contiguous batches
    std::size_t nb = std::min<std::size_t>(100, n);
    std::vector<double> batch(nb, 0.0);
    std::vector<std::size_t> size(nb, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t b = i * nb / n;
        batch[b] += vals[i];
        ++size[b];
    }
    double se = 0.0;
    if (nb > 1) {
        double bm = 0.0;
        for (std::size_t b = 0; b < nb; ++b) batch[b] /= static_cast<double>(size[b]);
        for (double v : batch) bm += v;
        bm /= static_cast<double>(nb);
        double var = 0.0;
        for (double v : batch) var += (v - bm) * (v - bm);
        var /= static_cast<double>(nb - 1);
        se = scale * std::sqrt(var / static_cast<double>(nb));
    }
    return {mean, se, n};
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    ExperimentReport rep;
    rep.config_echo = config.to_json();
    rep.params = build_params(config.model, config.lambda);
    rep.sched = schedule(rep.params, config.n);

    const bool do_window = config.wants("window") || config.wants("moments");
    const double weight_threshold = rep.sched.rho_n + config.u_window;
    long long hop_bound = k_n(rep.params, config.n, config.z_window);
    const int hop_threshold =
        static_cast<int>(std::min<long long>(hop_bound, config.n - 1));

    rep.reps.assign(static_cast<std::size_t>(config.replications), {});
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= config.replications) return;
            ReplicationSummary& out = rep.reps[static_cast<std::size_t>(i)];
            RandomStream rng = RandomStream::derive(config.seed, "replication",
                                                    static_cast<std::uint64_t>(i));
            WeightedGraph g = generate(config.n, config.lambda, config.model, rng);
            try {
                out.min = min_paths(g, rep.params.span, config.budget);
                if (do_window && out.min.status == ConnStatus::connected &&
                    weight_threshold >= 0.0) {
                    auto paths =
                        enumerate_paths(g, weight_threshold, hop_threshold, config.budget);
                    out.points = point_process(paths, rep.sched, rep.params);
                }
            } catch (const BudgetError&) {
                out.truncated = true;
            }
        }
    };
    int nthreads = std::max(1, config.threads);
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // aggregate in replication order
    std::vector<double> hmin, lmin;
    long long pmin_one = 0;
    for (auto& r : rep.reps) {
        if (r.truncated) {
            ++rep.truncated;
            continue;
        }
        if (r.min.status == ConnStatus::connected) {
            ++rep.connected;
            hmin.push_back((static_cast<double>(r.min.hopcounts.front()) -
                            rep.params.gamma * rep.sched.log_n) /
                           std::sqrt(rep.params.beta * rep.sched.log_n));
            lmin.push_back(r.min.l_min - rep.sched.log_n / rep.params.alpha);
            if (r.min.p_min == 1) ++pmin_one;
        } else {
            ++rep.disconnected;
        }
    }
    long long usable = rep.connected + rep.disconnected;
    rep.connected_fraction =
        usable > 0 ? static_cast<double>(rep.connected) / static_cast<double>(usable) : 0.0;
    rep.pmin_one_fraction = rep.connected > 0
                                ? static_cast<double>(pmin_one) / static_cast<double>(rep.connected)
                                : 0.0;
    std::sort(hmin.begin(), hmin.end());
    std::sort(lmin.begin(), lmin.end());
    rep.hmin_std_sorted = std::move(hmin);
    rep.lmin_shift_sorted = std::move(lmin);

    if (config.wants("min") && !rep.hmin_std_sorted.empty()) {
        auto hm = mean_stderr(rep.hmin_std_sorted);
        double var = 0.0;
        for (double v : rep.hmin_std_sorted) var += (v - hm.mean) * (v - hm.mean);
        double sd = rep.hmin_std_sorted.size() > 1
                        ? std::sqrt(var / static_cast<double>(rep.hmin_std_sorted.size() - 1))
                        : 1.0;
        rep.hmin_mean_offset = hm.mean;
        rep.hmin_sd = sd;
        std::vector<double> studentized(rep.hmin_std_sorted);
        for (double& v : studentized) v = (v - hm.mean) / sd;
        rep.ks_hmin = ks_distance(studentized, [](double z) { return norm_cdf(z); });
        if (!rep.params.span) {
            // overlay: the limit CDF of L_min - log(n)/alpha conditioned on
            // connectivity, using a fresh W-bank
            RandomStream r1 = RandomStream::derive(config.seed, "wbank1", 0);
            RandomStream r2 = RandomStream::derive(config.seed, "wbank2", 0);
            auto b1 = sample_w_bank(rep.params, config.model, config.w_depth, config.w_pairs, r1);
            auto b2 = sample_w_bank(rep.params, config.model, config.w_depth, config.w_pairs, r2);
            std::vector<std::pair<double, double>> bank(config.w_pairs);
            for (std::size_t i = 0; i < config.w_pairs; ++i) bank[i] = {b1[i], b2[i]};
            IntensitySpec spec = IntensitySpec::nonarithmetic(rep.params);
            double norm = connect_prob_limit(rep.params);
            rep.ks_lmin = ks_distance(rep.lmin_shift_sorted, [&](double u) {
                return cdf_joint_min(spec, std::numeric_limits<double>::infinity(), u, bank).mean /
                       norm;
            });
        }
    }

    if (config.wants("moments") && !config.rects.empty()) {
        IntensitySpec spec =
            rep.params.span
                ? IntensitySpec::lattice(rep.params, subsequence_offset(rep.params, config.n))
                : IntensitySpec::nonarithmetic(rep.params);
        MomentTable table = moment_table(rep.params, config.model, config.r_max);
        for (std::size_t ri = 0; ri < config.rects.size(); ++ri) {
            const Rect& rect = config.rects[ri];
            std::vector<long long> counts;
            counts.reserve(rep.reps.size());
            for (auto& r : rep.reps) {
                if (r.truncated) continue;
                long long c = 0;
                for (auto& pt : r.points)
                    if (pt.z > rect.z_lo && pt.z <= rect.z_hi && pt.u > rect.u_lo &&
                        pt.u <= rect.u_hi)
                        ++c;
                counts.push_back(c);
            }
            for (int r = 1; r <= config.r_max; ++r) {
                MeanStderr ms = estimate_factorial_moment(counts, r, rep.sched.tau_n);
                double theory = factorial_moment_limit(spec, rect, r, table);
                rep.moments.push_back(
                    {static_cast<int>(ri), r, ms.mean, ms.stderr_, theory});
            }
        }
    }
    return rep;
}

nlohmann::json ExperimentReport::to_json() const {
    nlohmann::json moments_json = nlohmann::json::array();
    for (auto& m : moments)
        moments_json.push_back({{"rect", m.rect_index},
                                {"r", m.r},
                                {"estimate", m.estimate},
                                {"stderr", m.stderr_},
                                {"theory", m.theory}});
    nlohmann::json j{{"config", config_echo},
                     {"params", params.to_json()},
                     {"schedule",
                      {{"n", sched.n}, {"rho_n", sched.rho_n}, {"tau_n", sched.tau_n}}},
                     {"connected", connected},
                     {"disconnected", disconnected},
                     {"truncated", truncated},
                     {"connected_fraction", connected_fraction},
                     {"pmin_one_fraction", pmin_one_fraction},
                     {"hmin_mean_offset", hmin_mean_offset},
                     {"hmin_sd", hmin_sd},
                     {"ks_hmin", ks_hmin},
                     {"ks_lmin", ks_lmin},
                     {"factorial_moments", moments_json}};
    return j;
}

namespace {

void write_csv_column(const std::filesystem::path& p, const char* header,
                      const std::vector<double>& xs) {
    std::ofstream os(p);
    os << header << "\n";
    char buf[48];
    for (double x : xs) {
        std::snprintf(buf, sizeof(buf), "%.17g\n", x);
        os << buf;
    }
}

}  // namespace

void write_report(const ExperimentReport& report, const std::string& out_dir, bool force) {
    namespace fs = std::filesystem;
    fs::path dir(out_dir);
    fs::create_directories(dir);
    fs::path main = dir / "report.json";
    if (fs::exists(main) && !force)
        throw std::runtime_error("write_report: " + main.string() +
                                 " exists (use --force to overwrite)");

    nlohmann::json j = report.to_json();
    auto now = std::chrono::system_clock::now();
    std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    j["metadata"] = {{"timestamp", stamp}};
    {
        std::ofstream os(main);
        os << j.dump(2) << "\n";
    }

    write_csv_column(dir / "ecdf_hmin.csv", "hmin_std", report.hmin_std_sorted);
    write_csv_column(dir / "ecdf_lmin.csv", "lmin_shifted", report.lmin_shift_sorted);
    {
        std::ofstream os(dir / "factorial_moments.csv");
        os << "rect,r,estimate,stderr,theory\n";
        char buf[160];
        for (auto& m : report.moments) {
            std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g\n", m.rect_index, m.r,
                          m.estimate, m.stderr_, m.theory);
            os << buf;
        }
    }
    {
        std::ofstream os(dir / "points.csv");
        os << "replication,z,u\n";
        char buf[96];
        for (std::size_t i = 0; i < report.reps.size(); ++i) {
            if (report.reps[i].truncated) continue;
            for (auto& pt : report.reps[i].points) {
                std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i, pt.z, pt.u);
                os << buf;
            }
        }
    }
}

}  // namespace fpp
