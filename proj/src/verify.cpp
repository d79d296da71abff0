#include "fpp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "fpp/cox.hpp"
#include "fpp/graph.hpp"
#include "fpp/harness.hpp"
#include "fpp/limit_params.hpp"
#include "fpp/renewal.hpp"
#include "fpp/stats.hpp"
#include "fpp/w_process.hpp"

namespace fpp {

namespace {

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                                 static_cast<double>(j) / b.size()));
    }
    return d;
}

// ---- criterion 9 helpers -------------------------------------------------

void brute_paths_rec(const WeightedGraph& g, int v, std::vector<char>& used,
                     std::vector<int>& path, double w, std::vector<PathRecord>& out) {
    if (v == static_cast<int>(g.n)) {
        out.push_back({path, static_cast<int>(path.size()) - 1, w});
        return;
    }
    for (auto& [nb, len] : g.adj[static_cast<std::size_t>(v)]) {
        if (used[static_cast<std::size_t>(nb)]) continue;
        used[static_cast<std::size_t>(nb)] = 1;
        path.push_back(nb);
        brute_paths_rec(g, nb, used, path, w + len, out);
        path.pop_back();
        used[static_cast<std::size_t>(nb)] = 0;
    }
}

std::vector<PathRecord> brute_paths(const WeightedGraph& g) {
    std::vector<char> used(g.adj.size(), 0);
    std::vector<int> path{1};
    used[1] = 1;
    std::vector<PathRecord> out;
    brute_paths_rec(g, 1, used, path, 0.0, out);
    return out;
}

bool same_path_sets(std::vector<PathRecord> a, std::vector<PathRecord> b) {
    auto key = [](const PathRecord& p) { return p.vertices; };
    auto lt = [&](const PathRecord& x, const PathRecord& y) { return key(x) < key(y); };
    std::sort(a.begin(), a.end(), lt);
    std::sort(b.begin(), b.end(), lt);
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].vertices != b[i].vertices || a[i].hops != b[i].hops) return false;
        if (std::abs(a[i].weight - b[i].weight) > 1e-9 * (1.0 + std::abs(a[i].weight)))
            return false;
    }
    return true;
}

PathRecord make_path(std::initializer_list<int> verts) {
    PathRecord p;
    p.vertices = verts;
    p.hops = static_cast<int>(p.vertices.size()) - 1;
    return p;
}

// The two published small-tree examples of crossing vs non-crossing path
// bundles. Vertices are arbitrary labels; 1 is the source, 2 the target.
bool check_crossing_fixtures(std::string& detail) {
    // first bundle: four paths that pairwise share only common prefixes,
    // common suffixes, or endpoints -> no pair crosses
    std::vector<PathRecord> left = {
        make_path({1, 3, 5, 8, 12, 13, 2}),    // all through the "1..1" spine
        make_path({1, 3, 6, 9, 12, 13, 2}),    // branches off after 3, rejoins at 12
        make_path({1, 4, 7, 10, 14, 13, 2}),   // other side, rejoins at 13
        make_path({1, 4, 7, 11, 15, 16, 2}),   // other side, disjoint tail
    };
    for (std::size_t i = 0; i < left.size(); ++i)
        for (std::size_t j = 0; j < left.size(); ++j)
            if (i != j && crosses(left[i], left[j])) {
                detail = fmt("left bundle: unexpected crossing (%zu,%zu)", i, j);
                return false;
            }

    // second bundle: green and red run through the shared interior segment
    // 17-18 with different prefixes and different suffixes -> they cross;
    // blue shares only a prefix with green and a suffix with red
    PathRecord blue = make_path({1, 3, 5, 8, 12, 13, 2});
    PathRecord green = make_path({1, 3, 6, 17, 18, 9, 12, 13, 2});
    PathRecord red = make_path({1, 4, 7, 17, 18, 14, 13, 2});
    if (!crosses(green, red) || !crosses(red, green)) {
        detail = "right bundle: green/red should cross";
        return false;
    }
    if (crosses(blue, green) || crosses(blue, red)) {
        detail = "right bundle: blue should cross neither";
        return false;
    }
    auto un = uncrossed_filter({blue, green, red});
    if (un.size() != 1 || un[0].vertices != blue.vertices) {
        detail = "right bundle: uncrossed filter should keep exactly blue";
        return false;
    }
    return true;
}

// ---- criterion 10 helper -------------------------------------------------

std::string file_without_timestamp(const std::filesystem::path& p) {
    std::ifstream is(p);
    std::ostringstream out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.find("\"timestamp\"") != std::string::npos) continue;
        out << line << "\n";
    }
    return out.str();
}

}  // namespace

bool all_passed(const std::vector<CriterionResult>& results) {
    for (auto& r : results)
        if (!r.pass) return false;
    return true;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, std::ostream& log) {
    std::vector<CriterionResult> results;
    auto emit = [&](int id, const std::string& name, bool pass, const std::string& detail) {
        results.push_back({id, name, pass, detail});
        log << "criterion " << id << " [" << (pass ? "PASS" : "FAIL") << "] " << name << ": "
            << detail << "\n";
        log.flush();
    };

    const WeightModel exp1 = WeightModel::exponential(1.0);
    const WeightModel two_point =
        WeightModel::finite_support({{1.0, 0.5}, {2.0, 0.5}});
    const WeightModel zmix = WeightModel::zero_mix(0.25, WeightModel::exponential(1.0));
    const double lambda = 2.0;
    const LimitParams pexp = build_params(exp1, lambda);
    const LimitParams plat = build_params(two_point, lambda);

    // 1. closed-form constants
    {
        double err = std::max({std::abs(pexp.alpha - 1.0), std::abs(pexp.beta - 2.0),
                               std::abs(pexp.gamma - 2.0)});
        // (1 - 0.203188)^2 = 0.6349096 (to the published eta precision)
        bool ok = err <= 1e-10 && std::abs(pexp.eta - 0.203188) <= 1e-6 &&
                  std::abs(connect_prob_limit(pexp) - 0.6349096) <= 1e-5;
        emit(1, "exact constants", ok,
             fmt("alpha=%.12f beta=%.12f gamma=%.12f eta=%.8f conn=%.8f", pexp.alpha, pexp.beta,
                 pexp.gamma, pexp.eta, connect_prob_limit(pexp)));
    }

    // 2. moment identities
    {
        bool ok = true;
        std::string det;
        for (auto& [name, model, params] :
             std::vector<std::tuple<const char*, const WeightModel*, const LimitParams*>>{
                 {"exponential", &exp1, &pexp},
                 {"two_point", &two_point, &plat},
                 {"zero_mix", &zmix, nullptr}}) {
            LimitParams p = params ? *params : build_params(*model, lambda);
            auto ew = moments_w(p, *model, 5);
            auto mr = m_r_recursive(p, *model, 5);
            for (int r = 1; r <= 5; ++r) {
                double d = std::abs(ew[static_cast<std::size_t>(r - 1)] -
                                    mr[static_cast<std::size_t>(r - 1)]);
                double rel = d / std::max(1.0, std::abs(ew[static_cast<std::size_t>(r - 1)]));
                if (rel > 1e-10) {
                    ok = false;
                    det += fmt("%s r=%d mismatch %.3e; ", name, r, rel);
                }
            }
        }
        auto ew = moments_w(pexp, exp1, 3);
        if (std::abs(ew[1] - 3.0) > 1e-9 || std::abs(ew[2] - 14.0) > 1e-9) {
            ok = false;
            det += fmt("EW2=%.12f EW3=%.12f; ", ew[1], ew[2]);
        }
        // truncated tree series for r=2 is the geometric partial sum of
        // ratio lambda*R(2 alpha) = 2/3
        for (int cap = 1; cap <= 10; ++cap) {
            double got = m_r_tree_sum(pexp, exp1, 2, cap);
            double want = 3.0 * (1.0 - std::pow(2.0 / 3.0, cap));
            if (std::abs(got - want) > 1e-12) {
                ok = false;
                det += fmt("tree cap=%d got %.15f want %.15f; ", cap, got, want);
            }
        }
        if (det.empty())
            det = fmt("EW2=%.10f EW3=%.10f, three models agree to 1e-10, tree series geometric",
                      ew[1], ew[2]);
        emit(2, "moment identities", ok, det);
    }

    // 3. W sampler calibration
    {
        const std::size_t n_fp = opt.quick ? 100000 : 1000000;
        const std::size_t n_ks = opt.quick ? 20000 : 100000;
        RandomStream rng = RandomStream::derive(opt.seed, "accept-wfp", 0);
        auto bank = sample_w_bank(pexp, exp1, 40, n_fp, rng);
        bool ok = true;
        std::string det;
        // draws within one sub-pool are correlated, so error bars batch by
        // sub-pool
        auto batched = [&](const std::vector<double>& vals) {
            std::vector<double> means;
            for (std::size_t s = 0; s < vals.size(); s += w_pool_block) {
                std::size_t len = std::min(w_pool_block, vals.size() - s);
                double m = 0.0;
                for (std::size_t i = s; i < s + len; ++i) m += vals[i];
                means.push_back(m / static_cast<double>(len));
            }
            return mean_stderr(means);
        };
        const double target[3] = {1.0, 3.0, 14.0};
        for (int r = 1; r <= 3; ++r) {
            std::vector<double> pw(bank.size());
            for (std::size_t i = 0; i < bank.size(); ++i) pw[i] = std::pow(bank[i], r);
            auto ms = batched(pw);
            double dev = std::abs(ms.mean - target[r - 1]) / ms.stderr_;
            det += fmt("m%d=%.4f(%.1fse) ", r, ms.mean, dev);
            if (dev > 4.0) ok = false;
        }
        std::vector<double> zero_ind(bank.size());
        for (std::size_t i = 0; i < bank.size(); ++i) zero_ind[i] = bank[i] == 0.0 ? 1.0 : 0.0;
        auto p0 = batched(zero_ind);
        double dev0 = std::abs(p0.mean - pexp.eta) / p0.stderr_;
        det += fmt("P0=%.5f(%.1fse) ", p0.mean, dev0);
        if (dev0 > 3.0) ok = false;

        RandomStream rb = RandomStream::derive(opt.seed, "accept-wbr", 0);
        BranchingSampler bs(pexp, exp1, 7.0, 10000, rb);
        std::vector<double> branch(n_ks);
        for (auto& v : branch) v = bs.sample(rb);
        RandomStream rf = RandomStream::derive(opt.seed, "accept-wfp2", 0);
        auto fixed = sample_w_bank(pexp, exp1, 40, 4 * n_ks, rf);
        double ks = ks_two_sample(branch, fixed);
        det += fmt("branch-vs-fixed KS=%.4f", ks);
        if (ks > 0.02) ok = false;
        emit(3, "W sampler calibration", ok, det);
    }

    // 4. renewal asymptotics
    {
        bool ok = true;
        std::string det;
        int i = 0;
        for (double x : {0.5, 1.0, 2.0, 5.0}) {
            RandomStream rng = RandomStream::derive(opt.seed, "accept-renew", ++i);
            RenewalEval mc = V_monte_carlo(exp1, lambda, pexp.alpha, x, 200000, rng);
            double cf = V(exp1, lambda, pexp.alpha, x).value;
            double dev = std::abs(mc.value - cf) / *mc.stderr_;
            det += fmt("x=%g dev=%.1fse ", x, dev);
            if (dev > 3.0) ok = false;
        }
        double ratio20 = V(exp1, lambda, pexp.alpha, 20.0).value * std::exp(-20.0);
        det += fmt("ratio(20)=%.8f ", ratio20);
        if (std::abs(ratio20 - 2.0) > 1e-6) ok = false;
        double M = *plat.span;
        double vk = V(two_point, lambda, plat.alpha, 60.0 * M).value;
        double ratio_lat = vk * std::exp(-plat.alpha * 60.0 * M);
        double lim = renewal_limit(plat);
        det += fmt("lattice ratio(60M)=%.5f limit=%.5f", ratio_lat, lim);
        if (std::abs(ratio_lat - lim) > 0.02 * lim) ok = false;
        emit(4, "renewal asymptotics", ok, det);
    }

    // shared experiment for criteria 5, 6, 8: exponential weights, the
    // window z <= 5, u <= -2, rectangles for the first-moment law and the
    // r=2 factorial moment (mass 1/4 from the u-cut at log(1/8))
    ExperimentReport e1;
    {
        ExperimentConfig c;
        c.model = exp1;
        c.lambda = lambda;
        c.n = 10000;
        c.replications = opt.quick ? 600 : 10000;
        c.z_window = 5.0;
        c.u_window = -2.0;
        c.rects = {{-std::numeric_limits<double>::infinity(), 1.0,
                    -std::numeric_limits<double>::infinity(), -2.0},
                   {-std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity(),
                    -std::numeric_limits<double>::infinity(), std::log(0.125)},
                   {-std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity(),
                    -std::numeric_limits<double>::infinity(), -2.0}};
        c.r_max = 2;
        c.seed = opt.seed;
        c.threads = opt.threads;
        c.w_pairs = opt.quick ? 20000 : 100000;
        e1 = run_experiment(c);
    }

    // 5. first-moment law
    {
        // asymptotic mass of the (z <= 1, u <= -2) corner
        double target_limit = norm_cdf(1.0) * std::exp(-2.0) / (pexp.alpha * pexp.nu_bar);
        // At finite n the hop coordinate of a weight-u path is centered at
        // gamma log n + u/nu_bar, i.e. z | u ~ N(u/(nu_bar sqrt(beta log n)), 1).
        // This 1/sqrt(log n) coupling is far from gone at n = 10^4, so the
        // corner mass is compared against the coupled integral (which has
        // the asymptotic value above as its n -> infinity limit).
        double coupling = 1.0 / (pexp.nu_bar * std::sqrt(pexp.beta * e1.sched.log_n));
        double target_n = 0.0;
        {
            const double du = 1e-3;
            for (double u = -40.0; u < -2.0; u += du) {
                double mid = u + 0.5 * du;
                target_n += du * std::exp(pexp.alpha * mid) / pexp.nu_bar *
                            norm_cdf(1.0 - mid * coupling);
            }
        }
        double est = 0.0, se = 0.0, est_all = 0.0;
        for (auto& m : e1.moments) {
            if (m.rect_index == 0 && m.r == 1) est = m.estimate, se = m.stderr_;
            if (m.rect_index == 2 && m.r == 1) est_all = m.estimate;
        }
        // u-marginal (no z-cut), where the coupling integrates out
        double target_all = std::exp(-2.0) / (pexp.alpha * pexp.nu_bar);
        bool ok = std::abs(est - target_n) <= 0.10 * target_n &&
                  std::abs(est_all - target_all) <= 0.10 * target_all;
        emit(5, "first-moment law", ok,
             fmt("corner tau*mean=%.4f (se %.4f) finite-n target=%.4f (limit %.4f); "
                 "u-marginal %.4f vs %.4f",
                 est, se, target_n, target_limit, est_all, target_all));
    }

    // 6. minimal-path limit law (non-lattice)
    {
        bool ok = e1.connected >= (opt.quick ? 300 : 2000) && e1.ks_hmin >= 0.0 &&
                  e1.ks_hmin <= 0.1 && e1.ks_lmin >= 0.0 && e1.ks_lmin <= 0.1 &&
                  e1.pmin_one_fraction >= 0.99;
        emit(6, "minimal path limit law", ok,
             fmt("connected=%lld ks_hmin=%.4f ks_lmin=%.4f pmin1=%.4f", e1.connected, e1.ks_hmin,
                 e1.ks_lmin, e1.pmin_one_fraction));
    }

    // 7. lattice minimal-path pmf
    {
        ExperimentConfig c;
        c.model = two_point;
        c.lambda = lambda;
        c.n = 10000;
        c.replications = opt.quick ? 600 : 5000;
        c.seed = opt.seed + 7;
        c.threads = opt.threads;
        c.checks = {"min"};
        ExperimentReport e2 = run_experiment(c);

        bool ok = true;
        std::string det;
        const double M = *plat.span;
        long long usable = 0;
        std::map<std::pair<long long, int>, long long> freq;
        for (auto& r : e2.reps) {
            if (r.truncated) continue;
            ++usable;
            if (r.min.status != ConnStatus::connected) continue;
            if (std::abs(r.min.l_min - std::round(r.min.l_min)) > 1e-9) {
                ok = false;
                det += fmt("off-lattice L_min=%.12f; ", r.min.l_min);
                continue;
            }
            long long u = std::llround(r.min.l_min - e2.sched.rho_n);
            ++freq[{u, r.min.p_min}];
        }

        RandomStream r1 = RandomStream::derive(c.seed, "wbank1", 0);
        RandomStream r2 = RandomStream::derive(c.seed, "wbank2", 0);
        std::size_t pairs = opt.quick ? 20000 : 100000;
        auto b1 = sample_w_bank(plat, two_point, 40, pairs, r1);
        auto b2 = sample_w_bank(plat, two_point, 40, pairs, r2);
        std::vector<std::pair<double, double>> bank(pairs);
        for (std::size_t i = 0; i < pairs; ++i) bank[i] = {b1[i], b2[i]};
        double theta = subsequence_offset(plat, c.n);
        IntensitySpec spec = IntensitySpec::lattice(plat, theta);

        double worst = 0.0;
        for (long long u = -1; u <= 2; ++u) {
            for (int k = 1; k <= 3; ++k) {
                std::vector<double> zinf(static_cast<std::size_t>(k),
                                         std::numeric_limits<double>::infinity());
                double pmf =
                    pmf_arithmetic_min(spec, static_cast<double>(u) * M, k, zinf, bank).mean;
                auto it = freq.find({u, k});
                double emp = it == freq.end()
                                 ? 0.0
                                 : static_cast<double>(it->second) / static_cast<double>(usable);
                double gap = std::abs(emp - pmf);
                worst = std::max(worst, gap);
                if (gap > 0.05) {
                    ok = false;
                    det += fmt("(u=%lld,k=%d) emp=%.4f pmf=%.4f; ", u, k, emp, pmf);
                }
            }
        }
        if (det.empty())
            det = fmt("theta=%.4f usable=%lld worst |emp-pmf|=%.4f", theta, usable, worst);
        emit(7, "lattice minimal path pmf", ok, det);
    }

    // 8. factorial moments
    {
        double est = 0.0, se = 0.0;
        for (auto& m : e1.moments)
            if (m.rect_index == 1 && m.r == 2) est = m.estimate, se = m.stderr_;
        double target = 0.5625;  // (1/4)^2 * (E[W^2])^2
        bool ok = std::abs(est - target) <= 0.25 * target;
        emit(8, "factorial moments", ok,
             fmt("tau^2*mean=%.4f (se %.4f) target=%.4f rel=%.1f%%", est, se, target,
                 100.0 * std::abs(est - target) / target));
    }

    // 9. brute-force oracle + crossing fixtures
    {
        bool ok = true;
        std::string det;
        int graphs = opt.quick ? 100 : 500;
        for (int t = 0; t < graphs && ok; ++t) {
            RandomStream rng = RandomStream::derive(opt.seed, "accept-brute", t);
            long long n = 4 + static_cast<long long>(rng.uniform_below(9));  // 4..12
            const WeightModel& model = t % 2 == 0 ? exp1 : two_point;
            WeightedGraph g = generate(n, 2.0, model, rng);

            auto brute = brute_paths(g);
            double total = 1.0;
            for (auto& p : brute) total = std::max(total, p.weight);
            auto fast = enumerate_paths(g, total + 1.0, static_cast<int>(n) - 1);
            if (!same_path_sets(brute, fast)) {
                ok = false;
                det = fmt("graph %d: path set mismatch (%zu vs %zu)", t, brute.size(),
                          fast.size());
                break;
            }

            auto span = model.detect_span();
            MinRecord mine = min_paths(g, span);
            MinRecord ref;
            if (!brute.empty()) {
                double lmin = brute.front().weight;
                for (auto& p : brute) lmin = std::min(lmin, p.weight);
                ref.status = ConnStatus::connected;
                ref.l_min = lmin;
                for (auto& p : brute) {
                    bool tie = span ? std::llround(p.weight / *span) == std::llround(lmin / *span)
                                    : p.weight == lmin;
                    if (tie) ref.hopcounts.push_back(p.hops);
                }
                std::sort(ref.hopcounts.begin(), ref.hopcounts.end());
                ref.p_min = static_cast<int>(ref.hopcounts.size());
            }
            if (mine.status != ref.status || mine.p_min != ref.p_min ||
                mine.hopcounts != ref.hopcounts ||
                (ref.status == ConnStatus::connected &&
                 std::abs(mine.l_min - ref.l_min) > 1e-9)) {
                ok = false;
                det = fmt("graph %d: min record mismatch (P_min %d vs %d)", t, mine.p_min,
                          ref.p_min);
                break;
            }
        }
        std::string cross_detail;
        if (ok && !check_crossing_fixtures(cross_detail)) {
            ok = false;
            det = cross_detail;
        }
        if (det.empty()) det = fmt("%d graphs match brute force; crossing fixtures ok", graphs);
        emit(9, "brute-force oracle", ok, det);
    }

    // 10. determinism across thread counts
    {
        namespace fs = std::filesystem;
        ExperimentConfig c;
        c.model = exp1;
        c.lambda = lambda;
        c.n = 500;
        c.replications = 200;
        c.z_window = 5.0;
        c.u_window = -1.0;
        c.rects = {{-std::numeric_limits<double>::infinity(), 1.0,
                    -std::numeric_limits<double>::infinity(), -1.0}};
        c.seed = opt.seed + 10;
        c.w_pairs = 2000;
        c.w_depth = 20;

        const char* files[] = {"report.json", "ecdf_hmin.csv", "ecdf_lmin.csv",
                               "factorial_moments.csv", "points.csv"};
        bool ok = true;
        std::string det;
        std::vector<std::string> reference;
        for (int threads : {1, 1, 4, 8}) {  // threads=1 twice: repeatability
            c.threads = threads;
            ExperimentReport rep = run_experiment(c);
            fs::path dir = fs::path(opt.work_dir) / fmt("det_t%d", threads);
            fs::remove_all(dir);
            write_report(rep, dir.string(), true);
            std::vector<std::string> contents;
            for (const char* f : files) contents.push_back(file_without_timestamp(dir / f));
            if (reference.empty()) {
                reference = contents;
            } else if (contents != reference) {
                ok = false;
                det = fmt("report differs at threads=%d", threads);
                break;
            }
        }
        if (det.empty()) det = "byte-identical reports (minus timestamp) at threads 1,1,4,8";
        emit(10, "determinism", ok, det);
    }

    return results;
}

}  // namespace fpp
