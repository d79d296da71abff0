#include "fpp/cox.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace fpp {

IntensitySpec IntensitySpec::nonarithmetic(const LimitParams& params) {
    IntensitySpec s;
    s.params = params;
    s.arithmetic = false;
    return s;
}

IntensitySpec IntensitySpec::lattice(const LimitParams& params, double theta) {
    if (!params.span) throw std::invalid_argument("IntensitySpec: lattice kind needs a span");
    if (!(theta > -*params.span && theta <= 0.0))
        throw std::invalid_argument("IntensitySpec: theta must lie in (-M, 0]");
    IntensitySpec s;
    s.params = params;
    s.arithmetic = true;
    s.theta = theta;
    return s;
}

namespace {

long long lattice_floor(double u, double M) {
    return static_cast<long long>(std::floor(u / M + 1e-12));
}

// cumulative mass of the weight-axis measure on (-inf, u]:
// e^{alpha u}/(alpha nu_bar), or M/((1-e^{-alpha M}) nu_bar) e^{alpha M floor(u/M)}
double axis_mass(const IntensitySpec& spec, double u) {
    const auto& p = spec.params;
    if (u == -std::numeric_limits<double>::infinity()) return 0.0;
    if (spec.arithmetic) {
        double M = *p.span;
        if (u == std::numeric_limits<double>::infinity())
            return std::numeric_limits<double>::infinity();
        return M / ((1.0 - std::exp(-p.alpha * M)) * p.nu_bar) *
               std::exp(p.alpha * M * static_cast<double>(lattice_floor(u, M)));
    }
    return std::exp(p.alpha * u) / (p.alpha * p.nu_bar);
}

}  // namespace

double lambda_mass(const IntensitySpec& spec, double z, double u) {
    return norm_cdf(z) * axis_mass(spec, u);
}

double lambda_mass_rect(const IntensitySpec& spec, const Rect& rect) {
    double pz = norm_cdf(rect.z_hi) - norm_cdf(rect.z_lo);
    double pu = axis_mass(spec, rect.u_hi) - axis_mass(spec, rect.u_lo);
    return std::max(0.0, pz) * std::max(0.0, pu);
}

double mean_mass(const IntensitySpec& spec, const Rect& rect) {
    double m = lambda_mass_rect(spec, rect);
    if (spec.arithmetic) m *= std::exp(spec.params.alpha * spec.theta);
    return m;
}

std::vector<PointSample> sample_cox(const IntensitySpec& spec, double w1, double w2,
                                    const Rect& rect, RandomStream& rng) {
    if (w1 < 0.0 || w2 < 0.0) throw std::domain_error("sample_cox: negative W");
    double base = mean_mass(spec, rect);
    if (!std::isfinite(base))
        throw std::domain_error("sample_cox: rectangle has infinite intensity mass");
    double mean = w1 * w2 * base;
    if (mean == 0.0) return {};
    int count = rng.poisson(mean);

    const auto& p = spec.params;
    double phi_lo = norm_cdf(rect.z_lo), phi_hi = norm_cdf(rect.z_hi);
    std::vector<PointSample> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        double z = norm_inv(phi_lo + rng.uniform() * (phi_hi - phi_lo));
        double u;
        if (spec.arithmetic) {
            double M = *p.span;
            long long j_hi = lattice_floor(rect.u_hi, M);
            // atoms at jM, j <= j_hi, j > u_lo; weight ratio going down is
            // e^{-alpha M}, a (possibly truncated) geometric
            double q = std::exp(-p.alpha * M);
            double U = rng.uniform_pos();
            long long steps;
            if (rect.u_lo == -std::numeric_limits<double>::infinity()) {
                steps = static_cast<long long>(std::floor(std::log(U) / std::log(q)));
            } else {
                long long j_lo = lattice_floor(rect.u_lo, M) + 1;  // first atom > u_lo
                double n_atoms = static_cast<double>(j_hi - j_lo + 1);
                double total = -std::expm1(n_atoms * std::log(q));
                steps = static_cast<long long>(
                    std::floor(std::log1p(-U * total) / std::log(q)));
            }
            u = static_cast<double>(j_hi - steps) * M;
        } else {
            // density proportional to e^{alpha u} on (u_lo, u_hi]
            double e_hi = std::exp(p.alpha * rect.u_hi);
            double e_lo = rect.u_lo == -std::numeric_limits<double>::infinity()
                              ? 0.0
                              : std::exp(p.alpha * rect.u_lo);
            u = std::log(e_lo + rng.uniform_pos() * (e_hi - e_lo)) / p.alpha;
        }
        out.push_back({z, u});
    }
    return out;
}

MeanStderr cdf_joint_min(const IntensitySpec& spec, double z, double u,
                         const std::vector<std::pair<double, double>>& w_bank) {
    if (spec.arithmetic)
        throw std::domain_error("cdf_joint_min: lattice spec, use pmf_arithmetic_min");
    if (w_bank.empty()) throw std::invalid_argument("cdf_joint_min: empty bank");
    const auto& p = spec.params;
    double scale = std::exp(p.alpha * u) / (p.alpha * p.nu_bar);
    std::vector<double> vals;
    vals.reserve(w_bank.size());
    for (auto& [w1, w2] : w_bank) vals.push_back(1.0 - std::exp(-w1 * w2 * scale));
    MeanStderr ms = mean_stderr(vals);
    double pz = norm_cdf(z);
    return {pz * ms.mean, pz * ms.stderr_, ms.count};
}

double order_stat_prob(const std::vector<double>& z_vec, RandomStream* rng) {
    const int k = static_cast<int>(z_vec.size());
    if (k == 0) return 1.0;
    // the event depends only on the right-to-left running minima
    std::vector<double> z(z_vec);
    for (int i = k - 2; i >= 0; --i) z[static_cast<std::size_t>(i)] =
        std::min(z[static_cast<std::size_t>(i)], z[static_cast<std::size_t>(i + 1)]);
    for (double v : z)
        if (v == -std::numeric_limits<double>::infinity()) return 0.0;
    if (z[0] == std::numeric_limits<double>::infinity()) return 1.0;  // no constraint at all

    if (k <= 4) {
        // counts (c_0..c_k) over the intervals cut by z_1<=...<=z_k;
        // order statistic i is below z_i iff c_0+...+c_{i-1} >= i
        std::vector<double> edge(static_cast<std::size_t>(k) + 1);
        edge[0] = 0.0;
        for (int i = 1; i <= k; ++i) edge[static_cast<std::size_t>(i)] =
            norm_cdf(z[static_cast<std::size_t>(i - 1)]);
        std::vector<double> p(static_cast<std::size_t>(k) + 1);
        for (int i = 0; i < k; ++i)
            p[static_cast<std::size_t>(i)] =
                std::max(0.0, edge[static_cast<std::size_t>(i + 1)] -
                                  edge[static_cast<std::size_t>(i)]);
        p[static_cast<std::size_t>(k)] =
            std::max(0.0, 1.0 - edge[static_cast<std::size_t>(k)]);

        double fact[5] = {1, 1, 2, 6, 24};
        double total = 0.0;
        std::vector<int> c(static_cast<std::size_t>(k) + 1, 0);
        std::function<void(int, int, int, double)> rec = [&](int idx, int left, int below,
                                                             double coeff) {
            if (idx == k) {
                total += coeff * std::pow(p[static_cast<std::size_t>(k)], left) /
                         fact[left];
                return;
            }
            for (int c_i = 0; c_i <= left; ++c_i) {
                int nb = below + c_i;
                // c_0..c_idx cover (-inf, z_{idx+1}]; order statistic idx+1
                // lies below z_{idx+1} iff nb >= idx+1
                if (nb < idx + 1) continue;
                double pc = std::pow(p[static_cast<std::size_t>(idx)], c_i) / fact[c_i];
                rec(idx + 1, left - c_i, nb, coeff * pc);
            }
        };
        rec(0, k, 0, fact[k]);
        return total;
    }

    if (!rng) throw std::invalid_argument("order_stat_prob: k > 4 needs an rng");
    const int draws = 1000000;
    int hits = 0;
    std::vector<double> sample(static_cast<std::size_t>(k));
    for (int d = 0; d < draws; ++d) {
        for (auto& s : sample) s = rng->normal();
        std::sort(sample.begin(), sample.end());
        bool ok = true;
        for (int i = 0; i < k && ok; ++i)
            ok = sample[static_cast<std::size_t>(i)] <= z[static_cast<std::size_t>(i)];
        hits += ok;
    }
    return static_cast<double>(hits) / draws;
}

MeanStderr pmf_arithmetic_min(const IntensitySpec& spec, double u, int k,
                              const std::vector<double>& z_vec,
                              const std::vector<std::pair<double, double>>& w_bank,
                              RandomStream* rng) {
    if (!spec.arithmetic) throw std::domain_error("pmf_arithmetic_min: non-lattice spec");
    if (k < 1) throw std::domain_error("pmf_arithmetic_min: k must be >= 1");
    if (w_bank.empty()) throw std::invalid_argument("pmf_arithmetic_min: empty bank");
    if (static_cast<int>(z_vec.size()) != k)
        throw std::invalid_argument("pmf_arithmetic_min: z_vec must have k entries");
    const auto& p = spec.params;
    const double M = *p.span;
    if (std::abs(u / M - std::round(u / M)) > 1e-9)
        throw std::domain_error("pmf_arithmetic_min: u is not a lattice value");

    // given (W1, W2) the counts per atom are independent Poissons with
    // means a_j = M W1 W2 e^{alpha(theta + jM)}/nu_bar; the minimum sits at
    // u with multiplicity k iff the atoms below u are empty and the atom at
    // u holds exactly k points
    const double below_factor = 1.0 / std::expm1(p.alpha * M);  // sum_{j<0} e^{alpha jM} ratio
    const double scale = M * std::exp(p.alpha * (spec.theta + u)) / p.nu_bar;
    double log_k_fact = std::lgamma(static_cast<double>(k) + 1.0);

    std::vector<double> vals;
    vals.reserve(w_bank.size());
    for (auto& [w1, w2] : w_bank) {
        double a = w1 * w2 * scale;
        double v = 0.0;
        if (a > 0.0)
            v = std::exp(-a * below_factor + k * std::log(a) - a - log_k_fact);
        vals.push_back(v);
    }
    MeanStderr ms = mean_stderr(vals);
    double osp = order_stat_prob(z_vec, rng);
    return {osp * ms.mean, osp * ms.stderr_, ms.count};
}

double factorial_moment_limit(const IntensitySpec& spec, const Rect& rect, int r,
                              const MomentTable& table) {
    if (r < 1 || r > table.r_max) throw std::invalid_argument("factorial_moment_limit: bad r");
    double mass = mean_mass(spec, rect);
    if (!std::isfinite(mass))
        throw std::domain_error("factorial_moment_limit: infinite intensity mass");
    double ew = table.ew[static_cast<std::size_t>(r - 1)];
    return std::pow(mass, r) * ew * ew;
}

double connect_prob_limit(const LimitParams& params) {
    double s = 1.0 - params.eta;
    return s * s;
}

void save_w_pairs(const std::vector<std::pair<double, double>>& bank, std::ostream& os) {
    os << bank.size() << "\n";
    char buf[80];
    for (auto& [a, b] : bank) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", a, b);
        os << buf;
    }
}

std::vector<std::pair<double, double>> load_w_pairs(std::istream& is) {
    std::size_t n = 0;
    if (!(is >> n)) throw std::runtime_error("load_w_pairs: bad header");
    std::vector<std::pair<double, double>> out(n);
    for (auto& [a, b] : out)
        if (!(is >> a >> b)) throw std::runtime_error("load_w_pairs: truncated bank");
    return out;
}

}  // namespace fpp
