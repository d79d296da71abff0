#include "fpp/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fpp {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// best rational p/q with q <= max_den approximating v (continued fractions)
bool to_rational(double v, std::uint64_t max_den, std::int64_t& num, std::int64_t& den) {
    double x = v;
    std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int it = 0; it < 64; ++it) {
        double fa = std::floor(x);
        if (fa > 9e17) return false;
        std::int64_t a = static_cast<std::int64_t>(fa);
        std::int64_t p2 = a * p1 + p0;
        std::int64_t q2 = a * q1 + q0;
        if (q2 < 0 || static_cast<std::uint64_t>(q2) > max_den) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        double frac = x - fa;
        if (frac < 1e-15) break;
        x = 1.0 / frac;
    }
    if (q1 == 0) return false;
    num = p1;
    den = q1;
    return std::abs(v - static_cast<double>(p1) / static_cast<double>(q1)) <=
           1e-9 * std::max(1.0, std::abs(v));
}

}  // namespace

WeightModel WeightModel::exponential(double rate) {
    require(rate > 0.0 && std::isfinite(rate), "exponential: rate must be positive");
    WeightModel m;
    m.kind_ = WeightKind::exponential;
    m.rate_ = rate;
    return m;
}

WeightModel WeightModel::uniform_interval(double lo, double hi) {
    require(lo >= 0.0 && hi > lo && std::isfinite(hi), "uniform: need 0 <= lo < hi");
    WeightModel m;
    m.kind_ = WeightKind::uniform;
    m.lo_ = lo;
    m.hi_ = hi;
    return m;
}

WeightModel WeightModel::finite_support(std::vector<std::pair<double, double>> support,
                                        std::optional<double> declared_span) {
    require(!support.empty(), "finite_support: empty support");
    std::sort(support.begin(), support.end());
    std::vector<std::pair<double, double>> merged;
    double psum = 0.0;
    for (auto& [v, p] : support) {
        require(std::isfinite(v) && v >= 0.0, "finite_support: values must be >= 0");
        require(p >= 0.0 && p <= 1.0, "finite_support: probabilities must be in [0,1]");
        psum += p;
        if (p == 0.0) continue;
        if (!merged.empty() && merged.back().first == v)
            merged.back().second += p;
        else
            merged.emplace_back(v, p);
    }
    require(std::abs(psum - 1.0) <= 1e-9, "finite_support: probabilities must sum to 1");
    require(merged.size() >= 2, "finite_support: degenerate (point mass)");
    if (declared_span) {
        double M = *declared_span;
        require(M > 0.0, "finite_support: declared span must be positive");
        for (auto& [v, p] : merged) {
            double k = v / M;
            require(std::abs(k - std::round(k)) <= 1e-12 * std::max(1.0, std::abs(k)),
                    "finite_support: support value not a multiple of the declared span");
        }
    }
    WeightModel m;
    m.kind_ = WeightKind::finite_support;
    m.support_ = std::move(merged);
    m.declared_span_ = declared_span;
    return m;
}

WeightModel WeightModel::zero_mix(double q, WeightModel tail) {
    require(q >= 0.0 && q < 1.0, "zero_mix: q must be in [0,1)");
    require(tail.kind_ == WeightKind::exponential || tail.kind_ == WeightKind::uniform,
            "zero_mix: tail must be a continuous model");
    WeightModel m;
    m.kind_ = WeightKind::zero_mix;
    m.q_ = q;
    m.tail_ = std::make_shared<WeightModel>(std::move(tail));
    return m;
}

const WeightModel& WeightModel::tail() const {
    if (!tail_) throw std::logic_error("tail() on non-mixture model");
    return *tail_;
}

double WeightModel::laplace(double s) const {
    if (s < 0.0) throw std::domain_error("laplace: s must be >= 0");
    switch (kind_) {
        case WeightKind::exponential:
            return rate_ / (rate_ + s);
        case WeightKind::uniform: {
            if (s == 0.0) return 1.0;
            double w = hi_ - lo_;
            return std::exp(-s * lo_) * (-std::expm1(-s * w)) / (s * w);
        }
        case WeightKind::finite_support: {
            double r = 0.0;
            for (auto& [v, p] : support_) r += p * std::exp(-s * v);
            return r;
        }
        case WeightKind::zero_mix:
            return q_ + (1.0 - q_) * tail_->laplace(s);
    }
    return 0.0;
}

double WeightModel::mean_tilt(double s) const {
    switch (kind_) {
        case WeightKind::exponential:
            return rate_ / ((rate_ + s) * (rate_ + s));
        case WeightKind::uniform: {
            double w = hi_ - lo_;
            if (s < 1e-8) {
                // E[X e^{-sX}] ~ E[X] - s E[X^2]
                double m1 = (lo_ + hi_) / 2.0;
                double m2 = (lo_ * lo_ + lo_ * hi_ + hi_ * hi_) / 3.0;
                return m1 - s * m2;
            }
            auto anti = [&](double x) { return (x / s + 1.0 / (s * s)) * std::exp(-s * x); };
            return (anti(lo_) - anti(hi_)) / w;
        }
        case WeightKind::finite_support: {
            double r = 0.0;
            for (auto& [v, p] : support_) r += p * v * std::exp(-s * v);
            return r;
        }
        case WeightKind::zero_mix:
            return (1.0 - q_) * tail_->mean_tilt(s);
    }
    return 0.0;
}

double WeightModel::mean_sq_tilt(double s) const {
    switch (kind_) {
        case WeightKind::exponential: {
            double d = rate_ + s;
            return 2.0 * rate_ / (d * d * d);
        }
        case WeightKind::uniform: {
            double w = hi_ - lo_;
            if (s < 1e-8) {
                double m2 = (lo_ * lo_ + lo_ * hi_ + hi_ * hi_) / 3.0;
                double m3 = (lo_ + hi_) * (lo_ * lo_ + hi_ * hi_) / 4.0;
                return m2 - s * m3;
            }
            auto anti = [&](double x) {
                return (x * x / s + 2.0 * x / (s * s) + 2.0 / (s * s * s)) * std::exp(-s * x);
            };
            return (anti(lo_) - anti(hi_)) / w;
        }
        case WeightKind::finite_support: {
            double r = 0.0;
            for (auto& [v, p] : support_) r += p * v * v * std::exp(-s * v);
            return r;
        }
        case WeightKind::zero_mix:
            return (1.0 - q_) * tail_->mean_sq_tilt(s);
    }
    return 0.0;
}

double WeightModel::prob_zero() const {
    switch (kind_) {
        case WeightKind::exponential:
        case WeightKind::uniform:
            return 0.0;
        case WeightKind::finite_support: {
            for (auto& [v, p] : support_)
                if (v == 0.0) return p;
            return 0.0;
        }
        case WeightKind::zero_mix:
            return q_;
    }
    return 0.0;
}

double WeightModel::mean() const {
    switch (kind_) {
        case WeightKind::exponential:
            return 1.0 / rate_;
        case WeightKind::uniform:
            return (lo_ + hi_) / 2.0;
        case WeightKind::finite_support: {
            double r = 0.0;
            for (auto& [v, p] : support_) r += p * v;
            return r;
        }
        case WeightKind::zero_mix:
            return (1.0 - q_) * tail_->mean();
    }
    return 0.0;
}

double WeightModel::sample(RandomStream& rng) const {
    switch (kind_) {
        case WeightKind::exponential:
            return rng.exponential(rate_);
        case WeightKind::uniform:
            return rng.uniform_in(lo_, hi_);
        case WeightKind::finite_support: {
            double u = rng.uniform();
            double cum = 0.0;
            for (auto& [v, p] : support_) {
                cum += p;
                if (u < cum) return v;
            }
            return support_.back().first;
        }
        case WeightKind::zero_mix: {
            if (rng.uniform() < q_) return 0.0;
            return tail_->sample(rng);
        }
    }
    return 0.0;
}

double WeightModel::sample_tilted(double lambda, double alpha, RandomStream& rng) const {
    switch (kind_) {
        case WeightKind::exponential:
            return rng.exponential(rate_ + alpha);
        case WeightKind::uniform: {
            // density proportional to e^{-alpha x} on [lo, hi]
            double ea = std::exp(-alpha * lo_), eb = std::exp(-alpha * hi_);
            double u = rng.uniform();
            return -std::log(ea - u * (ea - eb)) / alpha;
        }
        case WeightKind::finite_support: {
            double u = rng.uniform();
            double cum = 0.0;
            for (auto& [v, p] : support_) {
                cum += lambda * p * std::exp(-alpha * v);
                if (u < cum) return v;
            }
            return support_.back().first;
        }
        case WeightKind::zero_mix: {
            // the tilted law has atom lambda*q at zero
            if (rng.uniform() < lambda * q_) return 0.0;
            double lambda_tail = 1.0 / tail_->laplace(alpha);
            return tail_->sample_tilted(lambda_tail, alpha, rng);
        }
    }
    return 0.0;
}

std::optional<double> WeightModel::detect_span(std::uint64_t max_denominator) const {
    if (kind_ != WeightKind::finite_support) return std::nullopt;
    if (declared_span_) return declared_span_;
    std::int64_t lcm = 1;
    std::vector<std::pair<std::int64_t, std::int64_t>> fracs;
    for (auto& [v, p] : support_) {
        if (v == 0.0) continue;
        std::int64_t num, den;
        if (!to_rational(v, max_denominator, num, den))
            throw std::runtime_error(
                "span undecidable: support value not rational within the denominator bound; "
                "declare a span explicitly");
        fracs.emplace_back(num, den);
        std::int64_t g = std::gcd(lcm, den);
        if (lcm / g > (std::int64_t{1} << 40) / den)
            throw std::runtime_error("span undecidable: common denominator overflow");
        lcm = lcm / g * den;
    }
    std::int64_t g = 0;
    for (auto& [num, den] : fracs) g = std::gcd(g, num * (lcm / den));
    if (g == 0) return std::nullopt;
    return static_cast<double>(g) / static_cast<double>(lcm);
}

TiltedMoments WeightModel::tilt_moments(double lambda, double alpha) const {
    if (std::abs(lambda * laplace(alpha) - 1.0) > 1e-9)
        throw std::invalid_argument("tilt_moments: (lambda, alpha) do not satisfy lambda*R(alpha)=1");
    TiltedMoments tm;
    tm.nu_bar = lambda * mean_tilt(alpha);
    tm.sigma2_bar = lambda * mean_sq_tilt(alpha) - tm.nu_bar * tm.nu_bar;
    return tm;
}

nlohmann::json WeightModel::to_json() const {
    nlohmann::json j;
    switch (kind_) {
        case WeightKind::exponential:
            j["kind"] = "exponential";
            j["rate"] = rate_;
            break;
        case WeightKind::uniform:
            j["kind"] = "uniform";
            j["lo"] = lo_;
            j["hi"] = hi_;
            break;
        case WeightKind::finite_support: {
            j["kind"] = "finite_support";
            auto arr = nlohmann::json::array();
            for (auto& [v, p] : support_) arr.push_back({v, p});
            j["support"] = arr;
            if (declared_span_) j["span"] = *declared_span_;
            break;
        }
        case WeightKind::zero_mix:
            j["kind"] = "zero_mix";
            j["q"] = q_;
            j["tail"] = tail_->to_json();
            break;
    }
    return j;
}

WeightModel WeightModel::from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind");
    if (kind == "exponential") return exponential(j.at("rate"));
    if (kind == "uniform") return uniform_interval(j.at("lo"), j.at("hi"));
    if (kind == "finite_support") {
        std::vector<std::pair<double, double>> support;
        for (auto& e : j.at("support")) support.emplace_back(e.at(0), e.at(1));
        std::optional<double> span;
        if (j.contains("span")) span = j.at("span").get<double>();
        return finite_support(std::move(support), span);
    }
    if (kind == "zero_mix") return zero_mix(j.at("q"), from_json(j.at("tail")));
    throw std::invalid_argument("unknown weight model kind: " + kind);
}

std::string WeightModel::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case WeightKind::exponential:
            os << "exponential(" << rate_ << ")";
            break;
        case WeightKind::uniform:
            os << "uniform(" << lo_ << "," << hi_ << ")";
            break;
        case WeightKind::finite_support: {
            os << "finite{";
            for (std::size_t i = 0; i < support_.size(); ++i) {
                if (i) os << ",";
                os << "(" << support_[i].first << "," << support_[i].second << ")";
            }
            os << "}";
            break;
        }
        case WeightKind::zero_mix:
            os << "zero_mix(" << q_ << "," << tail_->describe() << ")";
            break;
    }
    return os.str();
}

}  // namespace fpp
