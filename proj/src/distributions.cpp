#include "updp/distributions.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace updp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrtPi = 1.7724538509055160273;

double normal_quantile(double p) {
    if (p <= 0.0) return -kInf;
    if (p >= 1.0) return kInf;
    static const boost::math::normal_distribution<double> unit(0.0, 1.0);
    return boost::math::quantile(unit, p);
}

double normal_cdf(double z) {
    static const boost::math::normal_distribution<double> unit(0.0, 1.0);
    return boost::math::cdf(unit, z);
}

double normal_pdf(double z) {
    constexpr double kInvSqrt2Pi = 0.39894228040143267794;
    return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

template <typename F>
double integrate(const F& f, double a, double b) {
    if (!(a < b)) return 0.0;
    double error = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-10, &error);
}

// Marsaglia-Tsang squeeze method; exact for every real shape > 0.
double gamma_sample(double shape, NoiseSource& noise) {
    if (shape < 1.0) {
        const double boost_draw = gamma_sample(shape + 1.0, noise);
        return boost_draw * std::pow(noise.uniform_open(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = normal_quantile(noise.uniform_open());
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = noise.uniform_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double parse_double(const std::string& text) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw std::invalid_argument("distribution spec: bad number '" + text + "'");
    return value;
}

std::string format_double(double v) {
    char buf[40];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

using ParamMap = std::map<std::string, double>;

double take(ParamMap& params, const std::string& key, double fallback) {
    const auto it = params.find(key);
    if (it == params.end()) return fallback;
    const double v = it->second;
    params.erase(it);
    return v;
}

}  // namespace

DistributionSpec parse_distribution(const std::string& text) {
    const auto colon = text.find(':');
    const std::string family = text.substr(0, colon);
    ParamMap params;
    if (colon != std::string::npos) {
        std::string rest = text.substr(colon + 1);
        std::size_t pos = 0;
        while (pos < rest.size()) {
            auto comma = rest.find(',', pos);
            if (comma == std::string::npos) comma = rest.size();
            const std::string item = rest.substr(pos, comma - pos);
            const auto eq = item.find('=');
            if (eq == std::string::npos || eq == 0)
                throw std::invalid_argument("distribution spec: expected key=value, got '" + item + "'");
            params[item.substr(0, eq)] = parse_double(item.substr(eq + 1));
            pos = comma + 1;
        }
    }

    DistributionSpec spec;
    if (family == "gaussian") {
        Gaussian g{take(params, "mu", 0.0), take(params, "sigma", 1.0)};
        if (!(g.sigma > 0.0)) throw std::invalid_argument("gaussian: sigma must be positive");
        spec = g;
    } else if (family == "uniform") {
        Uniform u{take(params, "a", 0.0), take(params, "b", 1.0)};
        if (!(u.a < u.b)) throw std::invalid_argument("uniform: need a < b");
        spec = u;
    } else if (family == "student_t") {
        StudentT t{take(params, "nu", 1.0), take(params, "loc", 0.0), take(params, "scale", 1.0)};
        if (!(t.nu > 0.0)) throw std::invalid_argument("student_t: nu must be positive");
        if (!(t.scale > 0.0)) throw std::invalid_argument("student_t: scale must be positive");
        spec = t;
    } else if (family == "pareto") {
        Pareto p{take(params, "shape", 1.0), take(params, "scale", 1.0)};
        if (!(p.shape > 0.0)) throw std::invalid_argument("pareto: shape must be positive");
        if (!(p.scale > 0.0)) throw std::invalid_argument("pareto: scale must be positive");
        spec = p;
    } else if (family == "lognormal") {
        Lognormal l{take(params, "mu", 0.0), take(params, "sigma", 1.0)};
        if (!(l.sigma > 0.0)) throw std::invalid_argument("lognormal: sigma must be positive");
        spec = l;
    } else if (family == "point_mass") {
        spec = PointMass{take(params, "c", 0.0)};
    } else {
        throw std::invalid_argument("distribution spec: unknown family '" + family + "'");
    }
    if (!params.empty())
        throw std::invalid_argument("distribution spec: unknown parameter '" + params.begin()->first + "'");
    return spec;
}

std::string format_distribution(const DistributionSpec& spec) {
    return std::visit(
        [](const auto& d) -> std::string {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Gaussian>)
                return "gaussian:mu=" + format_double(d.mu) + ",sigma=" + format_double(d.sigma);
            else if constexpr (std::is_same_v<T, Uniform>)
                return "uniform:a=" + format_double(d.a) + ",b=" + format_double(d.b);
            else if constexpr (std::is_same_v<T, StudentT>)
                return "student_t:nu=" + format_double(d.nu) + ",loc=" + format_double(d.loc) +
                       ",scale=" + format_double(d.scale);
            else if constexpr (std::is_same_v<T, Pareto>)
                return "pareto:shape=" + format_double(d.shape) + ",scale=" + format_double(d.scale);
            else if constexpr (std::is_same_v<T, Lognormal>)
                return "lognormal:mu=" + format_double(d.mu) + ",sigma=" + format_double(d.sigma);
            else
                return "point_mass:c=" + format_double(d.c);
        },
        spec);
}

Dataset sample(const DistributionSpec& spec, std::size_t n, NoiseSource& noise) {
    std::vector<double> draws;
    draws.reserve(n);
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            for (std::size_t i = 0; i < n; ++i) {
                if constexpr (std::is_same_v<T, Gaussian>) {
                    draws.push_back(d.mu + d.sigma * normal_quantile(noise.uniform_open()));
                } else if constexpr (std::is_same_v<T, Uniform>) {
                    draws.push_back(d.a + (d.b - d.a) * noise.uniform());
                } else if constexpr (std::is_same_v<T, StudentT>) {
                    const double z = normal_quantile(noise.uniform_open());
                    const double chi2 = 2.0 * gamma_sample(0.5 * d.nu, noise);
                    draws.push_back(d.loc + d.scale * z / std::sqrt(chi2 / d.nu));
                } else if constexpr (std::is_same_v<T, Pareto>) {
                    draws.push_back(d.scale * std::pow(1.0 - noise.uniform_open(), -1.0 / d.shape));
                } else if constexpr (std::is_same_v<T, Lognormal>) {
                    draws.push_back(std::exp(d.mu + d.sigma * normal_quantile(noise.uniform_open())));
                } else {
                    draws.push_back(d.c);
                }
            }
        },
        spec);
    return Dataset(std::move(draws));
}

double pdf(const DistributionSpec& spec, double x) {
    return std::visit(
        [x](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Gaussian>) {
                return normal_pdf((x - d.mu) / d.sigma) / d.sigma;
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return (x < d.a || x > d.b) ? 0.0 : 1.0 / (d.b - d.a);
            } else if constexpr (std::is_same_v<T, StudentT>) {
                const boost::math::students_t_distribution<double> t(d.nu);
                return boost::math::pdf(t, (x - d.loc) / d.scale) / d.scale;
            } else if constexpr (std::is_same_v<T, Pareto>) {
                if (x < d.scale) return 0.0;
                return d.shape * std::pow(d.scale, d.shape) / std::pow(x, d.shape + 1.0);
            } else if constexpr (std::is_same_v<T, Lognormal>) {
                if (x <= 0.0) return 0.0;
                return normal_pdf((std::log(x) - d.mu) / d.sigma) / (x * d.sigma);
            } else {
                return 0.0;  // degenerate: no density
            }
        },
        spec);
}

double cdf(const DistributionSpec& spec, double x) {
    if (x == kInf) return 1.0;
    if (x == -kInf) return 0.0;
    return std::visit(
        [x](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Gaussian>) {
                return normal_cdf((x - d.mu) / d.sigma);
            } else if constexpr (std::is_same_v<T, Uniform>) {
                if (x <= d.a) return 0.0;
                if (x >= d.b) return 1.0;
                return (x - d.a) / (d.b - d.a);
            } else if constexpr (std::is_same_v<T, StudentT>) {
                const boost::math::students_t_distribution<double> t(d.nu);
                return boost::math::cdf(t, (x - d.loc) / d.scale);
            } else if constexpr (std::is_same_v<T, Pareto>) {
                if (x <= d.scale) return 0.0;
                return 1.0 - std::pow(d.scale / x, d.shape);
            } else if constexpr (std::is_same_v<T, Lognormal>) {
                if (x <= 0.0) return 0.0;
                return normal_cdf((std::log(x) - d.mu) / d.sigma);
            } else {
                return x >= d.c ? 1.0 : 0.0;
            }
        },
        spec);
}

double quantile(const DistributionSpec& spec, double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q must lie in [0, 1]");
    return std::visit(
        [q](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Gaussian>) {
                return d.mu + d.sigma * normal_quantile(q);
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return d.a + q * (d.b - d.a);
            } else if constexpr (std::is_same_v<T, StudentT>) {
                if (q <= 0.0) return -kInf;
                if (q >= 1.0) return kInf;
                const boost::math::students_t_distribution<double> t(d.nu);
                return d.loc + d.scale * boost::math::quantile(t, q);
            } else if constexpr (std::is_same_v<T, Pareto>) {
                if (q >= 1.0) return kInf;
                return d.scale * std::pow(1.0 - q, -1.0 / d.shape);
            } else if constexpr (std::is_same_v<T, Lognormal>) {
                if (q <= 0.0) return 0.0;
                return std::exp(d.mu + d.sigma * normal_quantile(q));
            } else {
                return d.c;
            }
        },
        spec);
}

std::optional<double> population_mean(const DistributionSpec& spec) {
    return std::visit(
        [](const auto& d) -> std::optional<double> {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Gaussian>) return d.mu;
            else if constexpr (std::is_same_v<T, Uniform>) return 0.5 * (d.a + d.b);
            else if constexpr (std::is_same_v<T, StudentT>) {
                if (d.nu <= 1.0) return std::nullopt;
                return d.loc;
            } else if constexpr (std::is_same_v<T, Pareto>) {
                if (d.shape <= 1.0) return std::nullopt;
                return d.shape * d.scale / (d.shape - 1.0);
            } else if constexpr (std::is_same_v<T, Lognormal>) {
                return std::exp(d.mu + 0.5 * d.sigma * d.sigma);
            } else {
                return d.c;
            }
        },
        spec);
}

std::optional<double> population_variance(const DistributionSpec& spec) {
    return std::visit(
        [](const auto& d) -> std::optional<double> {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Gaussian>) return d.sigma * d.sigma;
            else if constexpr (std::is_same_v<T, Uniform>) {
                const double w = d.b - d.a;
                return w * w / 12.0;
            } else if constexpr (std::is_same_v<T, StudentT>) {
                if (d.nu <= 2.0) return std::nullopt;
                return d.scale * d.scale * d.nu / (d.nu - 2.0);
            } else if constexpr (std::is_same_v<T, Pareto>) {
                if (d.shape <= 2.0) return std::nullopt;
                const double s = d.shape;
                return d.scale * d.scale * s / ((s - 1.0) * (s - 1.0) * (s - 2.0));
            } else if constexpr (std::is_same_v<T, Lognormal>) {
                const double s2 = d.sigma * d.sigma;
                return std::expm1(s2) * std::exp(2.0 * d.mu + s2);
            } else {
                return 0.0;
            }
        },
        spec);
}

double population_iqr(const DistributionSpec& spec) {
    return quantile(spec, 0.75) - quantile(spec, 0.25);
}

std::optional<double> central_moment(const DistributionSpec& spec, int k) {
    if (k < 1) throw std::invalid_argument("central_moment: k must be >= 1");
    const std::optional<double> mu = population_mean(spec);
    if (!mu) return std::nullopt;
    const double kd = static_cast<double>(k);
    return std::visit(
        [&](const auto& d) -> std::optional<double> {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Gaussian>) {
                return std::pow(d.sigma, kd) * std::exp2(0.5 * kd) *
                       std::tgamma(0.5 * (kd + 1.0)) / kSqrtPi;
            } else if constexpr (std::is_same_v<T, Uniform>) {
                return std::pow(d.b - d.a, kd) / (std::exp2(kd) * (kd + 1.0));
            } else if constexpr (std::is_same_v<T, StudentT>) {
                if (kd >= d.nu) return std::nullopt;
                return std::pow(d.scale, kd) * std::pow(d.nu, 0.5 * kd) *
                       std::tgamma(0.5 * (kd + 1.0)) * std::tgamma(0.5 * (d.nu - kd)) /
                       (kSqrtPi * std::tgamma(0.5 * d.nu));
            } else if constexpr (std::is_same_v<T, Pareto>) {
                if (d.shape <= kd) return std::nullopt;
                const double center = *mu;
                const auto f = [&](double x) {
                    return std::pow(std::fabs(x - center), kd) * pdf(DistributionSpec(d), x);
                };
                return integrate(f, d.scale, kInf);
            } else if constexpr (std::is_same_v<T, Lognormal>) {
                const double center = *mu;
                const auto f = [&](double x) {
                    return std::pow(std::fabs(x - center), kd) * pdf(DistributionSpec(d), x);
                };
                return integrate(f, 0.0, kInf);
            } else {
                return 0.0;
            }
        },
        spec);
}

double phi(const DistributionSpec& spec, double level) {
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("phi: level must lie in (0, 1)");
    if (std::holds_alternative<PointMass>(spec)) return 0.0;

    const auto window = [&](double q) {
        const double lo = quantile(spec, q);
        const double hi = quantile(spec, q + level);
        if (!std::isfinite(lo) || !std::isfinite(hi)) return kInf;
        return hi - lo;
    };

    // Coarse scan to bracket the minimum of the (quasiconvex) window width,
    // then golden-section refinement.
    const double q_max = 1.0 - level;
    const int grid = 256;
    double best_q = 0.0;
    double best = kInf;
    for (int i = 0; i <= grid; ++i) {
        const double q = q_max * static_cast<double>(i) / grid;
        const double w = window(q);
        if (w < best) { best = w; best_q = q; }
    }
    double lo = std::max(0.0, best_q - q_max / grid);
    double hi = std::min(q_max, best_q + q_max / grid);
    constexpr double kGolden = 0.6180339887498949;
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double f1 = window(x1);
    double f2 = window(x2);
    for (int iter = 0; iter < 120 && (hi - lo) > 1e-13; ++iter) {
        if (f1 <= f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = window(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = window(x2);
        }
    }
    return std::min(best, std::min(f1, f2));
}

double theta(const DistributionSpec& spec, double kappa) {
    if (!(kappa > 0.0)) throw std::invalid_argument("theta: kappa must be positive");
    const double q1 = quantile(spec, 0.25);
    const double q3 = quantile(spec, 0.75);
    const double masses[4] = {
        cdf(spec, q1) - cdf(spec, q1 - kappa),
        cdf(spec, q1 + kappa) - cdf(spec, q1),
        cdf(spec, q3) - cdf(spec, q3 - kappa),
        cdf(spec, q3 + kappa) - cdf(spec, q3),
    };
    return *std::min_element(masses, masses + 4) / kappa;
}

std::optional<TailExpectation> tail_expectation(const DistributionSpec& spec, double xi) {
    if (!(xi >= 0.0)) throw std::invalid_argument("tail_expectation: xi must be nonnegative");
    const std::optional<double> mu = population_mean(spec);
    if (!mu) return std::nullopt;
    if (std::holds_alternative<PointMass>(spec)) return TailExpectation{0.0, 0.0};

    const double lo_cut = *mu - xi;
    const double hi_cut = *mu + xi;
    const double support_lo = quantile(spec, 0.0);
    const double support_hi = quantile(spec, 1.0);

    const auto lower_f = [&](double x) { return (x - lo_cut) * pdf(spec, x); };
    const auto upper_f = [&](double x) { return (x - hi_cut) * pdf(spec, x); };
    TailExpectation tails;
    tails.lower = integrate(lower_f, support_lo, std::min(lo_cut, support_hi));
    tails.upper = integrate(upper_f, std::max(hi_cut, support_lo), support_hi);
    return tails;
}

double statistical_width(const DistributionSpec& spec, std::size_t m, double beta,
                         std::size_t trials, NoiseSource& noise) {
    if (m < 2) throw std::invalid_argument("statistical_width: need m >= 2");
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("statistical_width: beta must lie in (0, 1)");
    if (trials < 100) throw std::invalid_argument("statistical_width: need trials >= 100");
    std::vector<double> widths;
    widths.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t)
        widths.push_back(sample(spec, m, noise).width());
    std::sort(widths.begin(), widths.end());
    const double rank = std::ceil((1.0 - beta) * static_cast<double>(trials));
    const auto idx = static_cast<std::size_t>(std::max(1.0, rank)) - 1;
    return widths[std::min(idx, trials - 1)];
}

PopulationParams population_params(const DistributionSpec& spec) {
    return PopulationParams{population_mean(spec), population_variance(spec), population_iqr(spec)};
}

}  // namespace updp
