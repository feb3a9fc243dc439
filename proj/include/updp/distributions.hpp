#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "updp/dataset.hpp"
#include "updp/noise.hpp"

namespace updp {

// Population families the harness can sample from and compute ground truth
// for. Text form (CLI): "gaussian:mu=0,sigma=1", "uniform:a=0,b=1",
// "student_t:nu=3,loc=0,scale=1", "pareto:shape=1.5,scale=1",
// "lognormal:mu=0,sigma=1", "point_mass:c=3".
struct Gaussian { double mu = 0.0; double sigma = 1.0; };
struct Uniform { double a = 0.0; double b = 1.0; };
struct StudentT { double nu = 1.0; double loc = 0.0; double scale = 1.0; };
struct Pareto { double shape = 1.0; double scale = 1.0; };
struct Lognormal { double mu = 0.0; double sigma = 1.0; };
struct PointMass { double c = 0.0; };

using DistributionSpec = std::variant<Gaussian, Uniform, StudentT, Pareto, Lognormal, PointMass>;

DistributionSpec parse_distribution(const std::string& text);
std::string format_distribution(const DistributionSpec& spec);

// n iid draws as a sorted dataset. Inverse-CDF transforms throughout, except
// Student-t, which uses a normal/chi-square ratio for speed; either way the
// stream is fully determined by the seed.
Dataset sample(const DistributionSpec& spec, std::size_t n, NoiseSource& noise);

double pdf(const DistributionSpec& spec, double x);
double cdf(const DistributionSpec& spec, double x);
// F^{-1}(q) for q in [0, 1]; +-inf where the support is unbounded.
double quantile(const DistributionSpec& spec, double q);

// Moments are absent (not "very large") whenever the population does not
// have them, so callers can skip rather than mis-assert.
std::optional<double> population_mean(const DistributionSpec& spec);
std::optional<double> population_variance(const DistributionSpec& spec);
double population_iqr(const DistributionSpec& spec);

// E|X - mu|^k; absent when infinite or when the mean itself is undefined.
std::optional<double> central_moment(const DistributionSpec& spec, int k);

// Width of the narrowest interval carrying probability mass `level`
// (phi in the utility bounds). Found by a quasiconvex search over
// F^{-1}(q + level) - F^{-1}(q); relies on the shipped families being
// unimodal. Relative tolerance 1e-6.
double phi(const DistributionSpec& spec, double level);

// Density floor around the quartiles: (1/kappa) times the least probability
// mass among the four width-kappa intervals flanking F^{-1}(1/4) and
// F^{-1}(3/4).
double theta(const DistributionSpec& spec, double kappa);

// (E[(X - (mu-xi)) 1{X < mu-xi}], E[(X - (mu+xi)) 1{X > mu+xi}]) by adaptive
// quadrature, absolute tolerance 1e-8. Absent when the mean is.
struct TailExpectation { double lower = 0.0; double upper = 0.0; };
std::optional<TailExpectation> tail_expectation(const DistributionSpec& spec, double xi);

// Monte-Carlo (1-beta)-quantile of the sample width gamma(D) = X_n - X_1
// over datasets of size m.
double statistical_width(const DistributionSpec& spec, std::size_t m, double beta,
                         std::size_t trials, NoiseSource& noise);

// Bundle of the headline population quantities (absent where undefined).
struct PopulationParams {
    std::optional<double> mean;
    std::optional<double> variance;
    double iqr = 0.0;
};
PopulationParams population_params(const DistributionSpec& spec);

}  // namespace updp
