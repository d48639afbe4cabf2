#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "wfit/distributions.hpp"
#include "wfit/moments.hpp"

using namespace wfit;

namespace {

std::vector<Params> parameter_grid() {
  return {
      GGParams{1.0, 1.0, 1.0},      GGParams{2.909, 0.952, 0.5075}, GGParams{0.4, 0.05, 2.2},
      GGParams{12.0, 0.3, 0.7},     GWParams{0.0, 8.0, 1.3},        GWParams{-0.8, 5.0, 0.6},
      GWParams{0.334, 20.0, 0.9},   GWParams{-3.0, 2.0, 2.0},       EWParams{0.727, 6.446, 0.379},
      EWParams{10.0, 0.4, 2.5},     EWParams{1.083, 5.434, 0.457},  MOWParams{0.2, 0.3, 1.1},
      MOWParams{0.05, 4.0, 0.8},    EPWParams{-0.572, 1.206, 0.022}, EPWParams{2.5, 0.7, 0.3},
      EPWParams{45.0, 1.5, 0.01},
  };
}

const std::vector<double> kProbabilities{1e-9, 1e-6, 1e-3, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999999};

// Integrates in log-time, s = log t, where the integrand pdf(e^s) e^s is bounded.
double integrate_pdf(const Params& p) {
  const double upper = support_upper(p);
  auto g = [&](double s) {
    const double t = std::exp(s);
    if (!(t > 0.0) || t >= upper || !std::isfinite(t)) return 0.0;
    return std::exp(log_pdf(p, t) + s);
  };
  if (std::isfinite(upper)) {
    boost::math::quadrature::exp_sinh<double> es;
    return es.integrate(g, -std::numeric_limits<double>::infinity(), std::log(upper), 1e-12);
  }
  boost::math::quadrature::sinh_sinh<double> ss;
  return ss.integrate(g, 1e-12);
}

double weibull_cdf(double t, double shape, double scale) { return -std::expm1(-std::pow(t / scale, shape)); }

double weibull_pdf(double t, double shape, double scale) {
  const double z = std::pow(t / scale, shape);
  return shape / t * z * std::exp(-z);
}

const std::vector<double> kTimes{0.01, 0.3, 1.0, 2.7, 6.0, 15.0, 40.0};

}  // namespace

TEST(Distributions, QuantileCdfRoundTrip) {
  for (const auto& p : parameter_grid()) {
    for (double u : kProbabilities) {
      const double t = quantile(p, u);
      ASSERT_TRUE(t > 0.0 && std::isfinite(t)) << family_name(family_of(p)) << " u=" << u;
      EXPECT_NEAR(cdf(p, t), u, 1e-9) << family_name(family_of(p)) << " u=" << u;
    }
  }
}

TEST(Distributions, PdfIntegratesToOne) {
  for (const auto& p : parameter_grid()) {
    EXPECT_NEAR(integrate_pdf(p), 1.0, 1e-6) << family_name(family_of(p));
  }
}

TEST(Distributions, SurvivalComplementsCdf) {
  for (const auto& p : parameter_grid()) {
    for (double u : {0.05, 0.5, 0.95}) {
      const double t = quantile(p, u);
      EXPECT_NEAR(cdf(p, t) + survival(p, t), 1.0, 1e-12);
      EXPECT_NEAR(std::exp(log_survival(p, t)), survival(p, t), 1e-14);
    }
  }
}

TEST(Distributions, CdfIsMonotone) {
  for (const auto& p : parameter_grid()) {
    double prev = 0.0;
    for (int i = 1; i <= 200; ++i) {
      const double t = quantile(p, 0.999) * i / 200.0;
      const double c = cdf(p, t);
      EXPECT_GE(c, prev);
      prev = c;
    }
  }
}

TEST(Distributions, HazardIsDensityOverSurvival) {
  for (const auto& p : parameter_grid()) {
    const double t = quantile(p, 0.4);
    EXPECT_NEAR(hazard(p, t), pdf(p, t) / survival(p, t), 1e-10 * hazard(p, t));
  }
}

TEST(Reductions, GeneralizedGammaWithUnitShapeIsWeibull) {
  const GGParams p{1.0, 0.2, 1.7};
  for (double t : kTimes) {
    EXPECT_NEAR(cdf(p, t), weibull_cdf(t, 1.7, 1.0 / 0.2), 1e-9);
    EXPECT_NEAR(pdf(p, t), weibull_pdf(t, 1.7, 1.0 / 0.2), 1e-9);
  }
}

TEST(Reductions, GeneralizedGammaWithUnitPowerIsGamma) {
  const GGParams p{3.3, 0.4, 1.0};
  for (double t : kTimes) {
    EXPECT_NEAR(cdf(p, t), boost::math::gamma_p(3.3, 0.4 * t), 1e-9);
    EXPECT_NEAR(pdf(p, t), 0.4 * boost::math::gamma_p_derivative(3.3, 0.4 * t), 1e-9);
  }
}

TEST(Reductions, ExponentiatedWeibullWithUnitExponentIsWeibull) {
  const EWParams p{5.0, 1.0, 0.8};
  for (double t : kTimes) {
    EXPECT_NEAR(cdf(p, t), weibull_cdf(t, 0.8, 5.0), 1e-9);
    EXPECT_NEAR(pdf(p, t), weibull_pdf(t, 0.8, 5.0), 1e-9);
  }
}

TEST(Reductions, MarshallOlkinWithUnitTiltIsWeibull) {
  const MOWParams p{0.3, 1.0, 1.4};
  const double scale = std::pow(0.3, -1.0 / 1.4);
  for (double t : kTimes) {
    EXPECT_NEAR(cdf(p, t), weibull_cdf(t, 1.4, scale), 1e-9);
    EXPECT_NEAR(pdf(p, t), weibull_pdf(t, 1.4, scale), 1e-9);
  }
}

TEST(Reductions, GeneralizedWeibullAtZeroLambdaIsWeibull) {
  // Shape 1/alpha, scale phi.
  for (double lambda : {0.0, 1e-13, -1e-13, 1e-9, -1e-9}) {
    const GWParams p{lambda, 8.0, 1.25};
    for (double t : kTimes) {
      EXPECT_NEAR(cdf(p, t), weibull_cdf(t, 0.8, 8.0), 1e-9) << "lambda=" << lambda << " t=" << t;
      EXPECT_NEAR(pdf(p, t), weibull_pdf(t, 0.8, 8.0), 1e-9) << "lambda=" << lambda << " t=" << t;
    }
  }
}

TEST(Reductions, GeneralizedWeibullIsContinuousInLambda) {
  const GWParams w{0.0, 8.0, 1.25};
  for (double lambda : {1e-6, -1e-6}) {
    const GWParams p{lambda, 8.0, 1.25};
    for (double t : kTimes) EXPECT_NEAR(cdf(p, t), cdf(w, t), 1e-6);
  }
}

TEST(Reductions, ExponentiatedWeibullUnitShapesHaveConstantHazard) {
  const EWParams p{4.0, 1.0, 1.0};
  for (double t : kTimes) EXPECT_NEAR(hazard(p, t), 0.25, 1e-12);
}

TEST(Validation, RejectsInvalidParameters) {
  EXPECT_THROW(cdf(GGParams{0.0, 1.0, 1.0}, 1.0), ParameterError);
  EXPECT_THROW(cdf(GGParams{1.0, -1.0, 1.0}, 1.0), ParameterError);
  EXPECT_THROW(cdf(GWParams{0.1, 1.0, 0.0}, 1.0), ParameterError);
  EXPECT_THROW(cdf(EWParams{1.0, std::numeric_limits<double>::quiet_NaN(), 1.0}, 1.0), ParameterError);
  EXPECT_THROW(cdf(MOWParams{1.0, 0.0, 1.0}, 1.0), ParameterError);
  EXPECT_THROW(cdf(EPWParams{0.0, 1.0, 1.0}, 1.0), ParameterError);
  EXPECT_FALSE(is_valid(Params{EPWParams{0.0, 1.0, 1.0}}));
  EXPECT_TRUE(is_valid(Params{GWParams{-2.0, 1.0, 1.0}}));
}

TEST(Validation, RejectsBadArguments) {
  const EWParams p{1.0, 1.0, 1.0};
  EXPECT_THROW(cdf(p, 0.0), DomainError);
  EXPECT_THROW(pdf(p, -1.0), DomainError);
  EXPECT_THROW(quantile(p, 0.0), DomainError);
  EXPECT_THROW(quantile(p, 1.0), DomainError);
  EXPECT_THROW(quantile(p, std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST(Validation, GeneralizedWeibullBoundedSupport) {
  const GWParams p{0.5, 2.0, 1.0};
  EXPECT_DOUBLE_EQ(support_upper(p), 4.0);
  EXPECT_NO_THROW(cdf(p, 3.9));
  EXPECT_THROW(cdf(p, 4.0), SupportError);
  EXPECT_THROW(pdf(p, 10.0), SupportError);
  EXPECT_LT(quantile(p, 0.999999), 4.0);
}

TEST(Families, NamesAndParsing) {
  EXPECT_EQ(family_name(Family::EPW), "EPW");
  EXPECT_EQ(parse_family("ew"), Family::EW);
  EXPECT_EQ(parse_family("EWP"), Family::EPW);
  EXPECT_EQ(parse_family("Mow"), Family::MOW);
  EXPECT_THROW(parse_family("lognormal"), std::invalid_argument);
  EXPECT_EQ(param_names(Family::EW)[0], "sigma");
  const Params p = make_params(Family::MOW, {0.1, 2.0, 3.0});
  EXPECT_EQ(family_of(p), Family::MOW);
  EXPECT_EQ(param_values(p)[2], 3.0);
}

TEST(Moments, GeneralizedGammaMeanVarianceMatchQuadrature) {
  const GGParams p{2.909, 0.952, 0.5075};
  const auto mv = gg_mean_variance(p);
  boost::math::quadrature::exp_sinh<double> es;
  const double m1 = es.integrate([&](double t) { return t > 0 ? t * pdf(p, t) : 0.0; }, 0.0,
                                 std::numeric_limits<double>::infinity(), 1e-12);
  const double m2 = es.integrate([&](double t) { return t > 0 ? t * t * pdf(p, t) : 0.0; }, 0.0,
                                 std::numeric_limits<double>::infinity(), 1e-12);
  EXPECT_NEAR(mv.mean, m1, 1e-7 * m1);
  EXPECT_NEAR(mv.variance, m2 - m1 * m1, 1e-6 * mv.variance);
}

TEST(Moments, ExponentiatedWeibullSeriesAgreesWithQuadrature) {
  for (const auto& p : {EWParams{2.0, 3.0, 1.5}, EWParams{1.0, 2.5, 2.0}, EWParams{0.727, 6.446, 0.379}}) {
    for (int k : {1, 2}) {
      const double q = ew_kth_moment(p, k);
      const auto s = ew_kth_moment_series(p, k, 200000);
      EXPECT_NEAR(s.value, q, std::max(1e-8 * q, 2.0 * s.truncation_bound)) << p.phi << ' ' << k;
    }
  }
}

TEST(Moments, ExponentiatedWeibullIntegerExponentSeriesTerminates) {
  const EWParams p{2.0, 3.0, 1.5};
  const auto s = ew_kth_moment_series(p, 1);
  EXPECT_LE(s.terms, 3);
  EXPECT_EQ(s.truncation_bound, 0.0);
}

TEST(Moments, ExponentiatedWeibullReducesToWeibullMean) {
  const EWParams p{3.0, 1.0, 2.0};
  EXPECT_NEAR(ew_kth_moment(p, 1), 3.0 * std::tgamma(1.5), 1e-10);
}
