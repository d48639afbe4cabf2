#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "wfit/datasets.hpp"
#include "wfit/model_selection.hpp"
#include "wfit/prediction.hpp"

using namespace wfit;

TEST(Prediction, QuantileSatisfiesCdfOnEveryDataset) {
  for (auto id : kAllDatasets) {
    const auto s = load_embedded(id);
    for (auto f : kAllFamilies) {
      const auto fit = fit_mle(f, s);
      for (double u : {0.05, 0.25, 0.5, 0.9}) {
        const auto plan = predict_maintenance(fit, u);
        EXPECT_NEAR(cdf(fit.params, plan.y_star), u, 1e-9) << dataset_name(id) << ' ' << family_name(f);
        EXPECT_EQ(plan.y_star, quantile(fit.params, u));
      }
    }
  }
}

TEST(Prediction, MonotoneInLevel) {
  const auto s = load_embedded(DatasetId::TransmissionB);
  for (auto f : kAllFamilies) {
    const auto fit = fit_mle(f, s);
    double prev = 0.0;
    for (int i = 1; i < 100; ++i) {
      const double y = predict_maintenance(fit, i / 100.0).y_star;
      EXPECT_GT(y, prev) << family_name(f) << " u=" << i / 100.0;
      prev = y;
    }
  }
}

TEST(Prediction, VanishesAsLevelGoesToZero) {
  const auto fit = fit_mle(Family::EW, load_embedded(DatasetId::PrickerA));
  double prev = predict_maintenance(fit, 1e-2).y_star;
  for (double u : {1e-4, 1e-6, 1e-8, 1e-10}) {
    const double y = predict_maintenance(fit, u).y_star;
    EXPECT_LT(y, prev);
    EXPECT_GT(y, 0.0);
    prev = y;
  }
  // With v = u^(1/phi): log y* = log sigma + (log v + v / 2 + O(v^2)) / alpha.
  const auto& p = std::get<EWParams>(fit.params);
  const double u = 1e-200;
  const double v = std::pow(u, 1.0 / p.phi);
  EXPECT_NEAR(std::log(predict_maintenance(fit, u).y_star), std::log(p.sigma) + (std::log(v) + 0.5 * v) / p.alpha,
              1e-6);
}

TEST(Prediction, RoundedDaysNeverBelowOne) {
  for (auto id : kAllDatasets) {
    const auto s = load_embedded(id);
    for (auto f : kAllFamilies) {
      const auto plan = predict_maintenance(fit_mle(f, s), 0.25);
      EXPECT_GE(plan.rounded_days(), 1) << dataset_name(id) << ' ' << family_name(f);
      EXPECT_EQ(plan.rounded_days(), std::max(1L, std::lround(plan.y_star)));
    }
  }
  MaintenancePlan tiny;
  tiny.y_star = 0.2;
  EXPECT_EQ(tiny.rounded_days(), 1);
  tiny.y_star = 6.75;
  EXPECT_EQ(tiny.rounded_days(), 7);
}

TEST(Prediction, CarriesBootstrapInterval) {
  const auto s = load_embedded(DatasetId::PrickerA);
  const auto fit = fit_mle(Family::EW, s);
  BootstrapConfig c;
  c.replicates = 100;
  c.seed = 5;
  const auto boot = bootstrap_fit(Family::EW, s, c, fit);
  const auto plan = predict_maintenance(fit, 0.25, boot);
  EXPECT_EQ(plan.ci.lower, boot.y_star().interval.lower);
  EXPECT_EQ(plan.ci.upper, boot.y_star().interval.upper);
  EXPECT_EQ(plan.effective_replicates, boot.effective);
  EXPECT_EQ(plan.replicates, 100);
  EXPECT_EQ(plan.seed, 5u);
  const std::string text = plan.recommendation();
  EXPECT_NE(text.find("~" + std::to_string(plan.rounded_days()) + " days"), std::string::npos) << text;
  EXPECT_NE(text.find("95% CI"), std::string::npos) << text;
}

TEST(Prediction, RecommendationWithoutInterval) {
  const auto fit = fit_mle(Family::GG, load_embedded(DatasetId::TransmissionA));
  const auto text = predict_maintenance(fit, 0.25).recommendation();
  EXPECT_EQ(text.find("CI"), std::string::npos);
  EXPECT_NE(text.find("after the last failure"), std::string::npos);
}

TEST(Prediction, RejectsMismatchedInputs) {
  const auto s = load_embedded(DatasetId::PrickerA);
  const auto fit = fit_mle(Family::EW, s);
  EXPECT_THROW(predict_maintenance(fit, 0.0), ParameterError);
  EXPECT_THROW(predict_maintenance(fit, 1.0), ParameterError);
  EXPECT_THROW(predict_maintenance(fit, std::nan("")), ParameterError);
  BootstrapConfig c;
  c.replicates = 100;
  const auto boot = bootstrap_fit(Family::EW, s, c, fit);
  EXPECT_THROW(predict_maintenance(fit, 0.3, boot), ParameterError);
  EXPECT_THROW(predict_maintenance(fit_mle(Family::GG, s), 0.25, boot), ParameterError);
}
