#include "doctest.h"

#include <random>

#include "cda/glm.hpp"

using namespace cda;

TEST_CASE("gaussian intercept-only fit recovers the mean") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(5, 1);
  Eigen::VectorXd y(5);
  y << 1.0, 2.0, 3.0, 4.0, 10.0;
  FittedModel m = fit_glm(X, y, Family::gaussian);
  CHECK(m.converged);
  CHECK(m.coef[0] == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("binomial intercept-only fit recovers the log-odds") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(5, 1);
  Eigen::VectorXd y(5);
  y << 1.0, 1.0, 0.0, 0.0, 0.0;
  FittedModel m = fit_glm(X, y, Family::binomial);
  // logit(0.4), precomputed
  CHECK(m.coef[0] == doctest::Approx(-0.405465108108164).epsilon(1e-9));
}

TEST_CASE("two-cell logistic slope equals the log odds ratio") {
  // x=0: 10/100 events (odds 1/9); x=1: 50/100 (odds 1) -> slope log 9
  int n = 200;
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    double x = i < 100 ? 0.0 : 1.0;
    X(i, 0) = 1.0;
    X(i, 1) = x;
    if (x == 0.0)
      y[i] = (i % 100) < 10 ? 1.0 : 0.0;
    else
      y[i] = (i % 100) < 50 ? 1.0 : 0.0;
  }
  FittedModel m = fit_glm(X, y, Family::binomial);
  CHECK(m.coef[1] == doctest::Approx(std::log(9.0)).epsilon(1e-8));
}

TEST_CASE("weighted fits recover the weighted mean") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> uw(0.1, 3.0);
  for (int rep = 0; rep < 20; ++rep) {
    int n = 80;
    Eigen::MatrixXd X(n, 3);
    Eigen::VectorXd y(n), w(n);
    for (int i = 0; i < n; ++i) {
      X(i, 0) = 1.0;
      X(i, 1) = nd(rng);
      X(i, 2) = nd(rng) > 0 ? 1.0 : 0.0;
      w[i] = uw(rng);
    }
    Family fam = rep % 2 == 0 ? Family::gaussian : Family::binomial;
    for (int i = 0; i < n; ++i) {
      double lp = 0.3 * X(i, 1) - 0.5 * X(i, 2);
      y[i] = fam == Family::gaussian ? lp + nd(rng)
                                     : (nd(rng) < lp ? 1.0 : 0.0);
    }
    FittedModel m = fit_glm(X, y, fam, &w);
    Eigen::VectorXd fit = predict(m, X);
    double resid = 0.0, tot = 0.0;
    for (int i = 0; i < n; ++i) {
      resid += w[i] * (y[i] - fit[i]);
      tot += w[i];
    }
    CHECK(std::fabs(resid) <= 1e-8 * tot);
  }
}

TEST_CASE("separated data is flagged, not fatal") {
  Eigen::MatrixXd X(6, 2);
  Eigen::VectorXd y(6);
  for (int i = 0; i < 6; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = i < 3 ? 0.0 : 1.0;
    y[i] = i < 3 ? 0.0 : 1.0;
  }
  FittedModel m = fit_glm(X, y, Family::binomial);
  CHECK(m.separation);
  Eigen::VectorXd p = predict(m, X);
  for (int i = 0; i < 6; ++i) {
    CHECK(p[i] >= 0.0);
    CHECK(p[i] <= 1.0);
  }
}

TEST_CASE("zero-weight rows do not influence the fit") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(4, 1);
  Eigen::VectorXd y(4), w(4);
  y << 1.0, 3.0, 100.0, -50.0;
  w << 1.0, 1.0, 0.0, 0.0;
  FittedModel m = fit_glm(X, y, Family::gaussian, &w);
  CHECK(m.coef[0] == doctest::Approx(2.0).epsilon(1e-12));
}
