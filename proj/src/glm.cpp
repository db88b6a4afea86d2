#include "cda/glm.hpp"

#include <cmath>
#include <sstream>

namespace cda {

namespace {

constexpr int kMaxIter = 100;
constexpr double kDevTol = 1e-10;
constexpr double kLpCap = 30.0;

double binomial_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& p,
                         const Eigen::VectorXd& w) {
  double d = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    double yi = y[i];
    if (yi > 0.0) d += w[i] * yi * std::log(yi / p[i]);
    if (yi < 1.0) d += w[i] * (1.0 - yi) * std::log((1.0 - yi) / (1.0 - p[i]));
  }
  return 2.0 * d;
}

Eigen::VectorXd clamp_lp(const Eigen::VectorXd& eta, bool* hit) {
  Eigen::VectorXd out = eta;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out[i] > kLpCap) {
      out[i] = kLpCap;
      *hit = true;
    } else if (out[i] < -kLpCap) {
      out[i] = -kLpCap;
      *hit = true;
    }
  }
  return out;
}

// Weighted least squares via QR on the sqrt(w)-scaled design. Handles rank
// deficiency deterministically.
Eigen::VectorXd wls(const Eigen::MatrixXd& X, const Eigen::VectorXd& z,
                    const Eigen::VectorXd& w) {
  Eigen::VectorXd sw = w.array().sqrt();
  Eigen::MatrixXd Xw = sw.asDiagonal() * X;
  Eigen::VectorXd zw = sw.cwiseProduct(z);
  return Xw.colPivHouseholderQr().solve(zw);
}

}  // namespace

FittedModel fit_glm(const Eigen::MatrixXd& Xin, const Eigen::VectorXd& yin, Family family,
                    const Eigen::VectorXd* weights) {
  const Eigen::Index n_all = Xin.rows();
  if (yin.size() != n_all) throw ValidationError("glm: y length != design rows");
  Eigen::VectorXd w_all =
      weights ? *weights : Eigen::VectorXd::Ones(n_all);
  if (w_all.size() != n_all) throw ValidationError("glm: weight length mismatch");
  for (Eigen::Index i = 0; i < n_all; ++i) {
    if (!(w_all[i] >= 0.0) || !std::isfinite(w_all[i]))
      throw ValidationError("glm: negative or non-finite weight at row " +
                            std::to_string(i));
  }

  // drop zero-weight rows
  std::vector<Eigen::Index> keep;
  keep.reserve(n_all);
  for (Eigen::Index i = 0; i < n_all; ++i)
    if (w_all[i] > 0.0) keep.push_back(i);
  if (keep.empty()) throw ValidationError("glm: all weights are zero");
  Eigen::MatrixXd X;
  Eigen::VectorXd y, w;
  if (keep.size() == static_cast<std::size_t>(n_all)) {
    X = Xin;
    y = yin;
    w = w_all;
  } else {
    X.resize(keep.size(), Xin.cols());
    y.resize(keep.size());
    w.resize(keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) {
      X.row(k) = Xin.row(keep[k]);
      y[k] = yin[keep[k]];
      w[k] = w_all[keep[k]];
    }
  }
  const Eigen::Index n = X.rows(), p = X.cols();
  if (n < p) throw ValidationError("glm: fewer (positive-weight) rows than columns");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!std::isfinite(y[i])) throw ValidationError("glm: non-finite response");

  FittedModel m;
  m.family = family;

  if (family == Family::gaussian) {
    m.coef = wls(X, y, w);
    Eigen::VectorXd r = y - X * m.coef;
    m.deviance = (w.array() * r.array().square()).sum();
    m.converged = true;
    m.iterations = 1;
    return m;
  }

  for (Eigen::Index i = 0; i < n; ++i)
    if (y[i] < 0.0 || y[i] > 1.0)
      throw ValidationError("glm: binomial response outside [0,1]");

  const double wsum = w.sum();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  bool sep = false;
  Eigen::VectorXd eta = clamp_lp(X * beta, &sep);
  Eigen::VectorXd mu = eta.unaryExpr([](double e) { return expit(e); });
  double dev = binomial_deviance(y, mu, w);

  int it = 0;
  for (; it < kMaxIter; ++it) {
    Eigen::VectorXd v = mu.array() * (1.0 - mu.array());
    v = v.cwiseMax(1e-10);
    Eigen::VectorXd z = eta + (y - mu).cwiseQuotient(v);
    Eigen::VectorXd irls_w = w.cwiseProduct(v);
    Eigen::VectorXd beta_new = wls(X, z, irls_w);

    // step-halving on deviance increase
    double step = 1.0;
    Eigen::VectorXd cand, eta_c, mu_c;
    double dev_c = 0.0;
    for (int h = 0; h < 30; ++h) {
      cand = beta + step * (beta_new - beta);
      bool hit = false;
      eta_c = clamp_lp(X * cand, &hit);
      mu_c = eta_c.unaryExpr([](double e) { return expit(e); });
      dev_c = binomial_deviance(y, mu_c, w);
      if (dev_c <= dev * (1.0 + 1e-12) || h == 29) {
        sep = sep || hit;
        break;
      }
      step *= 0.5;
    }
    double rel = std::abs(dev - dev_c) / (std::abs(dev_c) + 0.1);
    beta = cand;
    eta = eta_c;
    mu = mu_c;
    dev = dev_c;

    // Score criterion guarantees mean recovery, which deviance flatness
    // alone does not.
    double score = (X.transpose() * w.cwiseProduct(y - mu)).cwiseAbs().maxCoeff();
    if (rel < kDevTol && score <= 1e-10 * wsum) {
      m.converged = true;
      ++it;
      break;
    }
  }
  m.coef = beta;
  m.iterations = it;
  m.deviance = dev;
  // a fitted probability this extreme at an observed point means the MLE
  // is running off to the boundary even if the lp cap was never hit
  m.separation = sep || eta.cwiseAbs().maxCoeff() >= 15.0;
  if (sep && !m.converged) {
    // separated fits stall on the lp cap; treat a flat small score as done
    double score = (X.transpose() * w.cwiseProduct(y - mu)).cwiseAbs().maxCoeff();
    m.converged = score <= 1e-6 * wsum;
  }
  for (Eigen::Index j = 0; j < p; ++j)
    if (!std::isfinite(m.coef[j]))
      throw NumericError("glm: non-finite coefficient produced");
  return m;
}

FittedModel fit_glm(const Table& t, const std::string& response, const BasisSpec& spec,
                    Family family, const Eigen::VectorXd* weights) {
  ExpandedBasis eb = expand_basis(t, spec);
  FittedModel m = fit_glm(eb.X, t.column(response), family, weights);
  m.basis = spec;
  m.response = response;
  return m;
}

Eigen::VectorXd predict(const FittedModel& m, const Eigen::MatrixXd& X) {
  if (X.cols() != m.coef.size())
    throw ValidationError("predict: design has " + std::to_string(X.cols()) +
                          " columns, model has " + std::to_string(m.coef.size()));
  Eigen::VectorXd eta = X * m.coef;
  if (m.family == Family::gaussian) return eta;
  return eta.unaryExpr([](double e) { return expit(e); });
}

Eigen::VectorXd predict(const FittedModel& m, const Table& t) {
  return predict(m, expand_basis(t, m.basis).X);
}

std::string FittedModel::report() const {
  std::ostringstream os;
  os << (family == Family::gaussian ? "gaussian" : "binomial") << " response="
     << (response.empty() ? "<matrix>" : response) << " converged=" << converged
     << " iter=" << iterations << " deviance=" << deviance << " coef=[";
  for (Eigen::Index j = 0; j < coef.size(); ++j)
    os << (j ? "," : "") << coef[j];
  os << "]";
  if (separation) os << " separation=1";
  return os.str();
}

}  // namespace cda
