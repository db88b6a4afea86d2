#include "cda/estimators.hpp"

#include <cmath>

namespace cda {

namespace {

std::vector<std::string> cat(std::initializer_list<const std::vector<std::string>*> parts) {
  std::vector<std::string> out;
  for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
  return out;
}

std::vector<std::string> head(const std::vector<std::string>& v, std::size_t k) {
  return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k)};
}

// ordered conditional factorization of `block` given `given` (+ earlier
// block members)
std::vector<TargetSpec> factorization(const std::vector<std::string>& block,
                                      const std::vector<std::string>& given,
                                      bool saturated) {
  std::vector<TargetSpec> out;
  for (std::size_t j = 0; j < block.size(); ++j) {
    TargetSpec t;
    t.name = block[j];
    auto prev = head(block, j);
    auto cols = cat({&given, &prev});
    t.basis = saturated ? BasisSpec::saturated(cols) : BasisSpec::mains(cols);
    out.push_back(std::move(t));
  }
  return out;
}

EstimatorConfig make_config(const Dataset& ds, bool saturated) {
  const Roles& r = ds.roles();
  auto basis = [&](std::vector<std::string> cols) {
    return saturated ? BasisSpec::saturated(cols) : BasisSpec::mains(cols);
  };
  EstimatorConfig c;
  auto znazay = cat({&r.z, &r.n, &r.az, &r.ay});
  auto zazay = cat({&r.z, &r.az, &r.ay});
  auto nazay = cat({&r.n, &r.az, &r.ay});
  auto azay = cat({&r.az, &r.ay});
  c.mu1 = basis(znazay);
  c.eobd = BasisSpec::mains(znazay);  // must stay linear in Z
  c.eta1 = basis(r.ay);
  c.kappa1 = basis(azay);
  c.zeta1 = basis(zazay);
  c.nu1 = basis(nazay);
  c.lambda0z = factorization(r.z, azay, saturated);
  c.lambda1n = factorization(r.n, azay, saturated);
  c.pz_full1 = factorization(r.z, nazay, saturated);
  c.pn_full1 = factorization(r.n, zazay, saturated);
  c.rw_den_z = factorization(r.z, nazay, saturated);
  c.rw_den_n = factorization(r.n, zazay, saturated);
  c.t_ay = basis(r.ay);
  c.g_ay = basis(r.ay);
  c.w01_num = basis(azay);
  c.w01_den = basis(r.ay);
  c.g_azay = basis(azay);
  c.g_zazay = basis(zazay);
  c.g_nazay = basis(nazay);
  c.bd_znazay = basis(znazay);
  c.bd_zazay = basis(zazay);
  c.bd_nazay = basis(nazay);
  c.step_black_num = basis(zazay);
  c.step_black_den = basis(azay);
  c.step_open_num = basis(nazay);
  c.step_open_den = basis(r.ay);
  c.cens = basis(znazay);
  c.b0 = basis(zazay);
  c.h1 = basis(nazay);
  return c;
}

const char* strategy_name(ZnStrategy s) {
  switch (s) {
    case ZnStrategy::z_model: return "Z-Model";
    case ZnStrategy::n_model: return "N-Model";
    case ZnStrategy::z_bridge: return "Z-Bridge";
    case ZnStrategy::n_bridge: return "N-Bridge";
  }
  return "?";
}

FittedModel fit_pseudo(const Table& t, const Eigen::VectorXd& y, const BasisSpec& spec,
                       const Eigen::VectorXd& w) {
  FittedModel m = fit_glm(expand_basis(t, spec).X, y, Family::gaussian, &w);
  m.basis = spec;
  m.response = "<pseudo>";
  return m;
}

}  // namespace

EstimatorConfig EstimatorConfig::defaults(const Dataset& ds) {
  return make_config(ds, false);
}
EstimatorConfig EstimatorConfig::saturated(const Dataset& ds) {
  return make_config(ds, true);
}

Engine::Engine(const Dataset& ds, EstimatorConfig cfg) : ds_(ds), cfg_(std::move(cfg)) {
  t_ = ds_.standard_indicator(cfg_.std_pop);
  g_ = ds_.column(ds_.roles().group);
  if (cfg_.weight_opts.gate_col != cfg_.sample_opts.gate_col ||
      (!cfg_.weight_opts.gate_col.empty() &&
       cfg_.weight_opts.gate_threshold != cfg_.sample_opts.gate_threshold))
    throw ValidationError("gate configured inconsistently between weights and samples");
}

namespace {
Eigen::VectorXd eq_mask(const Eigen::VectorXd& v, double value) {
  Eigen::VectorXd m(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) m[i] = (v[i] == value) ? 1.0 : 0.0;
  return m;
}
}  // namespace

const DensityModel& Engine::lambda0z() {
  if (!lambda0z_) {
    if (cfg_.lambda0z.empty())
      throw ValidationError("lambda_0^Z density targets not configured");
    Eigen::VectorXd w = eq_mask(g_, 0.0);
    lambda0z_ = fit_density_model(ds_, cfg_.lambda0z, &w);
  }
  return *lambda0z_;
}

const DensityModel& Engine::lambda1n() {
  if (!lambda1n_) {
    if (cfg_.lambda1n.empty())
      throw ValidationError("lambda_1^N density targets not configured");
    Eigen::VectorXd w = eq_mask(g_, 1.0);
    lambda1n_ = fit_density_model(ds_, cfg_.lambda1n, &w);
  }
  return *lambda1n_;
}

const DensityModel& Engine::pz_full1() {
  if (!pz_full1_) {
    if (cfg_.pz_full1.empty())
      throw ValidationError("P_1(Z|N,A_z,A_y) density targets not configured");
    Eigen::VectorXd w = eq_mask(g_, 1.0);
    pz_full1_ = fit_density_model(ds_, cfg_.pz_full1, &w);
  }
  return *pz_full1_;
}

const DensityModel& Engine::pn_full1() {
  if (!pn_full1_) {
    if (cfg_.pn_full1.empty())
      throw ValidationError("P_1(N|Z,A_z,A_y) density targets not configured");
    Eigen::VectorXd w = eq_mask(g_, 1.0);
    pn_full1_ = fit_density_model(ds_, cfg_.pn_full1, &w);
  }
  return *pn_full1_;
}

const DensityModel& Engine::rw_den(RwForm form) {
  int key = static_cast<int>(form);
  auto it = rw_den_.find(key);
  if (it == rw_den_.end()) {
    const auto& targets = (form == RwForm::z_form) ? cfg_.rw_den_z : cfg_.rw_den_n;
    if (targets.empty())
      throw ValidationError("regress-then-weight denominator density not configured");
    Eigen::VectorXd w = eq_mask(g_, 0.0);
    it = rw_den_.emplace(key, fit_density_model(ds_, targets, &w)).first;
  }
  return it->second;
}

const ArtificialSample& Engine::sample(SampleKind kind) {
  int key = static_cast<int>(kind);
  auto it = samples_.find(key);
  if (it == samples_.end()) {
    const DensityModel* model = nullptr;
    const ConvenientDist* conv = nullptr;
    switch (kind) {
      case SampleKind::z_model:
      case SampleKind::z_check:
        model = &lambda0z();
        break;
      case SampleKind::n_model:
      case SampleKind::n_check:
        model = &lambda1n();
        break;
      case SampleKind::z_bridge:
      case SampleKind::n_bridge:
        conv = &cfg_.conv;
        break;
    }
    it = samples_.emplace(key, build_sample(ds_, kind, model, conv, cfg_.sample_opts)).first;
  }
  return it->second;
}

const WeightVector& Engine::w_ay(int g) {
  auto it = w_ay_.find(g);
  if (it == w_ay_.end())
    it = w_ay_.emplace(g, weight_ay(ds_, g, cfg_.std_pop, cfg_.t_ay, cfg_.g_ay,
                                    cfg_.weight_opts))
             .first;
  return it->second;
}

const WeightVector& Engine::w_az() {
  if (!w_az_) w_az_ = weight_az(ds_, cfg_.w01_num, cfg_.w01_den, cfg_.weight_opts);
  return *w_az_;
}

const WeightVector& Engine::w_cens(int g) {
  auto it = w_cens_.find(g);
  if (it == w_cens_.end())
    it = w_cens_.emplace(g, weight_censoring(ds_, g, cfg_.cens, cfg_.weight_opts)).first;
  return it->second;
}

const WeightVector& Engine::w_zn(ZnStrategy s) {
  int key = static_cast<int>(s);
  auto it = w_zn_.find(key);
  if (it == w_zn_.end()) {
    ZnNuisances nz;
    switch (s) {
      case ZnStrategy::z_model:
        nz.lambda0z = &lambda0z();
        nz.pz_full1 = &pz_full1();
        break;
      case ZnStrategy::n_model:
        nz.lambda1n = &lambda1n();
        nz.pn_full1 = &pn_full1();
        nz.g_zazay = &cfg_.g_zazay;
        nz.g_azay = &cfg_.g_azay;
        break;
      case ZnStrategy::z_bridge:
        nz.bridge = &sample(SampleKind::z_bridge);
        nz.bd_znazay = &cfg_.bd_znazay;
        nz.bd_zazay = &cfg_.bd_zazay;
        nz.g_azay = &cfg_.g_azay;
        break;
      case ZnStrategy::n_bridge:
        nz.bridge = &sample(SampleKind::n_bridge);
        nz.bd_znazay = &cfg_.bd_znazay;
        nz.bd_nazay = &cfg_.bd_nazay;
        break;
    }
    it = w_zn_.emplace(key, weight_zn(ds_, s, nz, cfg_.weight_opts)).first;
  }
  return it->second;
}

const WeightVector& Engine::w_bridge_step(BridgeStepKind k) {
  int key = static_cast<int>(k);
  auto it = w_bridge_.find(key);
  if (it == w_bridge_.end()) {
    if (k == BridgeStepKind::diamond_black) {
      it = w_bridge_
               .emplace(key, weight_bridge_step(ds_, sample(SampleKind::z_bridge), k,
                                                cfg_.step_black_num, cfg_.step_black_den,
                                                cfg_.weight_opts))
               .first;
    } else {
      it = w_bridge_
               .emplace(key, weight_bridge_step(ds_, sample(SampleKind::n_bridge), k,
                                                cfg_.step_open_num, cfg_.step_open_den,
                                                cfg_.weight_opts))
               .first;
    }
  }
  return it->second;
}

const WeightVector& Engine::w_rw(RwForm form) {
  int key = static_cast<int>(form);
  auto it = w_rw_.find(key);
  if (it == w_rw_.end()) {
    RwNuisances nz;
    nz.den_density = &rw_den(form);
    nz.g_ay = &cfg_.g_ay;
    if (form == RwForm::z_form) {
      nz.num_density = &lambda0z();
      nz.g_num = &cfg_.g_nazay;
    } else {
      nz.num_density = &lambda1n();
      nz.g_num = &cfg_.g_azay;
    }
    it = w_rw_.emplace(key, weight_rw(ds_, form, nz, cfg_.weight_opts)).first;
  }
  return it->second;
}

const FittedModel& Engine::mu1_plain() {
  if (!mu1_plain_) {
    const WeightVector& wc = w_cens(1);
    Eigen::VectorXd w = wc.analytic.cwiseProduct(wc.values);
    mu1_plain_ =
        fit_glm(ds_, ds_.roles().outcome, cfg_.mu1, cfg_.outcome_family, &w);
  }
  return *mu1_plain_;
}

const FittedModel& Engine::mu1_weighted(ZnStrategy s) {
  int key = static_cast<int>(s);
  auto it = mu1_weighted_.find(key);
  if (it == mu1_weighted_.end()) {
    const WeightVector& wc = w_cens(1);
    Eigen::VectorXd w = wc.analytic.cwiseProduct(wc.values)
                            .cwiseProduct(w_zn(s).values)
                            .cwiseProduct(w_ay(1).values);
    it = mu1_weighted_
             .emplace(key, fit_glm(ds_, ds_.roles().outcome, cfg_.mu1,
                                   cfg_.outcome_family, &w))
             .first;
  }
  return it->second;
}

Eigen::VectorXd Engine::at_origin(const Eigen::VectorXd& per_row,
                                  const ArtificialSample& s) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(s.origin.size()));
  for (std::size_t k = 0; k < s.origin.size(); ++k)
    out[static_cast<Eigen::Index>(k)] = per_row[s.origin[k]];
  return out;
}

Estimate estimate_theta_obs(Engine& e, int g, ThetaForm form) {
  const Dataset& ds = e.data();
  const WeightVector& wc = e.w_cens(g);
  const Eigen::VectorXd& y = ds.column(ds.roles().outcome);
  Estimate out;
  out.used_censoring_weights = e.censoring();
  std::string suffix;
  switch (form) {
    case ThetaForm::pw: {
      suffix = "PW";
      Eigen::VectorXd w = e.w_ay(g).values.cwiseProduct(wc.values);
      out.value = hajek_mean(y, w, wc.analytic);
      break;
    }
    case ThetaForm::se:
    case ThetaForm::wse: {
      suffix = (form == ThetaForm::se) ? "SE" : "WSE";
      Eigen::VectorXd w = wc.analytic.cwiseProduct(wc.values);
      if (form == ThetaForm::wse) w = w.cwiseProduct(e.w_ay(g).values);
      FittedModel m = fit_glm(ds, ds.roles().outcome, e.config().eta1,
                              e.config().outcome_family, &w);
      Eigen::VectorXd eta = predict(m, ds);
      out.value = hajek_mean(eta, Eigen::VectorXd::Ones(ds.rows()), e.standard());
      break;
    }
  }
  out.estimator = "theta_obs[" + std::to_string(g) + "]-" + suffix;
  return out;
}

Estimate estimate_eobd(Engine& e) {
  const Dataset& ds = e.data();
  const EstimatorConfig& cfg = e.config();
  // always a linear model, even for binary outcomes (linear probability fit)
  const BasisSpec& b = cfg.eobd;
  std::vector<std::size_t> zidx;
  for (const auto& zc : ds.roles().z) {
    for (const auto& ix : b.interactions)
      if (ix.a == zc || ix.b == zc)
        throw ValidationError("eobd basis must be linear in Z: interaction uses " + zc);
    std::size_t found = b.terms.size();
    for (std::size_t t = 0; t < b.terms.size(); ++t) {
      if (b.terms[t].column == zc) {
        if (b.terms[t].power != 1 || found != b.terms.size())
          throw ValidationError("eobd basis must contain " + zc +
                                " exactly once with power 1");
        found = t;
      }
    }
    if (found == b.terms.size())
      throw ValidationError("eobd basis is missing Z column " + zc);
    zidx.push_back((b.intercept ? 1u : 0u) + found);
  }

  const WeightVector& wc = e.w_cens(1);
  Eigen::VectorXd fitw = wc.analytic.cwiseProduct(wc.values);
  FittedModel m = fit_glm(ds, ds.roles().outcome, b, Family::gaussian, &fitw);

  const Eigen::VectorXd& y = ds.column(ds.roles().outcome);
  Eigen::VectorXd w1 = e.w_ay(1).values.cwiseProduct(wc.values);
  double value = hajek_mean(y, w1, wc.analytic);

  Eigen::VectorXd g1 = e.group();
  Eigen::VectorXd mask1(ds.rows()), mask0(ds.rows());
  for (Eigen::Index i = 0; i < ds.rows(); ++i) {
    mask1[i] = (g1[i] == 1.0) ? 1.0 : 0.0;
    mask0[i] = (g1[i] == 0.0) ? 1.0 : 0.0;
  }
  Eigen::VectorXd w0 = e.w_az().values.cwiseProduct(e.w_ay(0).values);
  for (std::size_t j = 0; j < zidx.size(); ++j) {
    const Eigen::VectorXd& zj = ds.column(ds.roles().z[j]);
    double shift = hajek_mean(zj, w0, mask0) - hajek_mean(zj, e.w_ay(1).values, mask1);
    value += m.coef[static_cast<Eigen::Index>(zidx[j])] * shift;
  }
  Estimate out;
  out.value = value;
  out.estimator = "E-OBD";
  out.used_censoring_weights = e.censoring();
  return out;
}

Estimate estimate_pw(Engine& e, ZnStrategy s) {
  const Dataset& ds = e.data();
  const WeightVector& wc = e.w_cens(1);
  Eigen::VectorXd w =
      e.w_zn(s).values.cwiseProduct(e.w_ay(1).values).cwiseProduct(wc.values);
  Estimate out;
  out.value = hajek_mean(ds.column(ds.roles().outcome), w, wc.analytic);
  out.estimator = std::string(strategy_name(s)) + "-PW";
  out.used_censoring_weights = e.censoring();
  return out;
}

namespace {

double se_wse_pipeline(Engine& e, ZnStrategy s, bool weighted) {
  const Dataset& ds = e.data();
  const EstimatorConfig& cfg = e.config();
  const FittedModel& mu = weighted ? e.mu1_weighted(s) : e.mu1_plain();
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(ds.rows());
  Eigen::VectorXd mask1(ds.rows()), mask0(ds.rows());
  for (Eigen::Index i = 0; i < ds.rows(); ++i) {
    mask1[i] = (e.group()[i] == 1.0) ? 1.0 : 0.0;
    mask0[i] = (e.group()[i] == 0.0) ? 1.0 : 0.0;
  }

  auto final_mean = [&](const Eigen::VectorXd& eta_hat) {
    return hajek_mean(eta_hat, ones, e.standard());
  };
  auto fit_eta_over_g1 = [&](const Eigen::VectorXd& pseudo) {
    Eigen::VectorXd w = mask1;
    if (weighted) w = w.cwiseProduct(e.w_ay(1).values);
    FittedModel m = fit_pseudo(ds, pseudo, cfg.eta1, w);
    return predict(m, ds);
  };

  switch (s) {
    case ZnStrategy::z_model: {
      const ArtificialSample& samp = e.sample(SampleKind::z_model);
      Eigen::VectorXd mu_hat = predict(mu, samp.data);
      Eigen::VectorXd w = samp.clone_weight;
      if (weighted) w = w.cwiseProduct(Engine::at_origin(e.w_ay(1).values, samp));
      FittedModel meta = fit_pseudo(samp.data, mu_hat, cfg.eta1, w);
      return final_mean(predict(meta, ds));
    }
    case ZnStrategy::n_model: {
      const ArtificialSample& samp = e.sample(SampleKind::n_model);
      Eigen::VectorXd mu_hat = predict(mu, samp.data);
      Eigen::VectorXd w = samp.clone_weight;
      if (weighted)
        w = w.cwiseProduct(Engine::at_origin(
            e.w_az().values.cwiseProduct(e.w_ay(0).values), samp));
      FittedModel mkap = fit_pseudo(samp.data, mu_hat, cfg.kappa1, w);
      return final_mean(fit_eta_over_g1(predict(mkap, ds)));
    }
    case ZnStrategy::z_bridge: {
      const ArtificialSample& samp = e.sample(SampleKind::z_bridge);
      Eigen::VectorXd mu_hat = predict(mu, samp.data);
      Eigen::VectorXd w = samp.clone_weight;
      if (weighted)
        w = w.cwiseProduct(e.w_bridge_step(BridgeStepKind::diamond_black).values)
                .cwiseProduct(Engine::at_origin(e.w_ay(1).values, samp));
      FittedModel mzeta = fit_pseudo(samp.data, mu_hat, cfg.zeta1, w);
      Eigen::VectorXd zeta_hat = predict(mzeta, ds);
      Eigen::VectorXd wk = mask0;
      if (weighted)
        wk = wk.cwiseProduct(e.w_az().values).cwiseProduct(e.w_ay(0).values);
      FittedModel mkap = fit_pseudo(ds, zeta_hat, cfg.kappa1, wk);
      return final_mean(fit_eta_over_g1(predict(mkap, ds)));
    }
    case ZnStrategy::n_bridge: {
      const ArtificialSample& samp = e.sample(SampleKind::n_bridge);
      Eigen::VectorXd mu_hat = predict(mu, samp.data);
      Eigen::VectorXd w = samp.clone_weight;
      if (weighted)
        w = w.cwiseProduct(e.w_bridge_step(BridgeStepKind::diamond_open).values)
                .cwiseProduct(Engine::at_origin(e.w_ay(0).values, samp));
      FittedModel mnu = fit_pseudo(samp.data, mu_hat, cfg.nu1, w);
      return final_mean(fit_eta_over_g1(predict(mnu, ds)));
    }
  }
  throw ValidationError("unknown strategy");
}

}  // namespace

Estimate estimate_se(Engine& e, ZnStrategy s) {
  Estimate out;
  out.value = se_wse_pipeline(e, s, false);
  out.estimator = std::string(strategy_name(s)) + "-SE";
  out.used_censoring_weights = e.censoring();
  return out;
}

Estimate estimate_wse(Engine& e, ZnStrategy s) {
  Estimate out;
  out.value = se_wse_pipeline(e, s, true);
  out.estimator = std::string(strategy_name(s)) + "-WSE";
  out.used_censoring_weights = e.censoring();
  return out;
}

Estimate estimate_rw(Engine& e, ZnStrategy s) {
  const Dataset& ds = e.data();
  Estimate out;
  out.used_censoring_weights = e.censoring();
  out.estimator = std::string(strategy_name(s)) + "-RW";
  if (s == ZnStrategy::z_model || s == ZnStrategy::n_model) {
    RwForm form = (s == ZnStrategy::z_model) ? RwForm::z_form : RwForm::n_form;
    Eigen::VectorXd mu_hat = predict(e.mu1_plain(), ds);
    const WeightVector& wr = e.w_rw(form);
    Eigen::VectorXd w = wr.values.cwiseProduct(e.w_ay(0).values);
    out.value = hajek_mean(mu_hat, w, wr.analytic);
    return out;
  }
  SampleKind kind = (s == ZnStrategy::z_bridge) ? SampleKind::z_bridge : SampleKind::n_bridge;
  BridgeStepKind bk = (s == ZnStrategy::z_bridge) ? BridgeStepKind::diamond_black
                                                  : BridgeStepKind::diamond_open;
  const ArtificialSample& samp = e.sample(kind);
  Eigen::VectorXd mu_hat = predict(e.mu1_plain(), samp.data);
  const Eigen::VectorXd& wt =
      (s == ZnStrategy::z_bridge) ? e.w_ay(1).values : e.w_ay(0).values;
  Eigen::VectorXd w = samp.clone_weight.cwiseProduct(e.w_bridge_step(bk).values)
                          .cwiseProduct(Engine::at_origin(wt, samp));
  out.value = hajek_mean(mu_hat, w, Eigen::VectorXd::Ones(mu_hat.size()));
  return out;
}

DecompositionResult decompose(Engine& e, const Estimate& theta1_star,
                              ThetaForm obs_form) {
  DecompositionResult d;
  d.theta1 = estimate_theta_obs(e, 1, obs_form).value;
  d.theta0 = estimate_theta_obs(e, 0, obs_form).value;
  d.theta1_star = theta1_star.value;
  d.observed = d.theta1 - d.theta0;
  d.reduced = d.theta1 - d.theta1_star;
  d.residual = d.theta1_star - d.theta0;
  return d;
}

InfluenceResult evaluate_influence(Engine& e, ZnStrategy s) {
  const Dataset& ds = e.data();
  const EstimatorConfig& cfg = e.config();
  const Eigen::Index n = ds.rows();
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd mask1(n), mask0(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    mask1[i] = (e.group()[i] == 1.0) ? 1.0 : 0.0;
    mask0[i] = (e.group()[i] == 0.0) ? 1.0 : 0.0;
  }
  double p1 = mask1.mean();
  double p0 = mask0.mean();
  double pt = e.standard().mean();
  if (p1 <= 0.0 || p0 <= 0.0 || pt <= 0.0)
    throw ValidationError("influence evaluation needs both groups and a nonempty standard population");

  const FittedModel& mu = e.mu1_weighted(s);
  const WeightVector& wc = e.w_cens(1);
  Eigen::VectorXd mu_hat = predict(mu, ds);

  // zeta / nu from clone regressions of the same fitted outcome model
  const ArtificialSample& bd = e.sample(SampleKind::z_bridge);
  const ArtificialSample& dm = e.sample(SampleKind::n_bridge);
  Eigen::VectorXd w_bd = bd.clone_weight.cwiseProduct(
      e.w_bridge_step(BridgeStepKind::diamond_black).values)
                             .cwiseProduct(Engine::at_origin(e.w_ay(1).values, bd));
  Eigen::VectorXd w_dm = dm.clone_weight.cwiseProduct(
      e.w_bridge_step(BridgeStepKind::diamond_open).values)
                             .cwiseProduct(Engine::at_origin(e.w_ay(0).values, dm));
  FittedModel mzeta = fit_pseudo(bd.data, predict(mu, bd.data), cfg.zeta1, w_bd);
  FittedModel mnu = fit_pseudo(dm.data, predict(mu, dm.data), cfg.nu1, w_dm);
  Eigen::VectorXd zeta_hat = predict(mzeta, ds);
  Eigen::VectorXd nu_hat = predict(mnu, ds);

  Eigen::VectorXd w_kap =
      mask0.cwiseProduct(e.w_az().values).cwiseProduct(e.w_ay(0).values);
  FittedModel mkap = fit_pseudo(ds, zeta_hat, cfg.kappa1, w_kap);
  Eigen::VectorXd kap_hat = predict(mkap, ds);

  Eigen::VectorXd w_eta = mask1.cwiseProduct(e.w_ay(1).values);
  FittedModel meta = fit_pseudo(ds, nu_hat, cfg.eta1, w_eta);
  Eigen::VectorXd eta_hat = predict(meta, ds);

  double theta = hajek_mean(eta_hat, ones, e.standard());

  const Eigen::VectorXd& y = ds.column(ds.roles().outcome);
  InfluenceResult out;
  out.theta = theta;
  out.part1.resize(n);
  out.part2.resize(n);
  out.part3.resize(n);
  out.part4.resize(n);
  const Eigen::VectorXd& wzn = e.w_zn(s).values;
  const Eigen::VectorXd& w1t = e.w_ay(1).values;
  const Eigen::VectorXd& w0t = e.w_ay(0).values;
  const Eigen::VectorXd& w01 = e.w_az().values;
  for (Eigen::Index i = 0; i < n; ++i) {
    double resid = 0.0;
    if (wc.analytic[i] == 1.0) resid = wc.values[i] * (y[i] - mu_hat[i]);
    out.part1[i] = mask1[i] / p1 * w1t[i] * wzn[i] * resid;
    out.part2[i] = mask0[i] / p0 * w0t[i] * w01[i] * (zeta_hat[i] - kap_hat[i]);
    out.part3[i] = mask1[i] / p1 * w1t[i] * (nu_hat[i] - eta_hat[i]);
    out.part4[i] = e.standard()[i] / pt * (eta_hat[i] - theta);
  }
  out.phi = out.part1 + out.part2 + out.part3 + out.part4;
  out.mean = out.phi.mean();
  double var = (out.phi.array() - out.mean).square().sum() / static_cast<double>(n - 1);
  out.se = std::sqrt(var / static_cast<double>(n));
  return out;
}

}  // namespace cda
