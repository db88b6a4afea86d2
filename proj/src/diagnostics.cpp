#include "cda/diagnostics.hpp"

#include <cmath>

#include "json.hpp"

namespace cda {

namespace {

std::vector<std::string> cat(std::initializer_list<const std::vector<std::string>*> parts) {
  std::vector<std::string> out;
  for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
  return out;
}

}  // namespace

DensityCheck density_diagnostic(Engine& e, SampleKind check) {
  if (check != SampleKind::z_check && check != SampleKind::n_check)
    throw ValidationError("density_diagnostic expects a check sample kind");
  const Dataset& ds = e.data();
  const bool zcheck = check == SampleKind::z_check;
  const int g = zcheck ? 0 : 1;
  const ArtificialSample& samp = e.sample(check);
  const WeightVector& wc = e.w_cens(g);
  Eigen::VectorXd fw = wc.analytic.cwiseProduct(wc.values);
  const BasisSpec& spec = zcheck ? e.config().b0 : e.config().h1;
  FittedModel working = fit_glm(ds, ds.roles().outcome, spec,
                                e.config().outcome_family, &fw);
  Eigen::VectorXd pred = predict(working, samp.data);

  DensityCheck out;
  out.which = zcheck ? "lambda_0^Z" : "lambda_1^N";
  out.emulated_mean =
      hajek_mean(pred, samp.clone_weight, Eigen::VectorXd::Ones(pred.size()));
  out.observed_mean = hajek_mean(ds.column(ds.roles().outcome), wc.values, wc.analytic);
  out.gap = out.emulated_mean - out.observed_mean;
  return out;
}

WeightMoment weight_moment(const WeightVector& w) {
  WeightMoment out;
  out.kind = w.kind;
  out.subsample = w.analytic_tag;
  double sum = 0.0, sumsq = 0.0;
  Eigen::Index n = 0;
  for (Eigen::Index i = 0; i < w.values.size(); ++i) {
    if (w.diagnostic[i] == 1.0) {
      sum += w.values[i];
      sumsq += w.values[i] * w.values[i];
      ++n;
    }
  }
  if (n == 0) throw ValidationError("weight_moment: empty diagnostic subsample");
  out.n = n;
  out.mean = sum / static_cast<double>(n);
  double var = (n > 1) ? (sumsq - sum * out.mean) / static_cast<double>(n - 1) : 0.0;
  out.se = std::sqrt(std::max(0.0, var) / static_cast<double>(n));
  return out;
}

std::vector<BalanceRow> target_balance(const std::string& label, const Table& analytic,
                                       const Eigen::VectorXd& wa, const Table& target,
                                       const Eigen::VectorXd& wt,
                                       const std::vector<std::string>& cols) {
  std::vector<BalanceRow> out;
  Eigen::VectorXd ones_a = Eigen::VectorXd::Ones(analytic.rows());
  Eigen::VectorXd ones_t = Eigen::VectorXd::Ones(target.rows());
  for (const auto& c : cols) {
    BalanceRow r;
    r.weight = label;
    r.column = c;
    const Eigen::VectorXd& xa = analytic.column(c);
    const Eigen::VectorXd& xt = target.column(c);
    r.analytic_mean = hajek_mean(xa, wa, ones_a);
    r.target_mean = hajek_mean(xt, wt, ones_t);
    Eigen::VectorXd dev = (xt.array() - r.target_mean).square();
    double sd = std::sqrt(hajek_mean(dev, wt, ones_t));
    double diff = r.analytic_mean - r.target_mean;
    r.std_diff = (sd > 1e-12) ? diff / sd : diff;
    out.push_back(r);
  }
  return out;
}

DiagnosticsReport run_diagnostics(Engine& e, const DiagnosticsOptions& opts) {
  DiagnosticsReport rep;
  const Dataset& ds = e.data();
  const Roles& roles = ds.roles();
  const bool has_n = !roles.n.empty();
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(ds.rows());
  Eigen::VectorXd mask1(ds.rows()), mask0(ds.rows());
  for (Eigen::Index i = 0; i < ds.rows(); ++i) {
    mask1[i] = (e.group()[i] == 1.0) ? 1.0 : 0.0;
    mask0[i] = 1.0 - mask1[i];
  }
  auto all_cols = cat({&roles.z, &roles.n, &roles.az, &roles.ay});
  auto azay = cat({&roles.az, &roles.ay});

  if (opts.density) {
    rep.density_checks.push_back(density_diagnostic(e, SampleKind::z_check));
    if (has_n) rep.density_checks.push_back(density_diagnostic(e, SampleKind::n_check));
  }

  std::vector<ZnStrategy> strategies{ZnStrategy::z_model, ZnStrategy::z_bridge};
  if (has_n) {
    strategies.push_back(ZnStrategy::n_model);
    strategies.push_back(ZnStrategy::n_bridge);
  }

  if (opts.moments) {
    for (auto s : strategies) rep.weight_moments.push_back(weight_moment(e.w_zn(s)));
    rep.weight_moments.push_back(weight_moment(e.w_ay(0)));
    rep.weight_moments.push_back(weight_moment(e.w_ay(1)));
    rep.weight_moments.push_back(weight_moment(e.w_az()));
    rep.weight_moments.push_back(
        weight_moment(e.w_bridge_step(BridgeStepKind::diamond_black)));
    if (has_n) {
      rep.weight_moments.push_back(
          weight_moment(e.w_bridge_step(BridgeStepKind::diamond_open)));
      rep.weight_moments.push_back(weight_moment(e.w_rw(RwForm::z_form)));
      rep.weight_moments.push_back(weight_moment(e.w_rw(RwForm::n_form)));
    }
    if (e.censoring()) {
      rep.weight_moments.push_back(weight_moment(e.w_cens(0)));
      rep.weight_moments.push_back(weight_moment(e.w_cens(1)));
    }
  }

  if (opts.balance) {
    const ArtificialSample& tri = e.sample(SampleKind::z_model);
    Eigen::VectorXd w_tri = tri.clone_weight;
    Eigen::VectorXd w_tri_t1 =
        tri.clone_weight.cwiseProduct(Engine::at_origin(e.w_ay(1).values, tri));
    auto append = [&rep](std::vector<BalanceRow> rows) {
      rep.balance.insert(rep.balance.end(), rows.begin(), rows.end());
    };
    for (auto s : strategies) {
      const WeightVector& w = e.w_zn(s);
      append(target_balance(w.kind, ds, mask1.cwiseProduct(w.values), tri.data, w_tri,
                            all_cols));
    }
    append(target_balance(e.w_ay(0).kind, ds,
                          mask0.cwiseProduct(e.w_ay(0).values), ds, e.standard(),
                          roles.ay));
    append(target_balance(e.w_ay(1).kind, ds,
                          mask1.cwiseProduct(e.w_ay(1).values), ds, e.standard(),
                          roles.ay));
    append(target_balance(e.w_az().kind + "*w_0T", ds,
                          mask0.cwiseProduct(e.w_az().values)
                              .cwiseProduct(e.w_ay(0).values),
                          ds, e.standard(), azay));
    {
      const ArtificialSample& bd = e.sample(SampleKind::z_bridge);
      const WeightVector& wb = e.w_bridge_step(BridgeStepKind::diamond_black);
      Eigen::VectorXd wa = bd.clone_weight.cwiseProduct(wb.values).cwiseProduct(
          Engine::at_origin(e.w_ay(1).values, bd));
      append(target_balance(wb.kind + "*w_1T", bd.data, wa, tri.data, w_tri_t1,
                            all_cols));
    }
    if (has_n) {
      const ArtificialSample& dm = e.sample(SampleKind::n_bridge);
      const WeightVector& wd = e.w_bridge_step(BridgeStepKind::diamond_open);
      Eigen::VectorXd wa = dm.clone_weight.cwiseProduct(wd.values).cwiseProduct(
          Engine::at_origin(e.w_ay(0).values, dm));
      append(target_balance(wd.kind + "*w_0T", dm.data, wa, tri.data, w_tri_t1,
                            all_cols));
      for (auto form : {RwForm::z_form, RwForm::n_form}) {
        const WeightVector& wr = e.w_rw(form);
        append(target_balance(
            wr.kind + "*w_0T", ds,
            mask0.cwiseProduct(wr.values).cwiseProduct(e.w_ay(0).values), tri.data,
            w_tri_t1, all_cols));
      }
    }
  }

  if (opts.convenient) {
    rep.convenient_checks.emplace_back(
        "z_bridge", convenient_distribution_check(ds, e.sample(SampleKind::z_bridge)));
    if (has_n)
      rep.convenient_checks.emplace_back(
          "n_bridge", convenient_distribution_check(ds, e.sample(SampleKind::n_bridge)));
  }
  return rep;
}

std::string DiagnosticsReport::to_json() const {
  nlohmann::json j;
  j["density_checks"] = nlohmann::json::array();
  for (const auto& d : density_checks)
    j["density_checks"].push_back({{"which", d.which},
                                   {"emulated_mean", d.emulated_mean},
                                   {"observed_mean", d.observed_mean},
                                   {"gap", d.gap}});
  j["weight_moments"] = nlohmann::json::array();
  for (const auto& m : weight_moments)
    j["weight_moments"].push_back({{"kind", m.kind},
                                   {"subsample", m.subsample},
                                   {"mean", m.mean},
                                   {"se", m.se},
                                   {"n", m.n}});
  j["balance"] = nlohmann::json::array();
  for (const auto& b : balance)
    j["balance"].push_back({{"weight", b.weight},
                            {"column", b.column},
                            {"analytic_mean", b.analytic_mean},
                            {"target_mean", b.target_mean},
                            {"std_diff", b.std_diff}});
  j["convenient_checks"] = nlohmann::json::array();
  for (const auto& [name, c] : convenient_checks)
    j["convenient_checks"].push_back({{"sample", name},
                                      {"coverage_pass", c.coverage_pass},
                                      {"independence_pass", c.independence_pass},
                                      {"max_dependence", c.max_dependence},
                                      {"detail", c.detail}});
  return j.dump(2);
}

}  // namespace cda
