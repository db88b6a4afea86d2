#include "cda/weights.hpp"

#include <algorithm>
#include <cmath>

#include "cda/samples.hpp"

namespace cda {

namespace {

void check_floor(const Eigen::VectorXd& p, double floor, const std::string& what) {
  std::string rows;
  int count = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] < floor) {
      if (count < 5) rows += (count ? "," : "") + std::to_string(i);
      ++count;
    }
  }
  if (count > 0)
    throw NumericError(what + " below probability floor " + std::to_string(floor) +
                       " on " + std::to_string(count) + " rows (first: " + rows + ")");
}

Eigen::VectorXd gate_open_mask(const Table& t, const WeightOptions& opts) {
  Eigen::VectorXd m = Eigen::VectorXd::Ones(t.rows());
  if (opts.gate_col.empty()) return m;
  const Eigen::VectorXd& g = t.column(opts.gate_col);
  for (Eigen::Index i = 0; i < t.rows(); ++i)
    if (g[i] < opts.gate_threshold) m[i] = 0.0;
  return m;
}

void apply_gate_identity(Eigen::VectorXd& w, const Table& t, const WeightOptions& opts) {
  if (opts.gate_col.empty()) return;
  const Eigen::VectorXd& g = t.column(opts.gate_col);
  for (Eigen::Index i = 0; i < t.rows(); ++i)
    if (g[i] < opts.gate_threshold) w[i] = 1.0;
}

void truncate(Eigen::VectorXd& w, const Eigen::VectorXd& mask, double pct) {
  if (pct >= 1.0) return;
  std::vector<double> vals;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (mask[i] == 1.0) vals.push_back(w[i]);
  if (vals.empty()) return;
  std::sort(vals.begin(), vals.end());
  double cap = vals[static_cast<std::size_t>(pct * (vals.size() - 1))];
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (mask[i] == 1.0) w[i] = std::min(w[i], cap);
}

Eigen::VectorXd group_mask(const Dataset& ds, int g) {
  const Eigen::VectorXd& gv = ds.column(ds.roles().group);
  Eigen::VectorXd m(ds.rows());
  for (Eigen::Index i = 0; i < ds.rows(); ++i) m[i] = (gv[i] == g) ? 1.0 : 0.0;
  return m;
}

}  // namespace

double hajek_mean(const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                  const Eigen::VectorXd& mask) {
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (mask[i] == 1.0) {
      num += w[i] * x[i];
      den += w[i];
    }
  }
  if (den <= 0.0) throw NumericError("hajek_mean: zero total weight");
  return num / den;
}

WeightVector WeightVector::scaled_by(const Eigen::VectorXd& other) const {
  WeightVector out = *this;
  if (other.size() != values.size())
    throw ValidationError("weight product: length mismatch");
  out.values = values.cwiseProduct(other);
  out.kind = kind + "*<other>";
  return out;
}

Eigen::VectorXd stacked_odds(const Table& a, const Eigen::VectorXd& wa, const Table& b,
                             const Eigen::VectorXd& wb, const BasisSpec& basis,
                             const Table& eval, double floor) {
  Eigen::MatrixXd Xa = expand_basis(a, basis).X;
  Eigen::MatrixXd Xb = expand_basis(b, basis).X;
  const Eigen::Index na = Xa.rows(), nb = Xb.rows();
  Eigen::MatrixXd X(na + nb, Xa.cols());
  X.topRows(na) = Xa;
  X.bottomRows(nb) = Xb;
  Eigen::VectorXd y(na + nb), w(na + nb);
  y.head(na).setOnes();
  y.tail(nb).setZero();
  w.head(na) = wa;
  w.tail(nb) = wb;
  FittedModel m = fit_glm(X, y, Family::binomial, &w);
  Eigen::VectorXd p = predict(m, expand_basis(eval, basis).X);
  check_floor(p, floor, "stacked membership probability");
  Eigen::VectorXd q = Eigen::VectorXd::Ones(p.size()) - p;
  check_floor(q, floor, "stacked membership probability (complement)");
  return p.cwiseQuotient(q);
}

WeightVector weight_ay(const Dataset& ds, int g, const StandardPopulation& std_pop,
                       const BasisSpec& t_basis, const BasisSpec& g_basis,
                       const WeightOptions& opts) {
  WeightVector out;
  out.kind = "w_" + std::to_string(g) + "T^Ay";
  out.analytic_tag = "G=" + std::to_string(g);
  out.target_tag = "T=1";
  out.analytic = group_mask(ds, g);
  out.diagnostic = out.analytic;

  const bool reduces_to_one =
      ds.roles().ay.empty() ||
      (std_pop.kind == StandardPopulation::Kind::group_is_standard && std_pop.group == g);
  if (reduces_to_one) {
    out.values = Eigen::VectorXd::Ones(ds.rows());
    return out;
  }

  Eigen::VectorXd t = ds.standard_indicator(std_pop);
  // response is the induced T indicator, not a stored column
  FittedModel mt = fit_glm(expand_basis(ds, t_basis).X, t, Family::binomial, nullptr);
  mt.basis = t_basis;
  Eigen::VectorXd pt = predict(mt, ds);
  FittedModel mg = fit_glm(ds, ds.roles().group, g_basis, Family::binomial, nullptr);
  Eigen::VectorXd pg1 = predict(mg, ds);
  Eigen::VectorXd pg = (g == 1) ? pg1 : (Eigen::VectorXd::Ones(ds.rows()) - pg1).eval();
  check_floor(pg, opts.probability_floor, "P(G=" + std::to_string(g) + "|A_y)");

  const Eigen::VectorXd& gv = ds.column(ds.roles().group);
  double p_g = 0.0;
  for (Eigen::Index i = 0; i < ds.rows(); ++i) p_g += (gv[i] == g) ? 1.0 : 0.0;
  p_g /= static_cast<double>(ds.rows());
  double p_t = t.mean();
  if (p_t <= 0.0) throw ValidationError("standard population is empty");

  out.values = pt.cwiseQuotient(pg) * (p_g / p_t);
  truncate(out.values, out.analytic, opts.truncate_percentile);
  return out;
}

WeightVector weight_az(const Dataset& ds, const BasisSpec& num_basis,
                       const BasisSpec& den_basis, const WeightOptions& opts) {
  WeightVector out;
  out.kind = "w_01^Az";
  out.analytic_tag = "G=0";
  out.target_tag = "G=1";
  out.analytic = group_mask(ds, 0);
  out.diagnostic = out.analytic;
  if (ds.roles().az.empty()) {
    out.values = Eigen::VectorXd::Ones(ds.rows());
    return out;
  }
  const std::string& gcol = ds.roles().group;
  FittedModel mn = fit_glm(ds, gcol, num_basis, Family::binomial, nullptr);
  FittedModel md = fit_glm(ds, gcol, den_basis, Family::binomial, nullptr);
  Eigen::VectorXd pn = predict(mn, ds), pd = predict(md, ds);
  check_floor(pn, opts.probability_floor, "P(G=1|A_z,A_y)");
  check_floor(pd, opts.probability_floor, "P(G=1|A_y)");
  Eigen::VectorXd qn = Eigen::VectorXd::Ones(ds.rows()) - pn;
  Eigen::VectorXd qd = Eigen::VectorXd::Ones(ds.rows()) - pd;
  check_floor(qn, opts.probability_floor, "P(G=0|A_z,A_y)");
  check_floor(qd, opts.probability_floor, "P(G=0|A_y)");
  out.values = pn.cwiseQuotient(qn).cwiseQuotient(pd.cwiseQuotient(qd));
  truncate(out.values, out.analytic, opts.truncate_percentile);
  return out;
}

WeightVector weight_censoring(const Dataset& ds, int g, const BasisSpec& basis,
                              const WeightOptions& opts) {
  WeightVector out;
  out.kind = "w_" + std::to_string(g) + "^C";
  out.analytic_tag = "G=" + std::to_string(g) + ",C=0";
  out.target_tag = "G=" + std::to_string(g);
  const std::string& ccol = ds.roles().censor;
  Eigen::VectorXd gm = group_mask(ds, g);
  if (ccol.empty()) {
    out.values = Eigen::VectorXd::Ones(ds.rows());
    out.analytic = gm;
    out.diagnostic = gm;
    return out;
  }
  const Eigen::VectorXd& c = ds.column(ccol);
  out.analytic = Eigen::VectorXd::Zero(ds.rows());
  for (Eigen::Index i = 0; i < ds.rows(); ++i)
    out.analytic[i] = (gm[i] == 1.0 && c[i] == 0.0) ? 1.0 : 0.0;
  out.diagnostic = out.analytic;

  Eigen::VectorXd retained = Eigen::VectorXd::Ones(ds.rows()) - c;
  Eigen::MatrixXd X = expand_basis(ds, basis).X;
  FittedModel m = fit_glm(X, retained, Family::binomial, &gm);
  m.basis = basis;
  Eigen::VectorXd pr = predict(m, ds);
  check_floor(pr, opts.probability_floor,
              "P(C=0|Z,N,A_z,A_y) in group " + std::to_string(g));
  double num = hajek_mean(retained, Eigen::VectorXd::Ones(ds.rows()), gm);
  out.values = Eigen::VectorXd::Constant(ds.rows(), num).cwiseQuotient(pr);
  truncate(out.values, out.analytic, opts.truncate_percentile);
  return out;
}

WeightVector weight_zn(const Dataset& ds, ZnStrategy strategy, const ZnNuisances& nz,
                       const WeightOptions& opts) {
  WeightVector out;
  out.analytic_tag = "G=1";
  out.target_tag = "sample ▲";
  out.analytic = group_mask(ds, 1);
  out.diagnostic = out.analytic;
  const Eigen::Index n = ds.rows();
  Eigen::VectorXd open = gate_open_mask(ds, opts);
  Eigen::VectorXd w(n);

  auto require = [](const void* p, const char* what) {
    if (!p) throw ValidationError(std::string("weight_zn: missing nuisance: ") + what);
  };

  switch (strategy) {
    case ZnStrategy::z_model: {
      out.kind = "w_11*^(Z,N):Z";
      require(nz.lambda0z, "lambda_0^Z density model");
      require(nz.pz_full1, "P_1(Z|N,A_z,A_y) density model");
      Eigen::VectorXd num = nz.lambda0z->density_at(ds);
      Eigen::VectorXd den = nz.pz_full1->density_at(ds);
      check_floor(den, opts.probability_floor, "P_1(Z|N,A_z,A_y)");
      w = num.cwiseQuotient(den);
      break;
    }
    case ZnStrategy::n_model: {
      out.kind = "w_11*^(Z,N):N";
      require(nz.lambda1n, "lambda_1^N density model");
      require(nz.pn_full1, "P_1(N|Z,A_z,A_y) density model");
      require(nz.g_zazay, "G ~ (Z,A_z,A_y) basis");
      require(nz.g_azay, "G ~ (A_z,A_y) basis");
      const std::string& gcol = ds.roles().group;
      FittedModel mn = fit_glm(expand_basis(ds, *nz.g_zazay).X, ds.column(gcol),
                               Family::binomial, &open);
      mn.basis = *nz.g_zazay;
      FittedModel md = fit_glm(expand_basis(ds, *nz.g_azay).X, ds.column(gcol),
                               Family::binomial, &open);
      md.basis = *nz.g_azay;
      Eigen::VectorXd pn = predict(mn, ds), pd = predict(md, ds);
      check_floor(pn, opts.probability_floor, "P(G=1|Z,A_z,A_y)");
      check_floor(pd, opts.probability_floor, "P(G=1|A_z,A_y)");
      Eigen::VectorXd qn = Eigen::VectorXd::Ones(n) - pn;
      Eigen::VectorXd qd = Eigen::VectorXd::Ones(n) - pd;
      check_floor(qn, opts.probability_floor, "P(G=0|Z,A_z,A_y)");
      check_floor(qd, opts.probability_floor, "P(G=0|A_z,A_y)");
      // odds(G=0 vs 1 | Z,A_z,A_y) / odds(G=0 vs 1 | A_z,A_y)
      Eigen::VectorXd shift = qn.cwiseQuotient(pn).cwiseQuotient(qd.cwiseQuotient(pd));
      Eigen::VectorXd num = nz.lambda1n->density_at(ds);
      Eigen::VectorXd den = nz.pn_full1->density_at(ds);
      check_floor(den, opts.probability_floor, "P_1(N|Z,A_z,A_y)");
      w = shift.cwiseProduct(num.cwiseQuotient(den));
      break;
    }
    case ZnStrategy::z_bridge: {
      out.kind = "w_1bd1*^(Z,N)";
      require(nz.bridge, "artificial sample ◆");
      require(nz.bd_znazay, "bridge ~ (Z,N,A_z,A_y) basis");
      require(nz.bd_zazay, "bridge ~ (Z,A_z,A_y) basis");
      require(nz.g_azay, "G ~ (A_z,A_y) basis");
      const ArtificialSample& bd = *nz.bridge;
      if (bd.kind != SampleKind::z_bridge)
        throw ValidationError("weight_zn(z_bridge): sample is not a ◆ sample");
      Eigen::VectorXd open_bd = gate_open_mask(bd.data, opts);
      Eigen::VectorXd w_bd = bd.clone_weight.cwiseProduct(open_bd);
      Eigen::VectorXd g1 = group_mask(ds, 1).cwiseProduct(open);
      Eigen::VectorXd g0 = group_mask(ds, 0).cwiseProduct(open);
      // odds(◆ vs 1 | Z,N,A_z,A_y) on G=1 rows
      Eigen::VectorXd odds_a = stacked_odds(bd.data, w_bd, ds, g1, *nz.bd_znazay, ds,
                                            opts.probability_floor);
      // odds(◆ vs 0 | Z,A_z,A_y)
      Eigen::VectorXd odds_b = stacked_odds(bd.data, w_bd, ds, g0, *nz.bd_zazay, ds,
                                            opts.probability_floor);
      // odds(G=1 vs 0 | A_z,A_y)
      const std::string& gcol = ds.roles().group;
      FittedModel mg = fit_glm(expand_basis(ds, *nz.g_azay).X, ds.column(gcol),
                               Family::binomial, &open);
      mg.basis = *nz.g_azay;
      Eigen::VectorXd pg = predict(mg, ds);
      check_floor(pg, opts.probability_floor, "P(G=1|A_z,A_y)");
      Eigen::VectorXd qg = Eigen::VectorXd::Ones(n) - pg;
      check_floor(qg, opts.probability_floor, "P(G=0|A_z,A_y)");
      w = odds_a.cwiseQuotient(odds_b).cwiseProduct(pg.cwiseQuotient(qg));
      break;
    }
    case ZnStrategy::n_bridge: {
      out.kind = "w_1d1*^(Z,N)";
      require(nz.bridge, "artificial sample ◇");
      require(nz.bd_znazay, "bridge ~ (Z,N,A_z,A_y) basis");
      require(nz.bd_nazay, "bridge ~ (N,A_z,A_y) basis");
      const ArtificialSample& dm = *nz.bridge;
      if (dm.kind != SampleKind::n_bridge)
        throw ValidationError("weight_zn(n_bridge): sample is not a ◇ sample");
      Eigen::VectorXd open_dm = gate_open_mask(dm.data, opts);
      Eigen::VectorXd w_dm = dm.clone_weight.cwiseProduct(open_dm);
      Eigen::VectorXd g1 = group_mask(ds, 1).cwiseProduct(open);
      Eigen::VectorXd odds_a = stacked_odds(dm.data, w_dm, ds, g1, *nz.bd_znazay, ds,
                                            opts.probability_floor);
      Eigen::VectorXd odds_b = stacked_odds(dm.data, w_dm, ds, g1, *nz.bd_nazay, ds,
                                            opts.probability_floor);
      w = odds_a.cwiseQuotient(odds_b);
      break;
    }
  }

  apply_gate_identity(w, ds, opts);
  out.values = w;
  truncate(out.values, out.analytic, opts.truncate_percentile);
  return out;
}

WeightVector weight_bridge_step(const Dataset& ds, const ArtificialSample& sample,
                                BridgeStepKind kind, const BasisSpec& num_basis,
                                const BasisSpec& den_basis, const WeightOptions& opts) {
  WeightVector out;
  out.analytic = Eigen::VectorXd::Ones(sample.data.rows());
  out.diagnostic = out.analytic;
  Eigen::VectorXd open_s = gate_open_mask(sample.data, opts);
  Eigen::VectorXd w_s = sample.clone_weight.cwiseProduct(open_s);
  Eigen::VectorXd w;
  if (kind == BridgeStepKind::diamond_black) {
    if (sample.kind != SampleKind::z_bridge)
      throw ValidationError("bridge-step ◆ weight needs a ◆ sample");
    out.kind = "w_bd1*^(Z,N)";
    out.analytic_tag = "sample ◆";
    out.target_tag = "G=0 Z-shift";
    Eigen::VectorXd g0 =
        group_mask(ds, 0).cwiseProduct(gate_open_mask(ds, opts));
    // odds(G=0 vs ◆ | Z,A_z,A_y) / odds(G=0 vs ◆ | A_z,A_y), on ◆ rows
    Eigen::VectorXd odds_n = stacked_odds(ds, g0, sample.data, w_s, num_basis,
                                          sample.data, opts.probability_floor);
    Eigen::VectorXd odds_d = stacked_odds(ds, g0, sample.data, w_s, den_basis,
                                          sample.data, opts.probability_floor);
    w = odds_n.cwiseQuotient(odds_d);
  } else {
    if (sample.kind != SampleKind::n_bridge)
      throw ValidationError("bridge-step ◇ weight needs a ◇ sample");
    out.kind = "w_d1*^(Z,N,Az)";
    out.analytic_tag = "sample ◇";
    out.target_tag = "G=1 (N,A_z)-shift";
    Eigen::VectorXd g1 =
        group_mask(ds, 1).cwiseProduct(gate_open_mask(ds, opts));
    // odds(G=1 vs ◇ | N,A_z,A_y) / odds(G=1 vs ◇ | A_y), on ◇ rows
    Eigen::VectorXd odds_n = stacked_odds(ds, g1, sample.data, w_s, num_basis,
                                          sample.data, opts.probability_floor);
    Eigen::VectorXd odds_d = stacked_odds(ds, g1, sample.data, w_s, den_basis,
                                          sample.data, opts.probability_floor);
    w = odds_n.cwiseQuotient(odds_d);
  }
  apply_gate_identity(w, sample.data, opts);
  out.values = w;
  truncate(out.values, out.analytic, opts.truncate_percentile);
  return out;
}

WeightVector weight_rw(const Dataset& ds, RwForm form, const RwNuisances& nz,
                       const WeightOptions& opts) {
  WeightVector out;
  out.analytic = group_mask(ds, 0);
  out.diagnostic = out.analytic;
  out.analytic_tag = "G=0";
  out.target_tag = "sample ▲";
  const Eigen::Index n = ds.rows();
  Eigen::VectorXd open = gate_open_mask(ds, opts);
  auto require = [](const void* p, const char* what) {
    if (!p) throw ValidationError(std::string("weight_rw: missing nuisance: ") + what);
  };
  require(nz.num_density, "numerator density model");
  require(nz.den_density, "denominator density model");
  require(nz.g_num, "group-odds numerator basis");
  require(nz.g_ay, "G ~ A_y basis");

  Eigen::VectorXd num = nz.num_density->density_at(ds);
  Eigen::VectorXd den = nz.den_density->density_at(ds);
  check_floor(den, opts.probability_floor, "RW denominator density");
  Eigen::VectorXd ratio = num.cwiseQuotient(den);

  const std::string& gcol = ds.roles().group;
  FittedModel mn =
      fit_glm(expand_basis(ds, *nz.g_num).X, ds.column(gcol), Family::binomial, &open);
  mn.basis = *nz.g_num;
  FittedModel md = fit_glm(ds, gcol, *nz.g_ay, Family::binomial, nullptr);
  Eigen::VectorXd pn = predict(mn, ds), pd = predict(md, ds);
  check_floor(pn, opts.probability_floor, "P(G=1|...)");
  check_floor(pd, opts.probability_floor, "P(G=1|A_y)");
  Eigen::VectorXd qn = Eigen::VectorXd::Ones(n) - pn;
  Eigen::VectorXd qd = Eigen::VectorXd::Ones(n) - pd;
  check_floor(qn, opts.probability_floor, "P(G=0|...)");
  check_floor(qd, opts.probability_floor, "P(G=0|A_y)");
  Eigen::VectorXd shift = pn.cwiseQuotient(qn).cwiseQuotient(pd.cwiseQuotient(qd));

  out.kind = (form == RwForm::z_form) ? "w_01*^(Z,N,Az):Z" : "w_01*^(Z,N,Az):N";
  Eigen::VectorXd w = ratio.cwiseProduct(shift);
  apply_gate_identity(w, ds, opts);
  out.values = w;
  truncate(out.values, out.analytic, opts.truncate_percentile);
  return out;
}

}  // namespace cda
