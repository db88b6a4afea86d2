#include "cda/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "cda/bootstrap.hpp"
#include "cda/seeding.hpp"

namespace cda {

namespace {

struct Scope {
  bool z = false, n = false, az = false, ay = false;
};

// Tiered design over the benchmark generator's columns. correct carries
// the generator's quadratics and the Z x Az2 interaction; flexible adds
// selected two-way interactions; incorrect keeps mains of Ay2, N1, Az2
// (and Z) only.
BasisSpec scen_basis(SpecLevel lv, Scope sc,
                     const std::vector<std::string>& extra = {}) {
  BasisSpec b;
  if (lv == SpecLevel::incorrect) {
    if (sc.z) b.add("Z");
    if (sc.n) b.add("N1");
    if (sc.az) b.add("Az2");
    if (sc.ay) b.add("Ay2");
    for (const auto& c : extra) b.add(c);
    return b;
  }
  if (sc.z) b.add("Z");
  if (sc.n) b.add("N1").add("N2");
  if (sc.az) b.add("Az1").add("Az2").add("Az2", 2);
  if (sc.ay) b.add("Ay1").add("Ay2").add("Ay2", 2);
  for (const auto& c : extra) b.add(c);
  if (sc.z && sc.az) b.cross("Z", "Az2");
  if (lv == SpecLevel::flexible) {
    if (sc.z && sc.az) b.cross("Z", "Az1");
    if (sc.z && sc.n) b.cross("Z", "N1").cross("Z", "N2");
    if (sc.az && sc.n) b.cross("Az2", "N1").cross("Az2", "N2");
    if (sc.az && sc.ay) b.cross("Az2", "Ay1");
  }
  return b;
}

std::vector<TargetSpec> z_fact(SpecLevel lv, bool with_n, bool gate) {
  TargetSpec t;
  t.name = "Z";
  t.basis = scen_basis(lv, {.z = false, .n = with_n, .az = true, .ay = true});
  if (gate) {
    t.gate_col = "Az2";
    t.gate_threshold = 140.0;
    t.closed_value = 0.0;
  }
  return {t};
}

std::vector<TargetSpec> n_fact(SpecLevel lv, bool with_z) {
  // N1, then N2 given N1; the predecessor stays in the design at every tier
  TargetSpec t1, t2;
  t1.name = "N1";
  t1.basis = scen_basis(lv, {.z = with_z, .az = true, .ay = true});
  t2.name = "N2";
  t2.basis = scen_basis(lv, {.z = with_z, .az = true, .ay = true}, {"N1"});
  return {t1, t2};
}

BasisSpec strip_z_interactions(BasisSpec b) {
  std::erase_if(b.interactions,
                [](const BasisSpec::Interaction& ix) { return ix.a == "Z" || ix.b == "Z"; });
  return b;
}

double quantile7(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  double h = q * static_cast<double>(n - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  std::size_t hi = std::min(lo + 1, n - 1);
  double frac = h - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

SpecLevel parse_spec_level(const std::string& s) {
  if (s == "correct") return SpecLevel::correct;
  if (s == "flexible") return SpecLevel::flexible;
  if (s == "incorrect") return SpecLevel::incorrect;
  throw ValidationError("unknown nuisance tier '" + s +
                        "' (expected correct|flexible|incorrect)");
}

std::string spec_level_name(SpecLevel lv) {
  switch (lv) {
    case SpecLevel::correct: return "correct";
    case SpecLevel::flexible: return "flexible";
    case SpecLevel::incorrect: return "incorrect";
  }
  return "?";
}

std::string estimator_name(EstimatorId id) {
  switch (id) {
    case EstimatorId::eobd: return "E-OBD";
    case EstimatorId::z_model_pw: return "Z-Model PW";
    case EstimatorId::n_model_pw: return "N-Model PW";
    case EstimatorId::z_bridge_pw: return "Z-Bridge PW";
    case EstimatorId::n_bridge_pw: return "N-Bridge PW";
    case EstimatorId::z_model_se: return "Z-Model SE";
    case EstimatorId::n_model_se: return "N-Model SE";
    case EstimatorId::z_bridge_se: return "Z-Bridge SE";
    case EstimatorId::n_bridge_se: return "N-Bridge SE";
    case EstimatorId::z_model_wse: return "Z-Model WSE";
    case EstimatorId::n_model_wse: return "N-Model WSE";
    case EstimatorId::z_bridge_wse: return "Z-Bridge WSE";
    case EstimatorId::n_bridge_wse: return "N-Bridge WSE";
    case EstimatorId::z_model_rw: return "Z-Model RW";
    case EstimatorId::n_model_rw: return "N-Model RW";
    case EstimatorId::z_bridge_rw: return "Z-Bridge RW";
    case EstimatorId::n_bridge_rw: return "N-Bridge RW";
  }
  return "?";
}

EstimatorId parse_estimator(const std::string& name) {
  std::string key;
  for (char ch : name) {
    if (ch == ' ' || ch == '-') ch = '_';
    key += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  for (EstimatorId id : all_estimators()) {
    std::string cand;
    for (char ch : estimator_name(id)) {
      if (ch == ' ' || ch == '-') ch = '_';
      cand += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    if (cand == key) return id;
  }
  throw ValidationError("unknown estimator '" + name + "'");
}

std::vector<EstimatorId> all_estimators() {
  return {EstimatorId::eobd,
          EstimatorId::z_model_pw,  EstimatorId::n_model_pw,
          EstimatorId::z_bridge_pw, EstimatorId::n_bridge_pw,
          EstimatorId::z_model_se,  EstimatorId::n_model_se,
          EstimatorId::z_bridge_se, EstimatorId::n_bridge_se,
          EstimatorId::z_model_wse, EstimatorId::n_model_wse,
          EstimatorId::z_bridge_wse, EstimatorId::n_bridge_wse,
          EstimatorId::z_model_rw,  EstimatorId::n_model_rw,
          EstimatorId::z_bridge_rw, EstimatorId::n_bridge_rw};
}

double run_estimator(Engine& e, EstimatorId id) {
  switch (id) {
    case EstimatorId::eobd: return estimate_eobd(e).value;
    case EstimatorId::z_model_pw: return estimate_pw(e, ZnStrategy::z_model).value;
    case EstimatorId::n_model_pw: return estimate_pw(e, ZnStrategy::n_model).value;
    case EstimatorId::z_bridge_pw: return estimate_pw(e, ZnStrategy::z_bridge).value;
    case EstimatorId::n_bridge_pw: return estimate_pw(e, ZnStrategy::n_bridge).value;
    case EstimatorId::z_model_se: return estimate_se(e, ZnStrategy::z_model).value;
    case EstimatorId::n_model_se: return estimate_se(e, ZnStrategy::n_model).value;
    case EstimatorId::z_bridge_se: return estimate_se(e, ZnStrategy::z_bridge).value;
    case EstimatorId::n_bridge_se: return estimate_se(e, ZnStrategy::n_bridge).value;
    case EstimatorId::z_model_wse: return estimate_wse(e, ZnStrategy::z_model).value;
    case EstimatorId::n_model_wse: return estimate_wse(e, ZnStrategy::n_model).value;
    case EstimatorId::z_bridge_wse: return estimate_wse(e, ZnStrategy::z_bridge).value;
    case EstimatorId::n_bridge_wse: return estimate_wse(e, ZnStrategy::n_bridge).value;
    case EstimatorId::z_model_rw: return estimate_rw(e, ZnStrategy::z_model).value;
    case EstimatorId::n_model_rw: return estimate_rw(e, ZnStrategy::n_model).value;
    case EstimatorId::z_bridge_rw: return estimate_rw(e, ZnStrategy::z_bridge).value;
    case EstimatorId::n_bridge_rw: return estimate_rw(e, ZnStrategy::n_bridge).value;
  }
  throw ValidationError("unknown estimator id");
}

EstimatorConfig benchmark_config(const Dataset& ds, const SlotLevels& lv,
                                 bool gate_handling, std::uint64_t sample_seed) {
  EstimatorConfig c = EstimatorConfig::defaults(ds);
  c.outcome_family =
      ds.roles().outcome == "W" ? Family::binomial : Family::gaussian;

  const Scope full{.z = true, .n = true, .az = true, .ay = true};
  const Scope zazay{.z = true, .az = true, .ay = true};
  const Scope nazay{.n = true, .az = true, .ay = true};
  const Scope azay{.az = true, .ay = true};
  const Scope ay{.ay = true};

  c.mu1 = scen_basis(lv.get(lv.mu), full);
  c.eobd = strip_z_interactions(scen_basis(lv.get(lv.mu), full));
  c.eta1 = scen_basis(lv.all, ay);
  c.kappa1 = scen_basis(lv.get(lv.kappa), azay);
  c.zeta1 = scen_basis(lv.get(lv.zeta), zazay);
  c.nu1 = scen_basis(lv.get(lv.nu), nazay);

  const SpecLevel zn = lv.get(lv.w_zn);
  c.lambda0z = z_fact(zn, false, gate_handling);
  c.lambda1n = n_fact(zn, false);
  c.pz_full1 = z_fact(zn, true, gate_handling);
  c.pn_full1 = n_fact(zn, true);
  c.rw_den_z = z_fact(zn, true, gate_handling);
  c.rw_den_n = n_fact(zn, true);

  c.t_ay = scen_basis(lv.all, ay);
  c.g_ay = scen_basis(lv.all, ay);
  c.w01_num = scen_basis(lv.get(lv.w_01), azay);
  c.w01_den = scen_basis(lv.get(lv.w_01), ay);
  c.g_azay = scen_basis(zn, azay);
  c.g_zazay = scen_basis(zn, zazay);
  c.g_nazay = scen_basis(zn, nazay);
  c.bd_znazay = scen_basis(zn, full);
  c.bd_zazay = scen_basis(zn, zazay);
  c.bd_nazay = scen_basis(zn, nazay);
  c.step_black_num = scen_basis(lv.get(lv.w_black), zazay);
  c.step_black_den = scen_basis(lv.get(lv.w_black), azay);
  c.step_open_num = scen_basis(lv.get(lv.w_open), nazay);
  c.step_open_den = scen_basis(lv.get(lv.w_open), ay);
  c.cens = scen_basis(lv.all, full);
  c.b0 = scen_basis(lv.all, zazay);
  c.h1 = scen_basis(lv.all, nazay);

  // the generator's group separation in Az2 produces occasional stacked
  // membership fits in the e-15 range; keep replicates comparable instead
  // of aborting them, and cap the far weight tail
  c.weight_opts.probability_floor = 1e-9;
  c.weight_opts.truncate_percentile = 0.995;

  c.sample_opts.seed = sample_seed;
  if (gate_handling) {
    c.sample_opts.gate_col = "Az2";
    c.sample_opts.gate_threshold = 140.0;
    c.sample_opts.gate_closed_value = 0.0;
    c.weight_opts.gate_col = "Az2";
    c.weight_opts.gate_threshold = 140.0;
  }
  return c;
}

namespace {

struct RepResult {
  std::vector<double> est, lo, hi;
  std::vector<char> ok;
};

// point estimates + one shared-resample bootstrap pass for all estimators
RepResult run_rep(const ScenarioSpec& sc, const std::vector<EstimatorId>& ests,
                  int r) {
  const std::size_t ne = ests.size();
  RepResult res;
  res.est.assign(ne, 0.0);
  res.lo.assign(ne, 0.0);
  res.hi.assign(ne, 0.0);
  res.ok.assign(ne, 1);

  const std::uint64_t data_seed = mix_seed(sc.seed, 3ull * r);
  const std::uint64_t samp_seed = mix_seed(sc.seed, 3ull * r + 1);
  const std::uint64_t boot_seed = mix_seed(sc.seed, 3ull * r + 2);

  Dataset ds;
  try {
    ds = dgm_generate(sc.n, DgmArm::observed, data_seed, sc.binary_outcome);
  } catch (const std::runtime_error&) {
    res.ok.assign(ne, 0);
    return res;
  }

  auto evaluate = [&](const Dataset& d, std::uint64_t s, std::vector<double>& out,
                      std::vector<char>& okv) {
    try {
      Engine e(d, benchmark_config(d, sc.levels, sc.gate_handling, s));
      for (std::size_t j = 0; j < ne; ++j) {
        try {
          out[j] = run_estimator(e, ests[j]);
        } catch (const ValidationError&) {
          okv[j] = 0;
        } catch (const NumericError&) {
          okv[j] = 0;
        }
      }
    } catch (const std::runtime_error&) {
      std::fill(okv.begin(), okv.end(), 0);
    }
  };

  evaluate(ds, samp_seed, res.est, res.ok);

  std::vector<std::vector<double>> draws(ne);
  std::vector<int> boot_fail(ne, 0);
  for (int b = 0; b < sc.bootstrap_b; ++b) {
    Dataset rs = resample(ds, mix_seed(boot_seed, b), false);
    std::vector<double> est(ne, 0.0);
    std::vector<char> okv(ne, 1);
    evaluate(rs, mix_seed(samp_seed, 1000 + b), est, okv);
    for (std::size_t j = 0; j < ne; ++j) {
      if (okv[j])
        draws[j].push_back(est[j]);
      else
        ++boot_fail[j];
    }
  }
  const double alpha = (1.0 - sc.ci_level) / 2.0;
  for (std::size_t j = 0; j < ne; ++j) {
    if (!res.ok[j]) continue;
    if (sc.bootstrap_b > 0 &&
        (draws[j].size() < 2 ||
         boot_fail[j] > 0.05 * static_cast<double>(sc.bootstrap_b))) {
      res.ok[j] = 0;
      continue;
    }
    if (sc.bootstrap_b > 0) {
      std::sort(draws[j].begin(), draws[j].end());
      res.lo[j] = quantile7(draws[j], alpha);
      res.hi[j] = quantile7(draws[j], 1.0 - alpha);
    } else {
      res.lo[j] = res.hi[j] = res.est[j];
    }
  }
  return res;
}

}  // namespace

std::vector<MetricsRow> run_scenario(const ScenarioSpec& sc) {
  if (sc.reps <= 0) return {};
  const std::vector<EstimatorId> ests =
      sc.estimators.empty() ? all_estimators() : sc.estimators;
  const std::size_t ne = ests.size();

  std::vector<RepResult> reps(static_cast<std::size_t>(sc.reps));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int r = next.fetch_add(1);
      if (r >= sc.reps) return;
      reps[static_cast<std::size_t>(r)] = run_rep(sc, ests, r);
    }
  };
  int nthreads = std::max(1, sc.threads);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<MetricsRow> out;
  for (std::size_t j = 0; j < ne; ++j) {
    MetricsRow row;
    row.estimator = estimator_name(ests[j]);
    std::vector<double> est;
    int covered = 0;
    for (const auto& rep : reps) {
      if (!rep.ok[j]) {
        ++row.failures;
        continue;
      }
      est.push_back(rep.est[j]);
      if (rep.lo[j] <= sc.truth && sc.truth <= rep.hi[j]) ++covered;
    }
    row.reps_used = static_cast<int>(est.size());
    if (!est.empty()) {
      double mean = 0.0;
      for (double v : est) mean += v;
      mean /= static_cast<double>(est.size());
      row.bias = mean - sc.truth;
      double ss = 0.0;
      for (double v : est) ss += (v - mean) * (v - mean);
      row.se = est.size() > 1
                   ? std::sqrt(ss / static_cast<double>(est.size() - 1))
                   : 0.0;
      row.rmse = std::sqrt(row.bias * row.bias + row.se * row.se);
      row.coverage = static_cast<double>(covered) / static_cast<double>(est.size());
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace cda
