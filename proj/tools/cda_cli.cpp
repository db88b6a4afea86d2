#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cda/bootstrap.hpp"
#include "cda/config.hpp"
#include "cda/diagnostics.hpp"
#include "cda/scenario.hpp"
#include "cda/seeding.hpp"

namespace {

using namespace cda;

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content;
  else
    write_atomic(out_path, content);
}

int resolve_threads(int flag_value, ConfigMap* cfg) {
  long cfg_threads = cfg ? cfg->integer("threads", 0) : 0;
  if (flag_value > 0) return flag_value;
  if (cfg_threads > 0) return static_cast<int>(cfg_threads);
  if (const char* env = std::getenv("CDA_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      throw ValidationError(std::string("CDA_THREADS is not a number: ") + env);
    }
  }
  return 1;
}

// ---------------------------------------------------------------- truth

int cmd_truth(double n_arg, std::uint64_t seed, const std::string& out_path) {
  auto n = static_cast<Eigen::Index>(n_arg);
  if (n < 1) throw ValidationError("truth: --n must be >= 1");
  struct Line {
    const char* quantity;
    DgmArm arm;
    int group;
    std::uint64_t k;
  };
  const Line lines[] = {
      {"theta1", DgmArm::observation, 1, 0},
      {"theta0", DgmArm::observation, 0, 1},
      {"theta1_star", DgmArm::intervention, 1, 2},
  };
  std::ostringstream os;
  os << "quantity,outcome,value,mc_se,n\n";
  for (const auto& ln : lines) {
    auto [y, w] = dgm_truth_both(n, ln.arm, ln.group, mix_seed(seed, ln.k));
    os << ln.quantity << ",continuous," << format_number(y.value) << ","
       << format_number(y.mc_se) << "," << y.n << "\n";
    os << ln.quantity << ",binary," << format_number(w.value) << ","
       << format_number(w.mc_se) << "," << w.n << "\n";
  }
  emit(out_path, os.str());
  return 0;
}

// ------------------------------------------------------------- simulate

SlotLevels slot_levels_from(ConfigMap& cfg) {
  SlotLevels lv;
  lv.all = parse_spec_level(cfg.get("tier", "flexible"));
  auto slot = [&](const char* key) -> std::optional<SpecLevel> {
    std::string v = cfg.get(key, "");
    if (v.empty()) return std::nullopt;
    return parse_spec_level(v);
  };
  lv.mu = slot("tier.mu");
  lv.zeta = slot("tier.zeta");
  lv.nu = slot("tier.nu");
  lv.kappa = slot("tier.kappa");
  lv.w_zn = slot("tier.w_zn");
  lv.w_black = slot("tier.w_step_black");
  lv.w_open = slot("tier.w_step_open");
  lv.w_01 = slot("tier.w_01");
  return lv;
}

int cmd_simulate(const std::string& cfg_path, int threads_flag,
                 const std::string& out_flag) {
  ConfigMap cfg = ConfigMap::load(cfg_path);
  ScenarioSpec sc;
  sc.n = cfg.integer("n", 5000);
  std::string outcome = cfg.get("outcome", "continuous");
  if (outcome != "continuous" && outcome != "binary")
    throw ValidationError("config key 'outcome' must be continuous or binary");
  sc.binary_outcome = outcome == "binary";
  sc.levels = slot_levels_from(cfg);
  sc.gate_handling =
      cfg.flag("gate", sc.levels.all != SpecLevel::incorrect && sc.n >= 5000);
  sc.reps = static_cast<int>(cfg.integer("reps", 200));
  sc.bootstrap_b = static_cast<int>(cfg.integer("bootstrap", 200));
  sc.ci_level = cfg.number("ci_level", 0.95);
  sc.seed = cfg.seed("seed");
  sc.threads = resolve_threads(threads_flag, &cfg);
  for (const auto& name : cfg.list("estimators"))
    sc.estimators.push_back(parse_estimator(name));

  if (cfg.has("truth")) {
    sc.truth = cfg.number("truth", 0.0);
    cfg.integer("truth_n", 0);
    cfg.integer("truth_seed", 0);
  } else {
    auto tn = static_cast<Eigen::Index>(cfg.number("truth_n", 1e7));
    std::uint64_t ts = static_cast<std::uint64_t>(cfg.integer("truth_seed", 1));
    std::cerr << "computing theta_1* truth at n=" << tn << "\n";
    TruthEstimate t =
        dgm_truth(tn, DgmArm::intervention, 1, ts, sc.binary_outcome);
    sc.truth = t.value;
    std::cerr << "truth = " << format_number(t.value)
              << " (mc_se " << format_number(t.mc_se) << ")\n";
  }
  std::string out_path = out_flag.empty() ? cfg.get("out", "") : out_flag;
  cfg.finish();

  std::vector<MetricsRow> rows = run_scenario(sc);
  std::ostringstream os;
  os << "estimator,bias,se,rmse,coverage,reps,failures\n";
  for (const auto& r : rows)
    os << r.estimator << "," << format_number(r.bias) << "," << format_number(r.se)
       << "," << format_number(r.rmse) << "," << format_number(r.coverage) << ","
       << r.reps_used << "," << r.failures << "\n";
  emit(out_path, os.str());
  return 0;
}

// ------------------------------------------------- estimate / diagnose

struct RunSetup {
  Dataset data;
  EstimatorConfig config;
  ThetaForm obs_form = ThetaForm::pw;
  BootstrapOptions boot;
  std::string out_path;
  std::vector<EstimatorId> estimators;
};

ThetaForm parse_form(const std::string& s) {
  if (s == "pw") return ThetaForm::pw;
  if (s == "se") return ThetaForm::se;
  if (s == "wse") return ThetaForm::wse;
  throw ValidationError("config key 'obs_form' must be pw, se, or wse");
}

RunSetup load_setup(const std::string& cfg_path, const std::string& data_flag,
                    const std::string& out_flag, bool with_bootstrap) {
  ConfigMap cfg = ConfigMap::load(cfg_path);
  std::string data_path = data_flag.empty() ? cfg.require("data") : data_flag;
  if (!data_flag.empty()) cfg.get("data", "");
  Roles roles = roles_from_config(cfg);
  RunSetup rs;
  rs.data = Dataset::load_csv(data_path, roles);

  std::string bases = cfg.get("bases", "mains");
  if (bases == "mains")
    rs.config = EstimatorConfig::defaults(rs.data);
  else if (bases == "saturated")
    rs.config = EstimatorConfig::saturated(rs.data);
  else
    throw ValidationError("config key 'bases' must be mains or saturated");

  if (cfg.has("standard.column")) {
    rs.config.std_pop = StandardPopulation::from_column(cfg.require("standard.column"));
  } else {
    rs.config.std_pop = StandardPopulation::group_g(
        static_cast<int>(cfg.integer("standard.group", 1)));
  }
  if (!roles.binary_outcome.empty() && roles.outcome == roles.binary_outcome)
    rs.config.outcome_family = Family::binomial;
  if (cfg.flag("binary_outcome", false)) rs.config.outcome_family = Family::binomial;

  rs.config.weight_opts.probability_floor =
      cfg.number("weight.floor", rs.config.weight_opts.probability_floor);
  rs.config.weight_opts.truncate_percentile =
      cfg.number("weight.truncate_percentile", 1.0);
  std::string gate_col = cfg.get("gate.col", "");
  if (!gate_col.empty()) {
    double thr = cfg.number("gate.threshold", 0.0);
    rs.config.weight_opts.gate_col = gate_col;
    rs.config.weight_opts.gate_threshold = thr;
    rs.config.sample_opts.gate_col = gate_col;
    rs.config.sample_opts.gate_threshold = thr;
    rs.config.sample_opts.gate_closed_value = cfg.number("gate.closed_value", 0.0);
  } else {
    cfg.number("gate.threshold", 0.0);
    cfg.number("gate.closed_value", 0.0);
  }
  rs.config.sample_opts.m = static_cast<int>(cfg.integer("sample.m", 100));
  rs.config.sample_opts.seed = static_cast<std::uint64_t>(cfg.integer("sample.seed", 0));
  std::string mode = cfg.get("sample.mode", "enumeration");
  if (mode == "enumeration")
    rs.config.conv.mode = ConvenientDist::Mode::enumeration;
  else if (mode == "resample")
    rs.config.conv.mode = ConvenientDist::Mode::resample_contrast;
  else if (mode == "uniform")
    rs.config.conv.mode = ConvenientDist::Mode::uniform;
  else
    throw ValidationError(
        "config key 'sample.mode' must be enumeration, resample, or uniform");

  rs.obs_form = parse_form(cfg.get("obs_form", "pw"));
  for (const auto& name : cfg.list("estimators"))
    rs.estimators.push_back(parse_estimator(name));
  if (rs.estimators.empty()) rs.estimators = all_estimators();

  if (with_bootstrap) {
    rs.boot.replicates = static_cast<int>(cfg.integer("bootstrap.replicates", 200));
    rs.boot.cluster = cfg.flag("bootstrap.cluster", false);
    rs.boot.level = cfg.number("bootstrap.level", 0.95);
    if (cfg.has("bootstrap.seed")) {
      rs.boot.seed = cfg.seed("bootstrap.seed");
    } else {
      std::cerr << "warning: bootstrap.seed not set, defaulting to 0\n";
      rs.boot.seed = 0;
    }
  }
  rs.out_path = out_flag.empty() ? cfg.get("out", "") : out_flag;
  cfg.finish();
  return rs;
}

int cmd_estimate(const std::string& cfg_path, const std::string& data_flag,
                 const std::string& out_flag) {
  RunSetup rs = load_setup(cfg_path, data_flag, out_flag, true);
  const std::size_t ne = rs.estimators.size();

  struct Shot {
    double theta1 = 0.0, theta0 = 0.0;
    std::vector<double> star;
    std::vector<char> ok;
  };
  auto evaluate = [&](const Dataset& d) {
    Shot s;
    s.star.assign(ne, 0.0);
    s.ok.assign(ne, 1);
    Engine e(d, rs.config);
    s.theta1 = estimate_theta_obs(e, 1, rs.obs_form).value;
    s.theta0 = estimate_theta_obs(e, 0, rs.obs_form).value;
    for (std::size_t j = 0; j < ne; ++j) {
      try {
        s.star[j] = run_estimator(e, rs.estimators[j]);
      } catch (const ValidationError& err) {
        std::cerr << estimator_name(rs.estimators[j]) << ": " << err.what() << "\n";
        s.ok[j] = 0;
      } catch (const NumericError& err) {
        std::cerr << estimator_name(rs.estimators[j]) << ": " << err.what() << "\n";
        s.ok[j] = 0;
      }
    }
    return s;
  };

  Shot point = evaluate(rs.data);

  std::vector<std::vector<double>> star_draws(ne), red_draws(ne);
  std::vector<int> fails(ne, 0);
  for (int b = 0; b < rs.boot.replicates; ++b) {
    Dataset d = resample(rs.data, mix_seed(rs.boot.seed, b), rs.boot.cluster);
    try {
      Shot s = evaluate(d);
      for (std::size_t j = 0; j < ne; ++j) {
        if (s.ok[j]) {
          star_draws[j].push_back(s.star[j]);
          red_draws[j].push_back(s.theta1 - s.star[j]);
        } else {
          ++fails[j];
        }
      }
    } catch (const std::runtime_error& err) {
      std::cerr << "bootstrap replicate " << b << ": " << err.what() << "\n";
      for (std::size_t j = 0; j < ne; ++j) ++fails[j];
    }
  }

  auto quantile = [](std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    double h = q * static_cast<double>(v.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] * (1.0 - (h - static_cast<double>(lo))) +
           v[hi] * (h - static_cast<double>(lo));
  };

  std::ostringstream os;
  os << "estimator,theta1,theta0,theta1_star,observed,reduced,residual,"
        "se,ci_lo,ci_hi,reduced_lo,reduced_hi,boot_failures\n";
  double alpha = (1.0 - rs.boot.level) / 2.0;
  for (std::size_t j = 0; j < ne; ++j) {
    os << estimator_name(rs.estimators[j]) << ",";
    if (!point.ok[j]) {
      os << "nan,nan,nan,nan,nan,nan,nan,nan,nan,nan,nan," << fails[j] << "\n";
      continue;
    }
    double star = point.star[j];
    os << format_number(point.theta1) << "," << format_number(point.theta0) << ","
       << format_number(star) << "," << format_number(point.theta1 - point.theta0)
       << "," << format_number(point.theta1 - star) << ","
       << format_number(star - point.theta0) << ",";
    const auto& d = star_draws[j];
    bool boot_ok = rs.boot.replicates > 0 && d.size() >= 2 &&
                   fails[j] <= rs.boot.max_failure_rate *
                                   static_cast<double>(rs.boot.replicates);
    if (boot_ok) {
      double mean = 0.0;
      for (double v : d) mean += v;
      mean /= static_cast<double>(d.size());
      double ss = 0.0;
      for (double v : d) ss += (v - mean) * (v - mean);
      os << format_number(std::sqrt(ss / static_cast<double>(d.size() - 1))) << ","
         << format_number(quantile(d, alpha)) << ","
         << format_number(quantile(d, 1.0 - alpha)) << ","
         << format_number(quantile(red_draws[j], alpha)) << ","
         << format_number(quantile(red_draws[j], 1.0 - alpha)) << ",";
    } else {
      os << "nan,nan,nan,nan,nan,";
    }
    os << fails[j] << "\n";
  }
  emit(rs.out_path, os.str());
  return 0;
}

int cmd_diagnose(const std::string& cfg_path, const std::string& data_flag,
                 const std::string& out_flag) {
  RunSetup rs = load_setup(cfg_path, data_flag, out_flag, false);
  Engine e(rs.data, rs.config);
  DiagnosticsReport rep = run_diagnostics(e);
  emit(rs.out_path, rep.to_json() + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causal decomposition analysis toolkit"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "run a Monte Carlo scenario grid");
  std::string sim_cfg, sim_out;
  int sim_threads = 0;
  sim->add_option("--config", sim_cfg, "scenario config file")->required();
  sim->add_option("--threads", sim_threads, "worker thread cap");
  sim->add_option("--out", sim_out, "output table path (default stdout)");

  auto* est = app.add_subcommand("estimate", "decomposition estimates on a CSV");
  std::string est_cfg, est_data, est_out;
  est->add_option("--config", est_cfg, "run config file")->required();
  est->add_option("--data", est_data, "input CSV (overrides config 'data')");
  est->add_option("--out", est_out, "output table path (default stdout)");

  auto* dia = app.add_subcommand("diagnose", "nuisance diagnostics on a CSV");
  std::string dia_cfg, dia_data, dia_out;
  dia->add_option("--config", dia_cfg, "run config file")->required();
  dia->add_option("--data", dia_data, "input CSV (overrides config 'data')");
  dia->add_option("--out", dia_out, "output report path (default stdout)");

  auto* tru = app.add_subcommand("truth", "benchmark-generator truth oracle");
  double tru_n = 0.0;
  std::uint64_t tru_seed = 0;
  std::string tru_out;
  tru->add_option("--n", tru_n, "Monte Carlo draws per quantity")->required();
  tru->add_option("--seed", tru_seed, "stream seed")->required();
  tru->add_option("--out", tru_out, "output table path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_cfg, sim_threads, sim_out);
    if (est->parsed()) return cmd_estimate(est_cfg, est_data, est_out);
    if (dia->parsed()) return cmd_diagnose(dia_cfg, dia_data, dia_out);
    if (tru->parsed()) return cmd_truth(tru_n, tru_seed, tru_out);
    throw cda::ValidationError("no subcommand given");
  } catch (const cda::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const cda::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
