#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "caravan/discrete.hpp"
#include "caravan/icrt.hpp"
#include "caravan/limit.hpp"
#include "caravan/parallel.hpp"
#include "caravan/parking.hpp"
#include "caravan/samplers.hpp"
#include "caravan/stats.hpp"
#include "caravan/verify.hpp"

namespace caravan::cli {

namespace {

using nlohmann::json;

struct Options {
  std::string law = "deterministic:1";
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double eps = 1e-3;
  std::vector<double> t;
  std::vector<double> r;
  std::vector<double> lambda;
  std::size_t replicas = 0;
  std::size_t grid = kDefaultGrid;
  double delta = 0.0;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string out = "-";
  std::string format;
  std::string suite = "lamb";
  std::size_t instances = 1000;
  std::size_t n = 0;
  double threshold = 0.05;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Writes to `--out`, "-" meaning the caller's stream.
void emit(const Options& o, std::ostream& out, const std::function<void(std::ostream&)>& body) {
  if (o.out == "-") {
    body(out);
    return;
  }
  std::ofstream file(o.out, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file '" + o.out + "'");
  body(file);
}

std::string format_of(const Options& o, const std::string& fallback) {
  const std::string f = o.format.empty() ? fallback : o.format;
  if (f != "csv" && f != "json") throw UsageError("--format must be csv or json");
  return f;
}

std::uint64_t seed_of(const Options& o) {
  if (!o.seed) throw UsageError("--seed is required");
  return *o.seed;
}

double alpha_of(const Options& o, const CaravanLaw& law) {
  return std::isnan(o.alpha) ? law.index() : o.alpha;
}

double require_alpha(const Options& o) {
  if (std::isnan(o.alpha)) throw UsageError("--alpha is required");
  return o.alpha;
}

std::vector<double> or_default(const std::vector<double>& v, std::vector<double> fallback) {
  return v.empty() ? std::move(fallback) : v;
}

std::size_t replicas_or(const Options& o, std::size_t fallback) { return o.replicas == 0 ? fallback : o.replicas; }

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
  return os.str();
}

// Appends config-file entries for every flag absent from the command line.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  auto it = std::find(args.begin(), args.end(), "--config");
  if (it == args.end()) return args;
  if (std::next(it) == args.end()) throw UsageError("--config needs a file name");
  const std::string path = *std::next(it);
  args.erase(it, std::next(it, 2));

  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad config file: ") + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");

  auto scalar = [](const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return num(v.get<double>());
    throw UsageError("unsupported config value " + v.dump());
  };
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
    args.push_back(flag);
    if (value.is_array()) {
      for (const json& v : value) args.push_back(scalar(v));
    } else {
      args.push_back(scalar(value));
    }
  }
  return args;
}

int run_park(const Options& o, std::ostream& out) {
  const CaravanLaw law = CaravanLaw::parse(o.law);
  const ParkingTrajectory traj = run_parking(make_instance(law, o.eps, seed_of(o)));
  const std::string fmt = format_of(o, "csv");
  emit(o, out, [&](std::ostream& os) {
    if (fmt == "csv") {
      write_trajectory_csv(os, traj);
      return;
    }
    json j = json::array();
    for (std::size_t step = 0; step < traj.occupied.size(); ++step) {
      json blocks = json::array();
      for (const Arc& a : traj.occupied[step].blocks()) blocks.push_back({{"start", a.start}, {"length", a.length}});
      j.push_back({{"step", step}, {"blocks", blocks}});
    }
    os << j.dump(2) << '\n';
  });
  return kExitOk;
}

int run_limit(const Options& o, std::ostream& out) {
  const CaravanLaw law = CaravanLaw::parse(o.law);
  const std::vector<double> ts = or_default(o.t, {1.0});
  const std::size_t replicas = replicas_or(o, 1);
  const std::uint64_t seed = seed_of(o);
  std::vector<std::vector<RankedMassPartition>> frags(replicas);
  parallel_for(replicas, o.threads, [&](std::size_t k) {
    const LimitPath path = scaled_limit_bridge(law, o.grid, o.delta, derive_seed(seed, k));
    for (double t : ts) frags[k].push_back(fragmentation(path, law.mean() * t));
  });
  const std::string fmt = format_of(o, "csv");
  emit(o, out, [&](std::ostream& os) {
    if (fmt == "csv") {
      bool header = true;
      for (std::size_t k = 0; k < replicas; ++k) {
        for (std::size_t i = 0; i < ts.size(); ++i) {
          write_fragments_csv(os, k, ts[i], frags[k][i], header);
          header = false;
        }
      }
      return;
    }
    json j = json::array();
    for (std::size_t k = 0; k < replicas; ++k) {
      for (std::size_t i = 0; i < ts.size(); ++i) {
        j.push_back({{"replica", k}, {"t", ts[i]}, {"masses", frags[k][i].masses()}});
      }
    }
    os << j.dump(2) << '\n';
  });
  return kExitOk;
}

int run_verify(const Options& o, std::ostream& out) {
  const std::uint64_t seed = seed_of(o);
  SuiteReport report;
  if (o.suite == "lamb") {
    report = lamb_suite(o.instances, seed, o.threads);
  } else if (o.suite == "profile") {
    report = profile_suite(o.instances, seed, o.threads);
  } else if (o.suite == "discrete") {
    report = discrete_suite(o.instances, {10, 100, 1000}, seed, o.threads);
  } else if (o.suite == "fragmentation") {
    report = fragmentation_suite(o.instances, seed, o.threads);
  } else {
    throw UsageError("unknown suite '" + o.suite + "' (lamb, profile, discrete, fragmentation)");
  }
  emit(o, out, [&](std::ostream& os) { os << report.to_json() << '\n'; });
  return report.pass() ? kExitOk : kExitFailed;
}

int run_discrete(const Options& o, std::ostream& out) {
  const CaravanLaw law = CaravanLaw::parse(o.law);
  if (o.n == 0) throw UsageError("--n is required");
  const auto caravans = sample_discrete_caravans(o.n, law, seed_of(o));
  const DiscreteTrajectory traj = knuth_park(o.n, caravans);
  const EquivalenceReport eq = discrete_continuous_equiv(o.n, caravans);
  const std::string fmt = format_of(o, "csv");
  emit(o, out, [&](std::ostream& os) {
    if (fmt == "csv") {
      write_discrete_csv(os, traj);
      return;
    }
    os << json{{"n", o.n},
               {"steps", traj.steps()},
               {"ranked", traj.ranked},
               {"equivalent", eq.pass},
               {"max_discrepancy", eq.max_discrepancy}}
              .dump(2)
       << '\n';
  });
  return eq.pass ? kExitOk : kExitFailed;
}

struct CheckRow {
  std::vector<std::pair<std::string, double>> fields;
  bool pass = true;
};

int emit_rows(const Options& o, std::ostream& out, const std::vector<CheckRow>& rows) {
  const std::string fmt = format_of(o, "csv");
  bool all = true;
  for (const CheckRow& r : rows) all = all && r.pass;
  emit(o, out, [&](std::ostream& os) {
    if (fmt == "csv") {
      for (std::size_t k = 0; k < rows.size(); ++k) {
        if (k == 0) {
          for (std::size_t f = 0; f < rows[k].fields.size(); ++f) os << (f ? "," : "") << rows[k].fields[f].first;
          os << '\n';
        }
        for (std::size_t f = 0; f < rows[k].fields.size(); ++f) os << (f ? "," : "") << num(rows[k].fields[f].second);
        os << '\n';
      }
      return;
    }
    json j;
    j["rows"] = json::array();
    for (const CheckRow& r : rows) {
      json row;
      for (const auto& [name, value] : r.fields) row[name] = value;
      row["pass"] = r.pass;
      j["rows"].push_back(row);
    }
    j["pass"] = all;
    os << j.dump(2) << '\n';
  });
  return all ? kExitOk : kExitFailed;
}

bool within_3se(double estimate, double se, double target) {
  return std::abs(estimate - target) <= 3.0 * se + 1e-12;
}

int run_laplace(const Options& o, std::ostream& out) {
  const double alpha = require_alpha(o);
  const std::vector<double> lambdas = or_default(o.lambda, {0.5, 1.0});
  const std::size_t replicas = replicas_or(o, 100000);
  const std::vector<double> draws = stable_spectrally_positive(alpha, replicas, seed_of(o));
  std::vector<CheckRow> rows;
  for (double lam : lambdas) {
    std::vector<double> v(draws.size());
    for (std::size_t k = 0; k < draws.size(); ++k) v[k] = std::exp(-lam * draws[k]);
    const MeanSe m = mc_mean_se(v);
    const double exact = std::exp(std::pow(lam, alpha));
    rows.push_back({{{"alpha", alpha}, {"lambda", lam}, {"mc_estimate", m.mean}, {"mc_se", m.se}, {"closed_form", exact}},
                    within_3se(m.mean, m.se, exact)});
  }
  return emit_rows(o, out, rows);
}

int run_weibull(const Options& o, std::ostream& out) {
  const double alpha = require_alpha(o);
  const std::vector<double> radii = or_default(o.r, {0.5, 1.0, 2.0});
  const std::size_t replicas = replicas_or(o, 10000);
  const double delta = o.delta > 0.0 ? o.delta : kDefaultIcrtDelta;
  const std::uint64_t seed = seed_of(o);
  std::vector<CheckRow> rows;
  for (double r : radii) {
    const WeibullProductReport w = weibull_product_mc(alpha, r, replicas, seed, delta, o.threads);
    rows.push_back({{{"alpha", alpha},
                     {"r", r},
                     {"mc_estimate", w.estimate.mean},
                     {"mc_se", w.estimate.se},
                     {"closed_form", w.closed_form},
                     {"small_atom_factor", w.small_atom_factor}},
                    within_3se(w.estimate.mean, w.estimate.se, w.closed_form)});
  }
  return emit_rows(o, out, rows);
}

int run_moment(const Options& o, std::ostream& out) {
  const double alpha = require_alpha(o);
  const std::vector<double> ts = or_default(o.t, {0.5, 1.0, 2.0});
  const std::size_t replicas = replicas_or(o, 100000);
  const double delta = o.delta > 0.0 ? o.delta : kDefaultIcrtDelta;
  const std::vector<McEstimate> est = size_biased_moment_mc(alpha, ts, replicas, o.seed.value_or(0), delta, o.threads);
  std::vector<CheckRow> rows;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double q = size_biased_moment_quadrature(alpha, ts[k]);
    rows.push_back({{{"alpha", alpha}, {"t", ts[k]}, {"mc_estimate", est[k].mean}, {"mc_se", est[k].se}, {"quadrature", q}},
                    within_3se(est[k].mean, est[k].se, q)});
  }
  return emit_rows(o, out, rows);
}

json params_json(const Options& o, const CaravanLaw& law, double alpha) {
  return json{{"law", law.describe()}, {"alpha", alpha},      {"eps", o.eps},     {"t", o.t},
              {"replicas", o.replicas}, {"grid", o.grid},      {"delta", o.delta}, {"seed", seed_of(o)},
              {"threshold", o.threshold}};
}

int run_converge(Options o, std::ostream& out) {
  const CaravanLaw law = CaravanLaw::parse(o.law);
  o.t = or_default(o.t, {0.5, 1.0, 2.0});
  o.replicas = replicas_or(o, 2000);
  ConvergenceConfig cfg;
  cfg.law = law;
  cfg.alpha = alpha_of(o, law);
  cfg.t = o.t;
  cfg.eps = o.eps;
  cfg.replicas = o.replicas;
  cfg.seed = seed_of(o);
  cfg.grid = o.grid;
  cfg.delta = o.delta;
  cfg.threshold = o.threshold;
  cfg.threads = o.threads;
  const ConvergenceReport report = convergence_experiment(cfg);
  emit(o, out, [&](std::ostream& os) { os << report.to_json(params_json(o, law, cfg.alpha).dump()) << '\n'; });
  return report.pass ? kExitOk : kExitFailed;
}

int run_extreme(Options o, std::ostream& out) {
  const std::size_t n = o.n == 0 ? 10000 : o.n;
  o.t = or_default(o.t, {1.0});
  ExtremeConfig cfg;
  cfg.masses.assign(n, 1.0 / static_cast<double>(n));
  cfg.theta.theta0 = 1.0;
  cfg.t = o.t;
  cfg.replicas = replicas_or(o, 2000);
  cfg.seed = seed_of(o);
  cfg.grid = o.grid;
  cfg.threshold = o.threshold;
  cfg.threads = o.threads;
  const ConvergenceReport report = extreme_convergence_experiment(cfg);
  const json params{{"n", n}, {"theta0", 1.0}, {"t", cfg.t}, {"replicas", cfg.replicas},
                    {"grid", cfg.grid}, {"seed", cfg.seed}, {"threshold", cfg.threshold}};
  emit(o, out, [&](std::ostream& os) { os << report.to_json(params.dump()) << '\n'; });
  return report.pass ? kExitOk : kExitFailed;
}

}  // namespace

int dispatch(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"caravan: caravan parking and additive coalescent toolkit", "caravan"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    sub->add_option("--out", o.out, "Output file, - for stdout");
    sub->add_option("--format", o.format, "csv or json");
  };
  auto law_opts = [&](CLI::App* sub) {
    sub->add_option("--law", o.law, "Caravan length law, family:params");
    sub->add_option("--eps", o.eps, "Scaling parameter eps");
  };
  auto sampling = [&](CLI::App* sub) {
    sub->add_option("--t", o.t, "Times")->delimiter(',');
    sub->add_option("--replicas", o.replicas, "Monte Carlo replicas");
    sub->add_option("--grid", o.grid, "Grid size for Brownian components");
    sub->add_option("--delta", o.delta, "Atom truncation threshold (0 = default)");
  };

  CLI::App* park = app.add_subcommand("park", "Park one caravan instance and export its trajectory");
  law_opts(park);
  common(park);

  CLI::App* limit = app.add_subcommand("limit", "Fragments of the limiting bridge");
  law_opts(limit);
  sampling(limit);
  common(limit);

  CLI::App* verify = app.add_subcommand("verify", "Run a seeded differential suite");
  verify->add_option("--suite", o.suite, "lamb, profile, discrete or fragmentation");
  verify->add_option("--instances", o.instances, "Number of cases");
  common(verify);

  CLI::App* discrete = app.add_subcommand("discrete", "Parking on Z/nZ and its continuous embedding");
  discrete->add_option("--n", o.n, "Lot size");
  law_opts(discrete);
  common(discrete);

  CLI::App* laplace = app.add_subcommand("laplace", "Laplace transform of the stable sampler");
  laplace->add_option("--alpha", o.alpha, "Stable index");
  laplace->add_option("--lambda", o.lambda, "Laplace arguments")->delimiter(',');
  laplace->add_option("--replicas", o.replicas, "Draws");
  common(laplace);

  CLI::App* weibull = app.add_subcommand("weibull", "Weibull identity for Poisson atom products");
  weibull->add_option("--alpha", o.alpha, "Index");
  weibull->add_option("--r", o.r, "Radii")->delimiter(',');
  weibull->add_option("--replicas", o.replicas, "Atom draws");
  weibull->add_option("--delta", o.delta, "Atom threshold");
  common(weibull);

  CLI::App* moment = app.add_subcommand("moment", "Size-biased fragment moment: Monte Carlo vs quadrature");
  moment->add_option("--alpha", o.alpha, "Index");
  moment->add_option("--t", o.t, "Times")->delimiter(',');
  moment->add_option("--replicas", o.replicas, "Replicas");
  moment->add_option("--delta", o.delta, "Atom threshold");
  common(moment);

  CLI::App* converge = app.add_subcommand("converge", "Caravan marginals against the limit fragmentation");
  law_opts(converge);
  converge->add_option("--alpha", o.alpha, "Index (defaults to the law's)");
  converge->add_option("--threshold", o.threshold, "KS acceptance threshold");
  sampling(converge);
  common(converge);

  CLI::App* extreme = app.add_subcommand("extreme", "Equal-mass parking against the Brownian extreme bridge");
  extreme->add_option("--n", o.n, "Number of equal masses");
  extreme->add_option("--threshold", o.threshold, "KS acceptance threshold");
  sampling(extreme);
  common(extreme);

  try {
    std::vector<std::string> args = merge_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*park) return run_park(o, out);
    if (*limit) return run_limit(o, out);
    if (*verify) return run_verify(o, out);
    if (*discrete) return run_discrete(o, out);
    if (*laplace) return run_laplace(o, out);
    if (*weibull) return run_weibull(o, out);
    if (*moment) return run_moment(o, out);
    if (*converge) return run_converge(o, out);
    if (*extreme) return run_extreme(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitUsage;
}

}  // namespace caravan::cli
