// osgood_lab: command-line front end for the Osgood-family toolkit.
//
//   osgood_lab <family|ode|semigroup|picard|certify|regimes> [options]
//
// Options may also come from a flat key=value file (--config); command-line
// flags win over file keys, which win over defaults. Output is CSV on stdout,
// to --out, or to $OSGOOD_OUT_DIR/<subcommand>.csv.
//
// Exit codes: 0 ok, 2 precondition, 3 numeric failure, 4 regime error, 64 usage.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "osgood/certificates.hpp"
#include "osgood/csv.hpp"
#include "osgood/errors.hpp"
#include "osgood/heat_semigroup.hpp"
#include "osgood/ode_osgood.hpp"
#include "osgood/osgood_family.hpp"
#include "osgood/picard.hpp"

namespace {

using namespace osgood;
using csv::fmt;

constexpr int kExitOk = 0;
constexpr int kExitPrecondition = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitRegime = 4;
constexpr int kExitUsage = 64;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Params {
  // family / ode / certify
  std::string mode = "power";
  double k = 4.0;
  double phi0 = 3.0;
  std::size_t sum_blocks = 50;
  std::size_t samples = 200;
  double s_min = 1e-2;
  double s_max = 1e12;
  double v0 = 3.0;
  double horizon = 1.0;
  double rtol = 1e-10;
  std::size_t targets = 4;

  // data and geometry
  int n = 1;
  double q = 1.0;
  double alpha = 0.875;
  double beta = 0.45;
  double R = 2.0;
  double rho = 2.0;
  double t = 0.5;
  double tau = 0.5;
  double T = 0.1;
  double tol = 1e-10;
  double r_max = 4.0;
  std::size_t points = 81;
  double t_floor = 1e-6;

  // picard
  std::string nonlinearity = "osgood";
  int m_max = 20;
  int levels = 3;
  double conv_tol = 1e-4;
  double t_probe = 0.0;
  double factor = 10.0;

  // certify / regimes
  std::size_t i_max = 40;
  double k_min = 1.5;
  double k_max = 4.5;
  double k_step = 0.5;

  std::uint64_t seed = 1;
  bool plot_data = false;
  std::string out;
};

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

// Flat key=value file; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    kv.emplace_back(normalize_key(trim(line.substr(0, eq))), trim(line.substr(eq + 1)));
  }
  return kv;
}

class Output {
 public:
  Output(const Params& p, const std::string& subcommand) {
    std::string path = p.out;
    if (path.empty()) {
      if (const char* dir = std::getenv("OSGOOD_OUT_DIR"); dir && *dir) {
        std::filesystem::create_directories(dir);
        path = (std::filesystem::path(dir) / (subcommand + ".csv")).string();
      }
    }
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw UsageError("cannot write output file '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_ = &std::cout;
};

OsgoodFamily family_from(const Params& p) {
  return OsgoodFamily::build(growth_mode_from_string(p.mode), p.k, p.phi0);
}

SingularData data_from(const Params& p) {
  SingularData d;
  d.n = p.n;
  d.alpha = p.alpha;
  d.R = p.R;
  d.validate();
  return d;
}

int cmd_family(const Params& p) {
  const OsgoodFamily fam = family_from(p);
  if (p.sum_blocks < 1) throw DomainError("--sum-blocks must be at least 1");
  if (!(p.s_min > 0.0 && p.s_max > p.s_min)) throw DomainError("need 0 < s-min < s-max");
  if (std::log(p.s_max) > kSaturationLogS) throw DomainError("s-max exceeds the plain-value range");

  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> u(std::log(p.s_min), std::log(p.s_max));
  std::vector<double> s(p.samples);
  for (double& x : s) x = std::exp(u(rng));
  std::sort(s.begin(), s.end());

  Output out(p, "family");
  csv::Writer w(out.stream());
  if (p.plot_data) {
    w.begin("plot_data");
    for (double x : s) {
      w.row({fmt(x), fmt(eval_f(fam, x).value), "f"});
      w.row({fmt(x), fmt(eval_f_tilde(fam, x).value), "f_tilde"});
    }
    double sum = 0.0;
    for (std::size_t i = 1; i <= p.sum_blocks; ++i) {
      sum += osgood_block_term(fam, i);
      w.row({std::to_string(i), fmt(sum), "partial_sum"});
    }
    return kExitOk;
  }
  w.begin("family_samples");
  for (double x : s) {
    const PiecewiseValue f = eval_f(fam, x);
    const PiecewiseValue ft = eval_f_tilde(fam, x);
    w.row({fmt(x), fmt(f.value), fmt(ft.value), to_string(f.block)});
  }
  w.begin("family_sums");
  double sum = 0.0;
  for (std::size_t i = 1; i <= p.sum_blocks; ++i) {
    const double term = osgood_block_term(fam, i);
    sum += term;
    w.row({std::to_string(i), fmt(term), fmt(sum), std::to_string(fam.height(i))});
  }
  return kExitOk;
}

int cmd_ode(const Params& p) {
  const OsgoodFamily fam = family_from(p);
  const OdeTrajectory traj = solve_ode_closed_form(fam, p.v0, p.horizon);
  Output out(p, "ode");
  csv::Writer w(out.stream());
  if (p.plot_data) {
    w.begin("plot_data");
    for (const Breakpoint& b : traj.breakpoints) w.row({fmt(b.time), fmt(b.level), "closed_form"});
    w.row({fmt(traj.final_time), fmt(traj.final_level), "closed_form"});
    return kExitOk;
  }
  w.begin("ode_trajectory");
  for (const Breakpoint& b : traj.breakpoints) w.row({fmt(b.time), fmt(b.level), to_string(b.block)});
  w.row({fmt(traj.final_time), fmt(traj.final_level), to_string(locate_block(fam, std::log(traj.final_level)))});
  w.begin("ode_times");
  for (std::size_t i = 1; i <= p.targets; ++i) {
    if (fam.saturated(i)) break;
    const double log_target = log_half_phi(fam, i);
    if (log_target > kSaturationLogS || !(std::exp(log_target) >= p.v0)) continue;
    const double target = std::exp(log_target);
    const double closed = time_to_reach(fam, p.v0, target);
    const double numeric = numeric_time_to_reach(fam, p.v0, target, p.rtol);
    w.row({fmt(target), fmt(closed), fmt(numeric), fmt(std::abs(numeric - closed) / closed)});
  }
  return kExitOk;
}

int cmd_semigroup(const Params& p) {
  const SingularData data = data_from(p);
  if (p.points < 2) throw DomainError("--points must be at least 2");
  const SemigroupConstants c = semigroup_constants(p.n);
  const MEstimate m = compute_M_detailed(data, p.t_floor);
  std::vector<double> r(p.points);
  for (std::size_t i = 0; i < p.points; ++i) r[i] = p.r_max * static_cast<double>(i) / (p.points - 1.0);
  const RadialProfile prof = sample_w(data, r, p.t, p.tol);

  Output out(p, "semigroup");
  csv::Writer w(out.stream());
  if (p.plot_data) {
    w.begin("plot_data");
    for (std::size_t i = 0; i < prof.size(); ++i) w.row({fmt(prof.nodes[i]), fmt(prof.values[i]), "w"});
    return kExitOk;
  }
  w.begin("semigroup_profile");
  for (std::size_t i = 0; i < prof.size(); ++i) w.row({fmt(prof.nodes[i]), fmt(prof.values[i]), fmt(p.t)});
  w.begin("semigroup_constants");
  w.row({std::to_string(c.n), fmt(c.omega_n), c.kernel_tag, fmt(m.M), fmt(m.t_argmin)});
  w.begin("scaling_check");
  for (double t : {1e-3, 1e-2, 0.1, 0.5, 1.0}) {
    const ScalingCheck s = scaling_inequality_check(data, p.beta, t, p.tol);
    w.row({fmt(t), fmt(p.beta), fmt(s.left), fmt(s.right), fmt(s.margin), s.holds ? "1" : "0"});
  }
  return kExitOk;
}

int cmd_picard(const Params& p) {
  PicardConfig base;
  base.data = data_from(p);
  base.T = p.T;
  base.tau = p.tau;
  base.rho = p.rho;
  base.m_max = p.m_max;
  base.conv_tol = p.conv_tol;
  const double t_probe = p.t_probe > 0.0 ? p.t_probe : p.T;
  base.probe_times = {t_probe};
  if (p.nonlinearity == "osgood") {
    base.f = Nonlinearity::osgood(family_from(p));
  } else if (p.nonlinearity == "log-comparison") {
    base.f = Nonlinearity::log_comparison();
  } else if (p.nonlinearity == "zero") {
    base.f = Nonlinearity::zero();
  } else {
    throw UsageError("unknown nonlinearity '" + p.nonlinearity + "' (osgood|log-comparison|zero)");
  }
  if (p.levels < 1) throw DomainError("--levels must be at least 1");

  std::vector<PicardRun> runs;
  for (int level = 0; level < p.levels; ++level) runs.push_back(run_picard(refine(base, level)));
  const BlowupVerdict v = detect_blowup(runs, p.rho, t_probe, p.factor);

  Output out(p, "picard");
  csv::Writer w(out.stream());
  if (p.plot_data) {
    w.begin("plot_data");
    for (std::size_t L = 0; L < v.evidence.size(); ++L) {
      for (std::size_t m = 0; m < v.evidence[L].size(); ++m) {
        w.row({std::to_string(m), fmt(v.evidence[L][m]), "level" + std::to_string(L)});
      }
    }
    return kExitOk;
  }
  w.begin("picard_runs");
  for (std::size_t L = 0; L < v.evidence.size(); ++L) {
    for (std::size_t m = 0; m < v.evidence[L].size(); ++m) {
      w.row({std::to_string(L), std::to_string(m), fmt(t_probe), fmt(p.rho), fmt(v.evidence[L][m]),
             runs[L].saturated[m] ? "1" : "0"});
    }
  }
  w.begin("picard_verdict");
  w.row({to_string(v.verdict), fmt(p.rho), fmt(t_probe), fmt(p.factor),
         fmt(v.growth_factors.empty() ? 1.0 : v.growth_factors.back()), v.reason});
  return kExitOk;
}

int cmd_certify(const Params& p) {
  const OsgoodFamily fam = family_from(p);
  const CertificateReport rep = certify_nonexistence(fam, p.n, p.q, p.t, p.rho, p.i_max, p.tau, p.R);
  Output out(p, "certify");
  csv::Writer w(out.stream());
  if (p.plot_data) {
    w.begin("plot_data");
    for (const Certificate& c : rep.certificates) w.row({fmt(c.log_phi_i), fmt(c.log_lower_bound), "certificate"});
    return kExitOk;
  }
  w.begin("certificates");
  for (const Certificate& c : rep.certificates) {
    w.row({std::to_string(c.index), fmt(c.log_phi_i), fmt(c.log_t_i), fmt(c.log_lower_bound),
           c.admissible ? "1" : "0", std::to_string(c.height)});
  }
  w.begin("certificate_summary");
  w.row({to_string(rep.regime.verdict), rep.regime.binding, fmt(rep.exponents.alpha),
         fmt(rep.exponents.beta), fmt(rep.M),
         rep.first_admissible ? std::to_string(*rep.first_admissible) : "none"});
  return kExitOk;
}

int cmd_regimes(const Params& p) {
  if (!(p.k_step > 0.0 && p.k_max >= p.k_min)) throw DomainError("need k-step > 0 and k-max >= k-min");
  const auto count = static_cast<std::size_t>(std::floor((p.k_max - p.k_min) / p.k_step + 1e-9)) + 1;
  Output out(p, "regimes");
  csv::Writer w(out.stream());
  w.begin(p.plot_data ? "plot_data" : "regimes");
  for (std::size_t i = 0; i < count; ++i) {
    const double k = p.k_min + p.k_step * static_cast<double>(i);
    const RegimeVerdict v = classify_regime(p.n, p.q, k);
    if (p.plot_data) {
      w.row({fmt(k), std::to_string(static_cast<int>(v.verdict)),
             "n=" + std::to_string(p.n) + ",q=" + fmt(p.q)});
    } else {
      w.row({std::to_string(p.n), fmt(p.q), fmt(k), to_string(v.verdict)});
    }
  }
  return kExitOk;
}

int exit_code_for(const osgood::Error& e) {
  switch (e.error_class()) {
    case ErrorClass::Precondition: return kExitPrecondition;
    case ErrorClass::Numeric: return kExitNumeric;
    case ErrorClass::Regime: return kExitRegime;
  }
  return kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  Params p;
  CLI::App app{"Osgood-family blow-up laboratory"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat key=value config file");
    sub->add_option("--out", p.out, "output CSV path");
    sub->add_flag("--plot-data", p.plot_data, "emit (x, y, series) triples");
    sub->add_option("--seed", p.seed, "seed for sampled quantities");
  };
  auto family_opts = [&](CLI::App* sub) {
    sub->add_option("--mode", p.mode, "power|exponential");
    sub->add_option("--k", p.k, "power exponent");
    sub->add_option("--phi0", p.phi0, "first threshold");
  };
  auto data_opts = [&](CLI::App* sub) {
    sub->add_option("--n", p.n, "dimension (1, 2, 3)");
    sub->add_option("--alpha", p.alpha, "singularity exponent");
    sub->add_option("--R", p.R, "cutoff radius");
  };

  CLI::App* fam = app.add_subcommand("family", "sample f, f_tilde and Osgood partial sums");
  common(fam);
  family_opts(fam);
  fam->add_option("--sum-blocks", p.sum_blocks, "number of block terms");
  fam->add_option("--samples", p.samples, "number of log-uniform samples");
  fam->add_option("--s-min", p.s_min);
  fam->add_option("--s-max", p.s_max);

  CLI::App* ode = app.add_subcommand("ode", "closed-form and numeric solutions of v' = f(v)");
  common(ode);
  family_opts(ode);
  ode->add_option("--v0", p.v0);
  ode->add_option("--horizon,--T", p.horizon);
  ode->add_option("--rtol", p.rtol);
  ode->add_option("--targets", p.targets, "compare reach times of phi_n/2 for n <= targets");

  CLI::App* sg = app.add_subcommand("semigroup", "heat evolution of the singular data");
  common(sg);
  data_opts(sg);
  sg->add_option("--t", p.t);
  sg->add_option("--beta", p.beta);
  sg->add_option("--tol", p.tol);
  sg->add_option("--r-max", p.r_max);
  sg->add_option("--points", p.points);
  sg->add_option("--t-floor", p.t_floor);

  CLI::App* pic = app.add_subcommand("picard", "Picard iteration across refinement levels");
  common(pic);
  family_opts(pic);
  data_opts(pic);
  pic->add_option("--q", p.q);
  pic->add_option("--beta", p.beta);
  pic->add_option("--nonlinearity", p.nonlinearity, "osgood|log-comparison|zero");
  pic->add_option("--T", p.T);
  pic->add_option("--tau", p.tau);
  pic->add_option("--rho", p.rho);
  pic->add_option("--t-probe", p.t_probe);
  pic->add_option("--m-max", p.m_max);
  pic->add_option("--levels", p.levels);
  pic->add_option("--tol", p.conv_tol);
  pic->add_option("--factor", p.factor);

  CLI::App* cert = app.add_subcommand("certify", "lower-bound certificates and regime verdict");
  common(cert);
  family_opts(cert);
  cert->add_option("--n", p.n);
  cert->add_option("--q", p.q);
  cert->add_option("--t", p.t);
  cert->add_option("--rho", p.rho);
  cert->add_option("--tau", p.tau);
  cert->add_option("--R", p.R);
  cert->add_option("--i-max", p.i_max);

  CLI::App* reg = app.add_subcommand("regimes", "sweep the (n, q, k) regime map");
  common(reg);
  reg->add_option("--n", p.n);
  reg->add_option("--q", p.q);
  reg->add_option("--k-min", p.k_min);
  reg->add_option("--k-max", p.k_max);
  reg->add_option("--k-step", p.k_step);

  try {
    // File keys are spliced in ahead of the command-line flags so that the
    // latter take precedence.
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string cfg;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) cfg = args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) cfg = args[i].substr(9);
    }
    if (!cfg.empty() && !args.empty()) {
      CLI::App* sub = nullptr;
      for (CLI::App* s : app.get_subcommands({})) {
        if (s->get_name() == args.front()) sub = s;
      }
      if (!sub) throw UsageError("--config needs a subcommand first");
      std::vector<std::string> spliced{args.front()};
      for (const auto& [key, value] : read_config(cfg)) {
        if (key == "config" || !sub->get_option_no_throw("--" + key)) {
          throw UsageError("unknown config key '" + key + "' for subcommand " + sub->get_name());
        }
        spliced.push_back("--" + key + "=" + value);
      }
      spliced.insert(spliced.end(), args.begin() + 1, args.end());
      args = std::move(spliced);
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);

    if (*fam) return cmd_family(p);
    if (*ode) return cmd_ode(p);
    if (*sg) return cmd_semigroup(p);
    if (*pic) return cmd_picard(p);
    if (*cert) return cmd_certify(p);
    if (*reg) return cmd_regimes(p);
    return kExitUsage;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const osgood::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}
