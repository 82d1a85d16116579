#include "osgood/picard.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "osgood/errors.hpp"

namespace osgood {

std::string to_string(NonlinearityKind kind) {
  switch (kind) {
    case NonlinearityKind::Osgood: return "osgood";
    case NonlinearityKind::LogComparison: return "log-comparison";
    case NonlinearityKind::Zero: return "zero";
  }
  return "?";
}

Nonlinearity Nonlinearity::osgood(const OsgoodFamily& family) {
  Nonlinearity f;
  f.kind_ = NonlinearityKind::Osgood;
  f.family_ = family;
  return f;
}

Nonlinearity Nonlinearity::log_comparison() {
  Nonlinearity f;
  f.kind_ = NonlinearityKind::LogComparison;
  return f;
}

Nonlinearity Nonlinearity::zero() { return Nonlinearity{}; }

double Nonlinearity::operator()(double u) const {
  switch (kind_) {
    case NonlinearityKind::Osgood: return eval_f(*family_, u).value;
    case NonlinearityKind::LogComparison: return (u + 1.0) * std::log1p(u);
    case NonlinearityKind::Zero: return 0.0;
  }
  return 0.0;
}

void PicardConfig::validate() const {
  data.validate();
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("tau must lie in (0, 1)");
  if (!(T > 0.0 && T <= tau)) throw DomainError("T must lie in (0, tau]");
  if (m_max < 1) throw DomainError("m_max must be at least 1");
  if (!(rho > 0.0)) throw DomainError("rho must be positive");
  if (!(conv_tol > 0.0)) throw DomainError("conv_tol must be positive");
  if (!(quad_tol >= 1e-12 && quad_tol <= 1e-4)) throw DomainError("quad_tol must lie in [1e-12, 1e-4]");
  if (!(value_cap > 1.0)) throw DomainError("value_cap must exceed 1");
  if (!(t_min > 0.0 && t_min < T)) throw DomainError("t_min must lie in (0, T)");
  if (!(t_per_decade > 0.0 && r_per_decade > 0.0)) throw DomainError("grid densities must be positive");
  for (double t : probe_times) {
    if (!(t > 0.0 && t <= T)) throw DomainError("probe times must lie in (0, T]");
  }
  if (level < 0) throw DomainError("level must be nonnegative");
}

PicardConfig refine(const PicardConfig& base, int level) {
  if (level < 0) throw DomainError("level must be nonnegative");
  PicardConfig c = base;
  const double scale = std::ldexp(1.0, level);
  c.level = base.level + level;
  c.t_per_decade = base.t_per_decade * scale;
  c.r_per_decade = base.r_per_decade * scale;
  c.spacing = base.spacing / scale;
  c.t_min = base.t_min * std::pow(10.0, -base.t_decades_per_level * level);
  c.r_min = base.r_min * std::pow(10.0, -base.r_decades_per_level * level);
  return c;
}

std::vector<double> make_time_grid(const PicardConfig& c) {
  std::vector<double> t{0.0};
  const double ratio = std::pow(10.0, 1.0 / c.t_per_decade);
  for (double s = c.t_min; s < c.T; s *= ratio) t.push_back(s);
  t.push_back(c.T);
  for (double p : c.probe_times) t.push_back(p);
  std::sort(t.begin(), t.end());
  std::vector<double> out{t.front()};
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double s = t[i];
    if (s - out.back() <= 1e-9 * s) {
      // Keep the exact probe/horizon value over a nearby geometric node.
      const bool exact = s == c.T || std::find(c.probe_times.begin(), c.probe_times.end(), s) !=
                                         c.probe_times.end();
      if (exact) out.back() = s;
      continue;
    }
    out.push_back(s);
  }
  return out;
}

std::vector<double> make_space_grid(const PicardConfig& c) {
  GridSpec g;
  g.r_min = c.r_min;
  g.per_decade = c.r_per_decade;
  g.r_switch = c.r_switch;
  g.spacing = c.spacing;
  g.r_max = c.r_max > 0.0 ? c.r_max
                          : std::max(2.0 * c.rho, c.data.R + 10.0 * std::sqrt(4.0 * c.T));
  g.required = {c.data.R, c.rho, 1.0};
  return make_radial_grid(g);
}

RadialProfile PicardRun::probe_profile(int m, std::size_t p) const {
  if (m < 0 || m > iterations) throw IndexError("iterate index out of range");
  if (p >= probe_index.size()) throw IndexError("probe index out of range");
  RadialProfile prof;
  prof.n = config.data.n;
  prof.nodes = space_nodes;
  prof.values = probe_values[static_cast<std::size_t>(m)][p];
  prof.time = time_nodes[probe_index[p]];
  prof.tail_bound = prof.values.back();
  return prof;
}

RadialProfile PicardRun::free_profile(std::size_t j) const {
  if (j >= time_nodes.size()) throw IndexError("time index out of range");
  RadialProfile prof;
  prof.n = config.data.n;
  prof.nodes = space_nodes;
  prof.values = free_evolution[j];
  prof.time = time_nodes[j];
  prof.tail_bound = prof.values.back();
  prof.singular_origin = j == 0;
  return prof;
}

std::size_t PicardRun::probe_slot(double t) const {
  for (std::size_t p = 0; p < config.probe_times.size(); ++p) {
    if (config.probe_times[p] == t) return p;
  }
  throw DomainError("time " + std::to_string(t) + " is not a configured probe time");
}

namespace {

// Operators for one time step [t_j, t_j + dt]: S(dt) and the two Gauss
// points of int_0^dt S(s) ds.
struct StepOperators {
  std::unique_ptr<SemigroupOperator> full;
  std::unique_ptr<SemigroupOperator> g1;
  std::unique_ptr<SemigroupOperator> g2;
  double dt = 0.0;
};

}  // namespace

PicardRun run_picard(const PicardConfig& config) {
  config.validate();
  PicardRun run;
  run.config = config;
  run.time_nodes = make_time_grid(config);
  run.space_nodes = make_space_grid(config);
  const std::size_t K = run.time_nodes.size();
  const std::size_t N = run.space_nodes.size();
  const int n = config.data.n;
  for (double p : config.probe_times) {
    const auto it = std::find(run.time_nodes.begin(), run.time_nodes.end(), p);
    run.probe_index.push_back(static_cast<std::size_t>(it - run.time_nodes.begin()));
  }

  run.free_evolution.resize(K);
  for (std::size_t j = 0; j < K; ++j) {
    run.free_evolution[j] =
        sample_w(config.data, run.space_nodes, run.time_nodes[j], config.quad_tol).values;
  }

  std::vector<StepOperators> ops(K - 1);
  const double gp = 0.5 / std::sqrt(3.0);
  for (std::size_t j = 0; j + 1 < K; ++j) {
    const double dt = run.time_nodes[j + 1] - run.time_nodes[j];
    ops[j].dt = dt;
    ops[j].full = std::make_unique<SemigroupOperator>(n, run.space_nodes, dt);
    ops[j].g1 = std::make_unique<SemigroupOperator>(n, run.space_nodes, dt * (0.5 - gp));
    ops[j].g2 = std::make_unique<SemigroupOperator>(n, run.space_nodes, dt * (0.5 + gp));
  }

  auto snapshot = [&](const std::vector<std::vector<double>>& u) {
    std::vector<std::vector<double>> snap;
    for (std::size_t idx : run.probe_index) snap.push_back(u[idx]);
    run.probe_values.push_back(std::move(snap));
  };

  std::vector<std::vector<double>> u = run.free_evolution;
  snapshot(u);
  run.saturated.push_back(false);

  std::vector<std::vector<double>> next(K, std::vector<double>(N));
  std::vector<double> J(N);
  std::vector<double> g(N);
  std::vector<double> tmp(N);
  std::vector<double> acc(N);
  for (int m = 0; m < config.m_max; ++m) {
    std::fill(J.begin(), J.end(), 0.0);
    bool sat = false;
    auto store = [&](std::size_t j) {
      for (std::size_t i = 0; i < N; ++i) {
        double v = run.free_evolution[j][i] + J[i];
        if (!(v < config.value_cap)) {
          v = config.value_cap;
          sat = true;
        }
        next[j][i] = v;
      }
    };
    store(0);
    for (std::size_t j = 0; j + 1 < K; ++j) {
      // Lower endpoint value of f(u) on the step: min over the two ends.
      for (std::size_t i = 0; i < N; ++i) g[i] = config.f(std::min(u[j][i], u[j + 1][i]));
      ops[j].full->apply_values(J, acc);
      ops[j].g1->apply_values(g, tmp);
      const double half = 0.5 * ops[j].dt;
      for (std::size_t i = 0; i < N; ++i) acc[i] += half * tmp[i];
      ops[j].g2->apply_values(g, tmp);
      for (std::size_t i = 0; i < N; ++i) J[i] = acc[i] + half * tmp[i];
      store(j + 1);
    }

    double diff = 0.0;
    double step = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < K; ++j) {
      for (std::size_t i = 0; i < N; ++i) {
        const double scale = std::max(1.0, next[j][i]);
        diff = std::max(diff, std::abs(next[j][i] - u[j][i]) / scale);
        step = std::min(step, (next[j][i] - u[j][i]) / scale);
      }
    }
    std::swap(u, next);
    snapshot(u);
    run.saturated.push_back(sat);
    run.cap_reached = run.cap_reached || sat;
    run.sup_diff.push_back(diff);
    run.min_step.push_back(step);
    run.iterations = m + 1;
    if (diff < config.conv_tol && !sat) {
      run.converged = true;
      break;
    }
  }
  run.final_iterate = std::move(u);
  return run;
}

double local_l1(const RadialProfile& profile, double rho) {
  if (profile.nodes.size() < 2) throw DomainError("profile needs at least two nodes");
  if (!(rho >= 0.0)) throw DomainError("rho must be nonnegative");
  if (rho > profile.r_max()) throw DomainError("rho exceeds the profile's r_max");
  const int n = profile.n;
  // Two-point Gauss-Legendre is exact for the degree-n integrand, n <= 3.
  const double gp = 0.5 / std::sqrt(3.0);
  auto segment = [&](double a, double b, double va, double vb) {
    double s = 0.0;
    for (double x : {0.5 - gp, 0.5 + gp}) {
      const double r = a + (b - a) * x;
      s += std::pow(r, n - 1) * (va + (vb - va) * x);
    }
    return 0.5 * (b - a) * s;
  };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < profile.nodes.size(); ++k) {
    const double a = profile.nodes[k];
    if (a >= rho) break;
    const double b = profile.nodes[k + 1];
    if (b <= rho) {
      total += segment(a, b, profile.values[k], profile.values[k + 1]);
    } else {
      total += segment(a, rho, profile.values[k], profile(rho));
    }
  }
  return n * unit_ball_volume(n) * total;
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::DivergesLocally: return "DivergesLocally";
    case Verdict::Converged: return "Converged";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

BlowupVerdict detect_blowup(const std::vector<PicardRun>& runs, double rho, double t_probe,
                            double factor_threshold) {
  BlowupVerdict out;
  out.rho = rho;
  out.t_probe = t_probe;
  out.factor_threshold = factor_threshold;
  if (runs.empty()) {
    out.reason = "no runs supplied";
    return out;
  }
  double conv_tol = runs.front().config.conv_tol;
  for (const PicardRun& run : runs) {
    std::size_t slot = 0;
    try {
      slot = run.probe_slot(t_probe);
    } catch (const DomainError&) {
      out.reason = "probe time missing from a run";
      return out;
    }
    std::vector<double> seq;
    for (int m = 0; m <= run.iterations; ++m) seq.push_back(local_l1(run.probe_profile(m, slot), rho));
    bool mono = true;
    for (std::size_t m = 1; m < seq.size(); ++m) {
      if (seq[m] < seq[m - 1] * (1.0 - 1e-12)) mono = false;
    }
    out.evidence.push_back(seq);
    out.monotone.push_back(mono);
    out.converged.push_back(run.converged);
    out.cap_reached = out.cap_reached || run.cap_reached;
  }
  const double base = out.evidence.front().back();
  for (const auto& seq : out.evidence) out.growth_factors.push_back(seq.back() / base);

  const bool all_mono = std::all_of(out.monotone.begin(), out.monotone.end(), [](bool b) { return b; });
  const bool all_conv = std::all_of(out.converged.begin(), out.converged.end(), [](bool b) { return b; });
  const double finest = out.evidence.back().back();
  bool levels_agree = true;
  for (const auto& seq : out.evidence) {
    if (std::abs(seq.back() - finest) > 10.0 * conv_tol * std::abs(finest)) levels_agree = false;
  }

  if (out.cap_reached || (all_mono && out.growth_factors.back() >= factor_threshold)) {
    out.verdict = Verdict::DivergesLocally;
    out.reason = out.cap_reached ? "value cap reached" : "local L1 grows across refinement levels";
  } else if (all_conv && levels_agree) {
    out.verdict = Verdict::Converged;
    out.reason = "iterates converged and levels agree";
  } else {
    out.verdict = Verdict::Inconclusive;
    out.reason = all_conv ? "levels disagree beyond tolerance" : "neither criterion met";
  }
  return out;
}

}  // namespace osgood
