#include "osgood/ode_osgood.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "osgood/errors.hpp"
#include "osgood/log_math.hpp"

namespace osgood {

using logmath::kLn2;
using logmath::kPosInf;

namespace {

// A level carried both as a logarithm and, when representable, as a plain
// double; differences use the plain values whenever both are finite.
struct Level {
  double log;
  double plain;
};

Level from_plain(double v) { return Level{std::log(v), v}; }
Level from_log(double lv) { return Level{lv, logmath::exp_or_inf(lv)}; }

double j0_exponent(const OsgoodFamily& fam) {
  return fam.mode() == GrowthMode::Power ? fam.k() : fam.phi0() / std::log(fam.phi0());
}

double j0_coefficient(const OsgoodFamily& fam) {
  return -std::expm1((1.0 - j0_exponent(fam)) * fam.log_phi(0));
}

Level lower_end(const OsgoodFamily& fam, Block b) {
  switch (b.kind) {
    case Block::Kind::J0: return Level{logmath::kNegInf, 0.0};
    case Block::Kind::I: return Level{fam.log_phi(b.index - 1), fam.phi(b.index - 1)};
    case Block::Kind::J: return Level{fam.log_phi(b.index) - kLn2, 0.5 * fam.phi(b.index)};
  }
  return {};
}

Level upper_end(const OsgoodFamily& fam, Block b) {
  switch (b.kind) {
    case Block::Kind::J0: return Level{fam.log_phi(0), fam.phi0()};
    case Block::Kind::I: return Level{fam.log_phi(b.index) - kLn2, 0.5 * fam.phi(b.index)};
    case Block::Kind::J: return Level{fam.log_phi(b.index), fam.phi(b.index)};
  }
  return {};
}

Block next_block(Block b) {
  switch (b.kind) {
    case Block::Kind::J0: return Block{Block::Kind::I, 1};
    case Block::Kind::I: return Block{Block::Kind::J, b.index};
    case Block::Kind::J: return Block{Block::Kind::I, b.index + 1};
  }
  return b;
}

void require_materialized(const OsgoodFamily& fam, Block b) {
  const std::size_t needed = b.kind == Block::Kind::J ? b.index + 1 : b.index;
  if (fam.saturated(needed)) {
    throw SaturationOverflow("block " + to_string(b) +
                             " lies beyond the materialized threshold sequence");
  }
}

// log(hi - lo) for lo <= hi.
double log_gap(Level lo, Level hi) {
  if (std::isfinite(lo.plain) && std::isfinite(hi.plain)) return std::log(hi.plain - lo.plain);
  return logmath::log_sub_exp(hi.log, lo.log);
}

// log(hi / lo) for 0 < lo <= hi.
double log_ratio(Level lo, Level hi) {
  if (std::isfinite(lo.plain) && std::isfinite(hi.plain) && lo.plain > 0.0) {
    return std::log1p((hi.plain - lo.plain) / lo.plain);
  }
  return hi.log - lo.log;
}

// Time for v' = f(v) to climb from lo to hi inside block b.
double segment_time(const OsgoodFamily& fam, Block b, Level lo, Level hi) {
  if (!(hi.log > lo.log)) return 0.0;
  switch (b.kind) {
    case Block::Kind::J0: {
      const double p = j0_exponent(fam);
      const double c = j0_coefficient(fam);
      // (lo^(1-p) - hi^(1-p)) / (c (p - 1))
      const double head = std::exp((1.0 - p) * lo.log);
      return head * -std::expm1((1.0 - p) * log_ratio(lo, hi)) / (c * (p - 1.0));
    }
    case Block::Kind::I: {
      const double la = log_plateau(fam, b.index);
      return std::exp(log_gap(lo, hi) - la);
    }
    case Block::Kind::J: {
      const std::size_t i = b.index;
      const double la = log_plateau(fam, i);
      const double lb = log_plateau(fam, i + 1);
      const double log_width = fam.log_phi(i) - kLn2;
      const double log_rise = logmath::log_sub_exp(lb, la);  // log(b - a)
      const Level start = lower_end(fam, b);
      // l(lo) by interpolation at lambda = (lo - phi_i/2) / (phi_i/2).
      double log_l_lo;
      if (!(lo.log > start.log)) {
        log_l_lo = la;
      } else {
        const double log_lambda = log_gap(start, lo) - log_width;
        const double log_one_minus = log_gap(lo, upper_end(fam, b)) - log_width;
        log_l_lo = logmath::log_add_exp(log_one_minus + la, log_lambda + lb);
      }
      if (log_rise - la < std::log(1e-14)) {
        // Negligible slope: constant-rate formula.
        return std::exp(log_gap(lo, hi) - log_l_lo);
      }
      // (1/m) log1p(m (hi - lo) / l(lo)), m = (b - a) / (phi_i / 2)
      const double log_m = log_rise - log_width;
      const double log_x = log_m + log_gap(lo, hi) - log_l_lo;
      const double log1p_x =
          log_x > 36.0 ? log_x + std::log1p(std::exp(-log_x)) : std::log1p(std::exp(log_x));
      return log1p_x * std::exp(-log_m);
    }
  }
  return 0.0;
}

double time_between(const OsgoodFamily& fam, Level from, Level to) {
  if (!(from.plain > 0.0) && !(from.log > logmath::kNegInf)) {
    throw DomainError("start level must be positive");
  }
  if (to.log < from.log) throw DomainError("target level lies below the start level");
  Block b = locate_block(fam, from.log);
  Level cur = from;
  double total = 0.0;
  for (;;) {
    require_materialized(fam, b);
    const Level top = upper_end(fam, b);
    if (to.log <= top.log) {
      total += segment_time(fam, b, cur, to);
      return total;
    }
    total += segment_time(fam, b, cur, top);
    cur = top;
    b = next_block(b);
  }
}

// Right-hand side of the piece owning block b, extended smoothly past its ends.
struct PieceRhs {
  BlockFormula formula;
  double coef = 0.0;   // c (J0), a (I, J)
  double power = 0.0;  // p (J0)
  double slope = 0.0;  // m (J)
  double anchor = 0.0; // phi_i / 2 (J)

  double operator()(double v) const {
    switch (formula) {
      case BlockFormula::PowerBlock: return coef * std::pow(v, power);
      case BlockFormula::ConstantBlock: return coef;
      case BlockFormula::AffineBlock: return coef + slope * (v - anchor);
    }
    return 0.0;
  }
};

PieceRhs piece_for(const OsgoodFamily& fam, Block b) {
  PieceRhs rhs;
  switch (b.kind) {
    case Block::Kind::J0:
      rhs.formula = BlockFormula::PowerBlock;
      rhs.coef = j0_coefficient(fam);
      rhs.power = j0_exponent(fam);
      break;
    case Block::Kind::I:
      rhs.formula = BlockFormula::ConstantBlock;
      rhs.coef = fam.phi(b.index) - fam.phi(b.index - 1);
      break;
    case Block::Kind::J: {
      rhs.formula = BlockFormula::AffineBlock;
      const double a = fam.phi(b.index) - fam.phi(b.index - 1);
      const double bb = fam.phi(b.index + 1) - fam.phi(b.index);
      rhs.coef = a;
      rhs.anchor = 0.5 * fam.phi(b.index);
      rhs.slope = (bb - a) / rhs.anchor;
      break;
    }
  }
  if (!std::isfinite(rhs.coef) || !std::isfinite(rhs.slope)) {
    throw SaturationOverflow("block " + to_string(b) + " is outside the plain-value range");
  }
  return rhs;
}

// Dormand-Prince 5(4) tableau.
struct DpStep {
  double v5;
  double err;  // v5 - v4
};

DpStep dp_step(const PieceRhs& f, double v, double h) {
  const double k1 = f(v);
  const double k2 = f(v + h * (1.0 / 5.0) * k1);
  const double k3 = f(v + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
  const double k4 = f(v + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
  const double k5 = f(v + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                               64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
  const double k6 = f(v + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 + 46732.0 / 5247.0 * k3 +
                               49.0 / 176.0 * k4 - 5103.0 / 18656.0 * k5));
  const double v5 = v + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 -
                             2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
  const double k7 = f(v5);
  const double err = h * (71.0 / 57600.0 * k1 - 71.0 / 16695.0 * k3 + 71.0 / 1920.0 * k4 -
                          17253.0 / 339200.0 * k5 + 22.0 / 525.0 * k6 - 1.0 / 40.0 * k7);
  return DpStep{v5, err};
}

// Step length h* in (0, h] with dp_step(v, h*).v5 == target, by safeguarded
// secant iteration on the (monotone) step map.
double locate_event(const PieceRhs& f, double v, double h, double target) {
  double lo = 0.0;
  double hi = h;
  double g_lo = v - target;
  double g_hi = dp_step(f, v, h).v5 - target;
  double x = hi;
  for (int it = 0; it < 200; ++it) {
    x = lo - g_lo * (hi - lo) / (g_hi - g_lo);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    const double g = dp_step(f, v, x).v5 - target;
    if (std::abs(g) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(target) ||
        hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      return x;
    }
    if (g < 0.0) {
      lo = x;
      g_lo = g;
    } else {
      hi = x;
      g_hi = g;
    }
  }
  return x;
}

OdeTrajectory integrate(const OsgoodFamily& fam, double v0, double horizon, double target,
                        double rtol) {
  if (!(v0 > 0.0) || !std::isfinite(v0)) throw DomainError("v0 must be a positive finite number");
  if (!(rtol > 1e-12 && rtol < 1e-2)) throw DomainError("rtol must lie in (1e-12, 1e-2)");
  OdeTrajectory traj;
  traj.v0 = v0;
  Block b = locate_block(fam, std::log(v0));
  traj.breakpoints.push_back(Breakpoint{0.0, v0, b});

  double t = 0.0;
  double v = v0;
  double h = 0.0;
  for (;;) {
    require_materialized(fam, b);
    const PieceRhs rhs = piece_for(fam, b);
    const double block_top = upper_end(fam, b).plain;
    const double stop = std::min(block_top, target);
    if (!std::isfinite(stop)) throw SaturationOverflow("trajectory leaves the plain-value range");
    if (h <= 0.0) h = 0.01 * v / rhs(v);

    bool reached = v >= stop;
    while (!reached) {
      if (t >= horizon) break;
      h = std::min(h, horizon - t);
      const DpStep step = dp_step(rhs, v, h);
      const double scale = rtol * std::max(std::abs(v), std::abs(step.v5));
      const double err = std::abs(step.err) / scale;
      if (!(err <= 1.0) || !std::isfinite(step.v5)) {
        ++traj.rejected_steps;
        const double factor = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
        h *= factor;
        if (h <= 1e-15 * std::max(1.0, t)) {
          throw StepUnderflow("step size underflow at t = " + std::to_string(t));
        }
        continue;
      }
      ++traj.accepted_steps;
      if (step.v5 >= stop) {
        const double hstar = locate_event(rhs, v, h, stop);
        t += hstar;
        v = stop;
        reached = true;
      } else {
        t += h;
        v = step.v5;
      }
      h *= err > 0.0 ? std::min(5.0, 0.9 * std::pow(err, -0.2)) : 5.0;
    }
    if (!reached) break;  // horizon hit inside the block
    if (v >= target) break;
    b = next_block(b);
    traj.breakpoints.push_back(Breakpoint{t, v, b});
  }
  traj.final_time = t;
  traj.final_level = v;
  return traj;
}

}  // namespace

std::string to_string(BlockFormula formula) {
  switch (formula) {
    case BlockFormula::PowerBlock: return "power";
    case BlockFormula::ConstantBlock: return "constant";
    case BlockFormula::AffineBlock: return "affine";
  }
  return "?";
}

double block_traversal_time_log(const OsgoodFamily& fam, Block block, double log_entry) {
  require_materialized(fam, block);
  const Level lo = lower_end(fam, block);
  const Level hi = upper_end(fam, block);
  if (log_entry < lo.log || log_entry > hi.log) {
    throw DomainError("entry level lies outside block " + to_string(block));
  }
  return segment_time(fam, block, from_log(log_entry), hi);
}

double block_traversal_time(const OsgoodFamily& fam, Block block, double entry) {
  require_materialized(fam, block);
  const Level lo = lower_end(fam, block);
  const Level hi = upper_end(fam, block);
  const bool inside = std::isfinite(hi.plain) ? (entry >= lo.plain && entry <= hi.plain)
                                              : (entry >= lo.plain);
  if (!(entry > 0.0) || !inside) {
    throw DomainError("entry level lies outside block " + to_string(block));
  }
  return segment_time(fam, block, from_plain(entry), hi);
}

double time_to_reach(const OsgoodFamily& fam, double v0, double level) {
  if (!(v0 > 0.0)) throw DomainError("v0 must be positive");
  if (level > 0.0 && std::log(level) > kSaturationLogS) {
    throw SaturationOverflow("level exceeds the plain-value range; use time_to_reach_log");
  }
  return time_between(fam, from_plain(v0), from_plain(level));
}

double time_to_reach_log(const OsgoodFamily& fam, double log_v0, double log_level) {
  if (std::isnan(log_v0) || std::isnan(log_level) || std::isinf(log_v0)) {
    throw DomainError("log levels must be finite");
  }
  return time_between(fam, from_log(log_v0), from_log(log_level));
}

double log_half_phi(const OsgoodFamily& fam, std::size_t n) {
  if (fam.saturated(n)) throw SaturationOverflow("phi_n is beyond the materialized range");
  return fam.log_phi(n) - kLn2;
}

OdeTrajectory solve_ode_closed_form(const OsgoodFamily& fam, double v0, double horizon) {
  if (!(v0 > 0.0) || !std::isfinite(v0)) throw DomainError("v0 must be a positive finite number");
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  OdeTrajectory traj;
  traj.v0 = v0;
  Block b = locate_block(fam, std::log(v0));
  traj.breakpoints.push_back(Breakpoint{0.0, v0, b});
  double t = 0.0;
  Level cur = from_plain(v0);
  for (;;) {
    require_materialized(fam, b);
    const Level top = upper_end(fam, b);
    const double dt = segment_time(fam, b, cur, top);
    if (t + dt > horizon) {
      const double tau = horizon - t;
      const PieceRhs rhs = piece_for(fam, b);
      const double e = cur.plain;
      double v = e;
      switch (rhs.formula) {
        case BlockFormula::PowerBlock: {
          const double p = rhs.power;
          v = std::pow(std::pow(e, 1.0 - p) - rhs.coef * (p - 1.0) * tau, 1.0 / (1.0 - p));
          break;
        }
        case BlockFormula::ConstantBlock: v = e + rhs.coef * tau; break;
        case BlockFormula::AffineBlock: {
          const double le = rhs(e);
          v = e + le * std::expm1(rhs.slope * tau) / rhs.slope;
          break;
        }
      }
      traj.final_time = horizon;
      traj.final_level = v;
      return traj;
    }
    t += dt;
    cur = top;
    if (!std::isfinite(cur.plain)) throw SaturationOverflow("trajectory leaves the plain range");
    b = next_block(b);
    traj.breakpoints.push_back(Breakpoint{t, cur.plain, b});
  }
}

OdeTrajectory solve_ode_numeric(const OsgoodFamily& fam, double v0, double horizon, double rtol) {
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  return integrate(fam, v0, horizon, kPosInf, rtol);
}

double numeric_time_to_reach(const OsgoodFamily& fam, double v0, double level, double rtol) {
  if (!(level >= v0)) throw DomainError("target level lies below v0");
  return integrate(fam, v0, kPosInf, level, rtol).final_time;
}

}  // namespace osgood
