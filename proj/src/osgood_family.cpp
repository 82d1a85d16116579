#include "osgood/osgood_family.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "osgood/errors.hpp"
#include "osgood/log_math.hpp"

namespace osgood {

using logmath::kLn2;
using logmath::kNegInf;
using logmath::kPosInf;

namespace {

constexpr std::size_t kMaxMaterialized = std::size_t{1} << 16;
constexpr double kLogPhiCeiling = 1e300;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Exponent of the J0 power law. Power mode uses k; exponential mode uses
// log(phi_1)/log(phi_0) = phi_0 / log(phi_0), which keeps f continuous at
// phi_0 with the same (1 - phi_0^(1-p)) s^p shape.
double j0_exponent(const OsgoodFamily& fam) {
  if (fam.mode() == GrowthMode::Power) return fam.k();
  return fam.phi0() / std::log(fam.phi0());
}

// log(1 - phi_0^(1-p)).
double log_j0_coefficient(const OsgoodFamily& fam) {
  const double p = j0_exponent(fam);
  return logmath::log1m_exp((1.0 - p) * fam.log_phi(0));
}

double j0_coefficient(const OsgoodFamily& fam) {
  const double p = j0_exponent(fam);
  const double x = std::pow(fam.phi0(), 1.0 - p);
  return x < 0.5 ? 1.0 - x : -std::expm1((1.0 - p) * fam.log_phi(0));
}

void require_nonneg(double s) {
  if (!(s >= 0.0)) throw DomainError("argument must be a nonnegative number, got " + fmt_double(s));
}

void require_unsaturated(double s) {
  if (s > 0.0 && std::log(s) > kSaturationLogS) {
    throw SaturationOverflow("argument " + fmt_double(s) +
                             " exceeds the plain-value range (log s > 700); use the log-domain API");
  }
}

// f on J_i given lambda and 1 - lambda in both plain and log form.
PiecewiseValue affine_value(const OsgoodFamily& fam, std::size_t i, double lambda,
                            double log_lambda, double log_one_minus) {
  PiecewiseValue out;
  out.block = Block{Block::Kind::J, i};
  out.lambda = lambda;
  out.log_left = log_plateau(fam, i);
  out.log_right = log_plateau(fam, i + 1);
  out.log_value = logmath::log_add_exp(log_one_minus + out.log_left, log_lambda + out.log_right);
  const double a = fam.phi(i) - fam.phi(i - 1);
  const double b = fam.phi(i + 1) - fam.phi(i);
  if (std::isfinite(b)) {
    out.value = a + (b - a) * lambda;
    if (out.value > 0.0) out.log_value = std::log(out.value);
  } else {
    out.value = logmath::exp_or_inf(out.log_value);
  }
  return out;
}

PiecewiseValue plateau_value(const OsgoodFamily& fam, std::size_t i) {
  PiecewiseValue out;
  out.block = Block{Block::Kind::I, i};
  out.log_value = log_plateau(fam, i);
  const double v = fam.phi(i) - fam.phi(i - 1);
  out.value = std::isfinite(v) ? v : logmath::exp_or_inf(out.log_value);
  return out;
}

// Index of the f_tilde step containing s: 0 on [0, phi_0], i on (phi_{i-1}, phi_i].
std::size_t step_index_log(const OsgoodFamily& fam, double log_s) {
  if (log_s <= fam.log_phi(0)) return 0;
  std::size_t i = 1;
  while (log_s > fam.log_phi(i)) ++i;
  return i;
}

}  // namespace

std::string to_string(GrowthMode mode) {
  return mode == GrowthMode::Power ? "power" : "exponential";
}

GrowthMode growth_mode_from_string(const std::string& text) {
  if (text == "power") return GrowthMode::Power;
  if (text == "exponential") return GrowthMode::Exponential;
  throw ParameterViolation("unknown growth mode '" + text + "' (expected power|exponential)");
}

std::string to_string(const Block& block) {
  switch (block.kind) {
    case Block::Kind::J0: return "J0";
    case Block::Kind::I: return "I" + std::to_string(block.index);
    case Block::Kind::J: return "J" + std::to_string(block.index);
  }
  return "?";
}

OsgoodFamily OsgoodFamily::build(GrowthMode mode, double k, double phi0) {
  OsgoodFamily fam;
  fam.mode_ = mode;
  fam.phi0_ = phi0;
  if (!std::isfinite(phi0)) throw ParameterViolation("phi0 must be finite");
  if (mode == GrowthMode::Power) {
    if (!(k > 1.0) || !std::isfinite(k)) {
      throw ParameterViolation("power mode requires k > 1, got k = " + fmt_double(k));
    }
    const double bound = std::pow(2.0, 1.0 / (k - 1.0));
    if (!(phi0 > bound)) {
      throw ParameterViolation("power mode requires phi0 > 2^(1/(k-1)) = " + fmt_double(bound) +
                               ", got phi0 = " + fmt_double(phi0));
    }
    fam.k_ = k;
  } else {
    if (!(phi0 > 1.0)) {
      throw ParameterViolation("exponential mode requires phi0 > 1, got phi0 = " +
                               fmt_double(phi0));
    }
    fam.k_ = 0.0;
  }

  fam.log_phi_.push_back(std::log(phi0));
  fam.phi_.push_back(phi0);
  while (fam.log_phi_.size() < kMaxMaterialized) {
    const double prev_log = fam.log_phi_.back();
    const double prev = fam.phi_.back();
    double next_log;
    double next;
    if (mode == GrowthMode::Power) {
      next = std::isfinite(prev) ? std::pow(prev, k) : kPosInf;
      next_log = std::isfinite(next) ? std::log(next) : k * prev_log;
    } else {
      next_log = prev;
      next = logmath::exp_or_inf(next_log);
    }
    if (!std::isfinite(next_log) || next_log > kLogPhiCeiling) break;
    if (!(prev_log < next_log - kLn2)) {
      throw ParameterViolation("sequence gap phi_{i-1} < phi_i / 2 fails numerically at index " +
                               std::to_string(fam.log_phi_.size()));
    }
    fam.log_phi_.push_back(next_log);
    fam.phi_.push_back(next);
  }
  return fam;
}

double OsgoodFamily::log_phi(std::size_t i) const noexcept {
  return i < log_phi_.size() ? log_phi_[i] : kPosInf;
}

double OsgoodFamily::phi(std::size_t i) const noexcept {
  return i < phi_.size() ? phi_[i] : kPosInf;
}

std::size_t OsgoodFamily::height(std::size_t i) const noexcept {
  return i <= max_index() ? 0 : i - max_index();
}

std::string OsgoodFamily::to_record() const {
  std::ostringstream os;
  os << "mode=" << to_string(mode_);
  if (mode_ == GrowthMode::Power) os << ";k=" << fmt_double(k_);
  os << ";phi0=" << fmt_double(phi0_) << ";max_index=" << max_index();
  return os.str();
}

OsgoodFamily OsgoodFamily::from_record(const std::string& record) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(record);
  std::string item;
  while (std::getline(ss, item, ';')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ParameterViolation("malformed family record: " + record);
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  if (!kv.count("mode") || !kv.count("phi0")) {
    throw ParameterViolation("family record needs mode and phi0: " + record);
  }
  const GrowthMode mode = growth_mode_from_string(kv["mode"]);
  double k = 0.0;
  if (mode == GrowthMode::Power) {
    if (!kv.count("k")) throw ParameterViolation("power-mode record needs k: " + record);
    k = std::stod(kv["k"]);
  }
  OsgoodFamily fam = build(mode, k, std::stod(kv["phi0"]));
  if (kv.count("max_index") && std::stoul(kv["max_index"]) != fam.max_index()) {
    throw ParameterViolation("family record max_index does not match the rebuilt sequence");
  }
  return fam;
}

Block locate_block(const OsgoodFamily& fam, double log_s) {
  if (log_s <= fam.log_phi(0)) return Block{Block::Kind::J0, 0};
  std::size_t i = 1;
  while (!(log_s < fam.log_phi(i))) ++i;
  if (log_s <= fam.log_phi(i) - kLn2) return Block{Block::Kind::I, i};
  return Block{Block::Kind::J, i};
}

double log_plateau(const OsgoodFamily& fam, std::size_t i) {
  if (i < 1) throw IndexError("plateau index must be >= 1");
  if (fam.saturated(i)) {
    throw SaturationOverflow("phi_" + std::to_string(i) +
                             " is beyond the materialized log range (height " +
                             std::to_string(fam.height(i)) + ")");
  }
  const double plain = fam.phi(i) - fam.phi(i - 1);
  if (std::isfinite(plain)) return std::log(plain);
  return logmath::log_sub_exp(fam.log_phi(i), fam.log_phi(i - 1));
}

PiecewiseValue eval_affine_piece(const OsgoodFamily& fam, std::size_t i, double lambda) {
  if (i < 1) throw IndexError("affine piece index must be >= 1");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("lambda must lie in [0, 1]");
  return affine_value(fam, i, lambda, std::log(lambda), std::log1p(-lambda));
}

PiecewiseValue eval_f(const OsgoodFamily& fam, double s) {
  require_nonneg(s);
  require_unsaturated(s);
  if (s <= fam.phi0()) {
    PiecewiseValue out;
    out.block = Block{Block::Kind::J0, 0};
    const double p = j0_exponent(fam);
    out.value = j0_coefficient(fam) * std::pow(s, p);
    out.log_value = s > 0.0 ? std::log(out.value) : kNegInf;
    return out;
  }
  std::size_t i = 1;
  while (!(s < fam.phi(i))) ++i;
  const double half = 0.5 * fam.phi(i);
  if (s <= half) return plateau_value(fam, i);
  const double lambda = (s - half) / half;
  const double one_minus = (fam.phi(i) - s) / half;
  return affine_value(fam, i, lambda, std::log(lambda), std::log(one_minus));
}

PiecewiseValue eval_f_log(const OsgoodFamily& fam, double log_s) {
  if (std::isnan(log_s)) throw DomainError("log argument is NaN");
  const Block block = locate_block(fam, log_s);
  switch (block.kind) {
    case Block::Kind::J0: {
      PiecewiseValue out;
      out.block = block;
      out.log_value = log_j0_coefficient(fam) + j0_exponent(fam) * log_s;
      out.value = logmath::exp_or_inf(out.log_value);
      return out;
    }
    case Block::Kind::I:
      return plateau_value(fam, block.index);
    case Block::Kind::J: {
      const double d = log_s - fam.log_phi(block.index);  // in (-ln 2, 0)
      const double lambda = std::expm1(d + kLn2);
      const double one_minus = -2.0 * std::expm1(d);
      return affine_value(fam, block.index, lambda, std::log(lambda), std::log(one_minus));
    }
  }
  throw DomainError("unreachable block kind");
}

PiecewiseValue eval_f_tilde(const OsgoodFamily& fam, double s) {
  require_nonneg(s);
  require_unsaturated(s);
  PiecewiseValue out;
  out.block = s > 0.0 ? locate_block(fam, std::log(s)) : Block{};
  if (s <= fam.phi0()) {
    out.value = 0.0;
    out.log_value = kNegInf;
    return out;
  }
  std::size_t i = 1;
  while (s > fam.phi(i)) ++i;
  out.log_value = log_plateau(fam, i);
  const double v = fam.phi(i) - fam.phi(i - 1);
  out.value = std::isfinite(v) ? v : logmath::exp_or_inf(out.log_value);
  return out;
}

PiecewiseValue eval_f_tilde_log(const OsgoodFamily& fam, double log_s) {
  if (std::isnan(log_s)) throw DomainError("log argument is NaN");
  PiecewiseValue out;
  out.block = locate_block(fam, log_s);
  const std::size_t i = step_index_log(fam, log_s);
  if (i == 0) {
    out.value = 0.0;
    out.log_value = kNegInf;
    return out;
  }
  out.log_value = log_plateau(fam, i);
  out.value = logmath::exp_or_inf(out.log_value);
  return out;
}

double osgood_block_term(const OsgoodFamily& fam, std::size_t i) {
  if (i < 1) throw IndexError("block term index must be >= 1");
  if (fam.saturated(i - 1)) return 0.5;
  const double lo = fam.phi(i - 1);
  const double hi = fam.phi(i);
  if (std::isfinite(hi)) return (0.5 * hi - lo) / (hi - lo);
  // 0.5 (1 - 2r) / (1 - r) with r = phi_{i-1} / phi_i.
  const double d = fam.log_phi(i - 1) - fam.log_phi(i);
  if (d == kNegInf) return 0.5;
  return 0.5 * std::expm1(d + kLn2) / std::expm1(d);
}

double osgood_block_log_deficit(const OsgoodFamily& fam, std::size_t i) {
  if (i < 1) throw IndexError("block term index must be >= 1");
  if (fam.saturated(i)) return kNegInf;
  const double d = fam.log_phi(i - 1) - fam.log_phi(i);
  return d - kLn2 - logmath::log1m_exp(d);
}

double osgood_partial_sum(const OsgoodFamily& fam, std::size_t n) {
  if (n < 1) throw DomainError("partial sum needs at least one block");
  double sum = 0.0;
  for (std::size_t i = 1; i <= n; ++i) sum += osgood_block_term(fam, i);
  return sum;
}

EnvelopeCheck envelope_check_log(const OsgoodFamily& fam, double log_s) {
  if (fam.mode() != GrowthMode::Power) {
    throw ModeError("the 2^k s^k envelope is only defined in power mode");
  }
  const PiecewiseValue fv = eval_f_log(fam, log_s);
  EnvelopeCheck out;
  out.log_margin = fam.k() * (kLn2 + log_s) - fv.log_value;
  out.holds = out.log_margin >= 0.0;
  return out;
}

EnvelopeCheck envelope_check(const OsgoodFamily& fam, double s) {
  if (fam.mode() != GrowthMode::Power) {
    throw ModeError("the 2^k s^k envelope is only defined in power mode");
  }
  if (!(s > 0.0)) throw DomainError("envelope check needs s > 0");
  require_unsaturated(s);
  const PiecewiseValue fv = eval_f(fam, s);
  EnvelopeCheck out;
  out.log_margin = fam.k() * (kLn2 + std::log(s)) - fv.log_value;
  out.holds = out.log_margin >= 0.0;
  return out;
}

}  // namespace osgood
