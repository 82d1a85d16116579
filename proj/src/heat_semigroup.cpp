#include "osgood/heat_semigroup.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include <boost/math/special_functions/gamma.hpp>

#include "osgood/errors.hpp"
#include "osgood/quadrature.hpp"
#include "osgood/simd/kernels.hpp"

namespace osgood {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kBandWidths = 7.0;

void require_tol(double tol) {
  if (!(tol >= 1e-12 && tol <= 1e-4)) throw DomainError("tol must lie in [1e-12, 1e-4]");
}

}  // namespace

void SingularData::validate() const {
  if (n < 1 || n > 3) throw ParameterViolation("dimension n must be 1, 2 or 3");
  if (!(alpha > 0.0 && alpha < n)) throw ParameterViolation("alpha must lie in (0, n)");
  if (!(R > 1.0) || !std::isfinite(R)) throw ParameterViolation("cutoff radius R must exceed 1");
  if (q) {
    if (!(*q >= 1.0)) throw ParameterViolation("integrability class q must be >= 1");
    if (!(alpha * *q < n)) throw ParameterViolation("alpha * q < n is required for u0 in L^q");
  }
}

double SingularData::u0(double r) const {
  if (r > R) return 0.0;
  return std::pow(r, -alpha);
}

double SingularData::mass() const {
  return n * unit_ball_volume(n) * std::pow(R, n - alpha) / (n - alpha);
}

double unit_ball_volume(int n) {
  if (n < 1) throw DomainError("dimension must be positive");
  return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

SemigroupConstants semigroup_constants(int n) {
  if (n < 1 || n > 3) throw DomainError("dimension n must be 1, 2 or 3");
  SemigroupConstants c;
  c.n = n;
  c.omega_n = unit_ball_volume(n);
  c.sphere_area = n * c.omega_n;
  switch (n) {
    case 1: c.kernel_tag = "gaussian-pair"; break;
    case 2: c.kernel_tag = "scaled-bessel-i0"; break;
    default: c.kernel_tag = "sinh-over-argument"; break;
  }
  return c;
}

double RadialProfile::operator()(double r) const {
  if (r > nodes.back() || r < 0.0) return 0.0;
  auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
  if (it == nodes.end()) return values.back();
  const std::size_t k = static_cast<std::size_t>(it - nodes.begin()) - 1;
  const double lam = (r - nodes[k]) / (nodes[k + 1] - nodes[k]);
  return values[k] + lam * (values[k + 1] - values[k]);
}

void RadialProfile::validate() const {
  if (nodes.size() < 2 || nodes.size() != values.size()) {
    throw DomainError("profile needs at least two nodes and one value per node");
  }
  if (nodes.front() != 0.0) throw DomainError("profile grid must start at r = 0");
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i] > nodes[i - 1])) throw DomainError("profile nodes must increase strictly");
  }
  for (double v : values) {
    if (!(v >= 0.0)) throw DomainError("profile values must be nonnegative");
  }
  if (!(tail_bound >= 0.0)) throw DomainError("tail bound must be nonnegative");
}

std::vector<double> make_radial_grid(const GridSpec& spec) {
  if (!(spec.r_min > 0.0 && spec.r_switch > spec.r_min && spec.r_max > spec.r_switch &&
        spec.per_decade > 0.0 && spec.spacing > 0.0)) {
    throw DomainError("grid spec must satisfy 0 < r_min < r_switch < r_max, positive densities");
  }
  std::vector<double> nodes{0.0};
  const double ratio = std::pow(10.0, 1.0 / spec.per_decade);
  for (double r = spec.r_min; r < spec.r_switch; r *= ratio) nodes.push_back(r);
  const auto uniform = static_cast<std::size_t>(std::ceil((spec.r_max - spec.r_switch) / spec.spacing));
  const double h = (spec.r_max - spec.r_switch) / static_cast<double>(uniform);
  for (std::size_t i = 0; i <= uniform; ++i) {
    nodes.push_back(i == uniform ? spec.r_max : spec.r_switch + h * static_cast<double>(i));
  }
  for (double r : spec.required) {
    if (!(r > 0.0 && r <= spec.r_max)) continue;
    const double local = r < spec.r_switch ? r * (ratio - 1.0) : h;
    std::erase_if(nodes, [&](double x) { return x > 0.0 && std::abs(x - r) < 0.3 * local; });
    nodes.push_back(r);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

double eval_w(const SingularData& data, double r, double t, double tol, double cap) {
  data.validate();
  require_tol(tol);
  if (!(t > 0.0)) throw DomainError("eval_w needs t > 0");
  if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("radius must be a nonnegative number");
  if (!(cap > 0.0)) throw DomainError("cap must be positive");

  const int n = data.n;
  const double p = n - data.alpha;
  const double inv_p = 1.0 / p;
  const double sigma_max = std::pow(data.R, p);
  const double s = std::sqrt(4.0 * t);
  const double rho_cap = std::isfinite(cap) ? std::pow(cap, -1.0 / data.alpha) : 0.0;

  // A kernel much narrower than r is integrated in the offset u = rho - r,
  // since node positions in sigma cannot resolve it in double precision.
  const double half = 8.0 * s;
  const bool narrow = s <= 1e-3 * r && r - half > 0.0 && r - half < data.R;
  const double win_lo = r - half;
  const double win_hi = std::min(r + half, data.R);

  std::vector<double> bps{0.0, sigma_max};
  auto add_rho = [&](double rho) {
    if (rho > 0.0 && rho < data.R) bps.push_back(std::pow(rho, p));
  };
  if (narrow) {
    add_rho(win_lo);
    add_rho(win_hi);
  } else {
    for (double c : {1.0, 3.0, 8.0}) {
      add_rho(r - c * s);
      add_rho(r + c * s);
    }
    add_rho(r);
  }
  add_rho(rho_cap);
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

  const auto& kt = simd::active();
  auto integrand = [&](std::span<const double> sigma, std::span<double> y) {
    std::array<double, 15> rho{};
    for (std::size_t i = 0; i < sigma.size(); ++i) rho[i] = std::pow(sigma[i], inv_p);
    kt.radial_kernel(n, r, t, rho.data(), y.data(), sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      double v = y[i] * inv_p;
      if (rho[i] < rho_cap) v *= cap * std::pow(rho[i], data.alpha);
      y[i] = v;
    }
  };
  auto fail = [&](double err) {
    throw QuadratureFailure("eval_w: error estimate " + std::to_string(err) +
                            " above tolerance at r = " + std::to_string(r) +
                            ", t = " + std::to_string(t));
  };

  double value = 0.0;
  double error = 0.0;
  if (narrow) {
    const double sig_lo = std::pow(win_lo, p);
    const double sig_hi = std::pow(win_hi, p);
    std::vector<double> outer;
    for (double b : bps) {
      if (b <= sig_lo || b >= sig_hi) outer.push_back(b);
    }
    for (std::size_t i = 0; i + 1 < outer.size(); ++i) {
      if (outer[i] == sig_lo) continue;  // the window itself
      const double seg[2] = {outer[i], outer[i + 1]};
      const quad::AdaptiveResult part = quad::integrate_adaptive(integrand, seg, 0.1 * tol, 0.1 * tol, 2000);
      if (!part.converged) fail(part.error);
      value += part.value;
      error += part.error;
    }
    std::vector<double> ubps{-half, win_hi - r};
    for (double c : {-3.0, -1.0, 0.0, 1.0, 3.0}) {
      if (c * s < win_hi - r) ubps.push_back(c * s);
    }
    if (rho_cap > win_lo && rho_cap < win_hi) ubps.push_back(rho_cap - r);
    std::sort(ubps.begin(), ubps.end());
    ubps.erase(std::unique(ubps.begin(), ubps.end()), ubps.end());
    auto local = [&](std::span<const double> u, std::span<double> y) {
      for (std::size_t i = 0; i < u.size(); ++i) {
        const double rho = r + u[i];
        y[i] = std::pow(rho, n - 1) * std::min(std::pow(rho, -data.alpha), cap) *
               simd::radial_kernel_offset(n, r, u[i], t);
      }
    };
    const quad::AdaptiveResult win = quad::integrate_adaptive(local, ubps, 0.5 * tol, 0.5 * tol, 4000);
    if (!win.converged) fail(win.error);
    value += win.value;
    error += win.error;
    if (error > tol * std::max(1.0, value)) fail(error);
    return value;
  }
  const quad::AdaptiveResult res = quad::integrate_adaptive(integrand, bps, tol, tol, 4000);
  if (!res.converged) fail(res.error);
  return res.value;
}

RadialProfile sample_w(const SingularData& data, std::span<const double> nodes, double t,
                       double tol) {
  data.validate();
  RadialProfile prof;
  prof.n = data.n;
  prof.nodes.assign(nodes.begin(), nodes.end());
  prof.values.resize(nodes.size());
  prof.time = t;
  if (t == 0.0) {
    for (std::size_t i = 0; i < nodes.size(); ++i) prof.values[i] = data.u0(nodes[i]);
    prof.values[0] = prof.values.size() > 1 ? prof.values[1] : 0.0;
    prof.singular_origin = true;
    prof.tail_bound = prof.r_max() >= data.R ? 0.0 : data.u0(prof.r_max());
  } else {
    for (std::size_t i = 0; i < nodes.size(); ++i) prof.values[i] = eval_w(data, nodes[i], t, tol);
    // w(., t) is radially nonincreasing, so its value at r_max bounds the tail.
    prof.tail_bound = prof.values.back() * (1.0 + tol) + tol;
  }
  prof.validate();
  return prof;
}

MassEstimate mass_of_w(const SingularData& data, double t, double tol) {
  data.validate();
  if (!(t > 0.0)) throw DomainError("mass_of_w needs t > 0");
  if (!(tol > 0.0)) throw DomainError("tol must be positive");
  const int n = data.n;
  const double s = std::sqrt(4.0 * t);
  MassEstimate est;
  // Q(n/2, 60) is far below any tolerance in use.
  est.r_cut = data.R + s * std::sqrt(60.0);
  est.tail_bound = data.mass() * gaussian_tail_fraction(n, est.r_cut - data.R, t);

  std::vector<double> bps{0.0, est.r_cut};
  for (double c : {1.0, 3.0}) {
    bps.push_back(c * s);
    bps.push_back(data.R - c * s);
    bps.push_back(data.R + c * s);
  }
  bps.push_back(data.R);
  std::erase_if(bps, [&](double b) { return !(b >= 0.0 && b <= est.r_cut); });
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

  const double inner_tol = std::clamp(tol * 1e-2, 1e-12, 1e-4);
  auto integrand = [&](std::span<const double> r, std::span<double> y) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      y[i] = std::pow(r[i], n - 1) * eval_w(data, r[i], t, inner_tol);
    }
  };
  const double area = n * unit_ball_volume(n);
  const quad::AdaptiveResult res =
      quad::integrate_adaptive(integrand, bps, 0.0, tol * 1e-1, 2000);
  if (!res.converged) throw QuadratureFailure("mass quadrature did not reach tolerance");
  est.inner = area * res.value;
  return est;
}

MEstimate compute_M_detailed(const SingularData& data, double t_floor) {
  data.validate();
  if (!(t_floor > 0.0 && t_floor <= 0.01)) throw DomainError("t_floor must lie in (0, 0.01]");

  using Key = std::tuple<int, double, double, double>;
  static std::mutex mutex;
  static std::map<Key, MEstimate> cache;
  const Key key{data.n, data.alpha, data.R, t_floor};
  {
    std::lock_guard<std::mutex> lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }

  constexpr double tol = 1e-10;
  constexpr int samples = 64;
  auto w_at = [&](double log_t) { return eval_w(data, 1.0, std::exp(log_t), tol); };
  const double lo = std::log(t_floor);
  std::array<double, samples> log_t{};
  std::array<double, samples> vals{};
  for (int i = 0; i < samples; ++i) {
    log_t[i] = lo + (0.0 - lo) * i / (samples - 1);
    vals[i] = w_at(log_t[i]);
  }
  const auto best = static_cast<int>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  double a = log_t[std::max(best - 1, 0)];
  double b = log_t[std::min(best + 1, samples - 1)];
  double best_val = vals[best];
  double best_t = log_t[best];

  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = w_at(c);
  double fd = w_at(d);
  for (int it = 0; it < 60 && b - a > 1e-10; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = w_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = w_at(d);
    }
    if (fc < best_val) { best_val = fc; best_t = c; }
    if (fd < best_val) { best_val = fd; best_t = d; }
  }

  MEstimate est;
  est.scan_min = best_val;
  est.t_argmin = std::exp(best_t);
  est.limit_at_zero = data.u0(1.0);
  est.limit_verified = std::abs(vals[0] - est.limit_at_zero) <= 1e-3 * est.limit_at_zero;
  est.M = std::min(best_val, est.limit_at_zero) - tol * std::max(1.0, best_val);

  std::lock_guard<std::mutex> lock(mutex);
  cache.emplace(key, est);
  return est;
}

double compute_M(const SingularData& data, double t_floor) {
  return compute_M_detailed(data, t_floor).M;
}

ScalingCheck scaling_inequality_check(const SingularData& data, double beta, double t,
                                      double tol) {
  if (!(beta > 0.0 && beta < 0.5)) throw DomainError("beta must lie in (0, 1/2)");
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("t must lie in (0, 1]");
  ScalingCheck out;
  out.left = eval_w(data, std::pow(t, beta), t, tol);
  out.right = std::pow(t, -data.alpha * beta) * eval_w(data, 1.0, std::pow(t, 1.0 - 2.0 * beta), tol);
  out.margin = t == 1.0 ? 0.0 : (out.left - out.right) / out.right;
  out.holds = out.left >= out.right - tol * out.right;
  return out;
}

double gaussian_tail_fraction(int n, double d, double dt) {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (d <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * n, d * d / (4.0 * dt));
}

SemigroupOperator::SemigroupOperator(int n, std::vector<double> nodes, double dt)
    : n_(n), dt_(dt), nodes_(std::move(nodes)) {
  if (n < 1 || n > 3) throw DomainError("dimension n must be 1, 2 or 3");
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (nodes_.size() < 2 || nodes_.front() != 0.0) throw DomainError("grid must start at 0");

  const auto& kt = simd::active();
  const quad::GaussLegendreRule& gl4 = quad::gauss_legendre(4);
  const quad::GaussLegendreRule& gl8 = quad::gauss_legendre(8);
  const double h = std::sqrt(4.0 * dt);
  const std::size_t m = nodes_.size();
  rows_.resize(m);

  std::vector<double> pts;
  std::vector<double> wts;
  std::vector<std::size_t> seg;
  std::vector<double> kern;
  for (std::size_t j = 0; j < m; ++j) {
    const double r = nodes_[j];
    const double lo = std::max(0.0, r - kBandWidths * h);
    const double hi = std::min(nodes_.back(), r + kBandWidths * h);
    std::size_t k0 = static_cast<std::size_t>(
        std::upper_bound(nodes_.begin(), nodes_.end(), lo) - nodes_.begin());
    k0 = k0 == 0 ? 0 : k0 - 1;
    std::size_t k1 = static_cast<std::size_t>(
        std::lower_bound(nodes_.begin(), nodes_.end(), hi) - nodes_.begin());
    k1 = std::min(std::max(k1, k0 + 1), m - 1);

    pts.clear();
    wts.clear();
    seg.clear();
    for (std::size_t k = k0; k < k1; ++k) {
      const double a = std::max(nodes_[k], lo);
      const double b = std::min(nodes_[k + 1], hi);
      if (!(b > a)) continue;
      const double len = b - a;
      const bool short_seg = len <= 0.1 * h;
      const quad::GaussLegendreRule& rule = short_seg ? gl4 : gl8;
      const std::size_t panels =
          short_seg ? 1 : static_cast<std::size_t>(std::ceil(len / (0.5 * h)));
      if (panels > 100000) throw QuadratureFailure("semigroup row needs too many panels");
      const double plen = len / static_cast<double>(panels);
      for (std::size_t pnl = 0; pnl < panels; ++pnl) {
        const double c = a + plen * (static_cast<double>(pnl) + 0.5);
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
          pts.push_back(c + 0.5 * plen * rule.nodes[q]);
          wts.push_back(0.5 * plen * rule.weights[q]);
          seg.push_back(k);
        }
      }
    }
    kern.resize(pts.size());
    kt.radial_kernel(n, r, dt, pts.data(), kern.data(), pts.size());

    Row& row = rows_[j];
    row.first = k0;
    row.weights.assign(k1 - k0 + 1, 0.0);
    for (std::size_t q = 0; q < pts.size(); ++q) {
      const std::size_t k = seg[q];
      const double x0 = nodes_[k];
      const double x1 = nodes_[k + 1];
      const double lam = (pts[q] - x0) / (x1 - x0);
      const double base = wts[q] * kern[q] * std::pow(pts[q], n - 1);
      row.weights[k - k0] += base * (1.0 - lam);
      row.weights[k + 1 - k0] += base * lam;
    }
  }
}

std::size_t SemigroupOperator::weight_count() const {
  std::size_t total = 0;
  for (const Row& row : rows_) total += row.weights.size();
  return total;
}

void SemigroupOperator::apply_values(std::span<const double> in, std::span<double> out) const {
  if (in.size() != nodes_.size() || out.size() != nodes_.size()) {
    throw DomainError("value vector does not match the operator grid");
  }
  const auto& kt = simd::active();
  for (std::size_t j = 0; j < rows_.size(); ++j) {
    const Row& row = rows_[j];
    out[j] = kt.dot(row.weights.data(), in.data() + row.first, row.weights.size());
  }
}

RadialProfile SemigroupOperator::apply(const RadialProfile& in, double tol) const {
  if (in.n != n_) throw DomainError("profile dimension does not match the operator");
  if (in.nodes != nodes_) throw DomainError("profile grid does not match the operator");
  if (!(tol > 0.0)) throw DomainError("tol must be positive");
  const double r_max = nodes_.back();
  if (in.tail_bound > 0.0) {
    for (std::size_t j = 0; j < nodes_.size() && nodes_[j] <= 0.5 * r_max; ++j) {
      const double leak = in.tail_bound * gaussian_tail_fraction(n_, r_max - nodes_[j], dt_);
      if (leak > tol) {
        throw TailDominance("input tail may contribute " + std::to_string(leak) +
                            " at r = " + std::to_string(nodes_[j]) + "; enlarge r_max");
      }
    }
  }
  RadialProfile out;
  out.n = n_;
  out.nodes = nodes_;
  out.values.resize(nodes_.size());
  out.time = in.time + dt_;
  out.singular_origin = false;
  apply_values(in.values, out.values);
  for (double& v : out.values) v = std::max(v, 0.0);

  const double h = std::sqrt(4.0 * dt_);
  double near_edge = in.tail_bound;
  double sup = in.tail_bound;
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    sup = std::max(sup, in.values[j]);
    if (nodes_[j] >= r_max - kBandWidths * h) near_edge = std::max(near_edge, in.values[j]);
  }
  out.tail_bound = near_edge + sup * boost::math::gamma_q(0.5 * n_, kBandWidths * kBandWidths);
  out.tail_bound = std::max(out.tail_bound, out.values.back());
  return out;
}

RadialProfile apply_semigroup(const RadialProfile& profile, double dt, double tol) {
  profile.validate();
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  const SemigroupOperator op(profile.n, profile.nodes, dt);
  return op.apply(profile, tol);
}

}  // namespace osgood
