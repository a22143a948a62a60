#include "toomlab/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "toomlab/error.hpp"

namespace toomlab::exact {

namespace {

void require_tiny(const Torus& torus, int cap) {
  if (torus.sites() > static_cast<std::uint64_t>(cap))
    throw ResourceError("exact computation supports at most " + std::to_string(cap) +
                        " sites, torus has " + std::to_string(torus.sites()));
}

std::vector<std::uint64_t> window_sites(const Torus& torus, const std::vector<Offset>& window) {
  std::vector<std::uint64_t> out;
  for (const auto& w : window) {
    if (static_cast<int>(w.size()) != torus.dimension())
      throw DomainError("window site has wrong dimension");
    out.push_back(torus.index(w));
  }
  return out;
}

std::uint32_t window_bits(std::uint64_t code, const std::vector<std::uint64_t>& sites) {
  std::uint32_t bits = 0;
  for (std::size_t i = 0; i < sites.size(); ++i)
    if (code >> sites[i] & 1u) bits |= std::uint32_t{1} << i;
  return bits;
}

}  // namespace

StateDistribution::StateDistribution(Torus torus, std::vector<double> probs)
    : torus_(std::move(torus)), probs_(std::move(probs)) {
  require_tiny(torus_, kMaxSites);
  if (probs_.size() != (std::size_t{1} << torus_.sites()))
    throw InputShapeError("distribution needs 2^N entries");
  double total = 0;
  for (double p : probs_) {
    if (!(p >= 0)) throw ValidationError("distribution entries must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("distribution must sum to 1");
}

StateDistribution StateDistribution::point_mass(Torus torus, std::uint64_t code) {
  require_tiny(torus, kMaxSites);
  std::vector<double> p(std::size_t{1} << torus.sites(), 0.0);
  if (code >= p.size()) throw InputShapeError("state code out of range");
  p[code] = 1.0;
  return StateDistribution(std::move(torus), std::move(p));
}

StateDistribution StateDistribution::all_plus(Torus torus) {
  const std::uint64_t n = torus.sites();
  return point_mass(std::move(torus), (std::uint64_t{1} << n) - 1);
}

StateDistribution StateDistribution::all_minus(Torus torus) { return point_mass(std::move(torus), 0); }

StateDistribution StateDistribution::uniform(Torus torus) {
  require_tiny(torus, kMaxSites);
  const std::size_t n = std::size_t{1} << torus.sites();
  return StateDistribution(std::move(torus), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

CylinderFunction CylinderFunction::constant(double c) {
  return {{}, {c}};
}

CylinderFunction CylinderFunction::spin(const Offset& site) { return {{site}, {-1.0, 1.0}}; }

CylinderFunction CylinderFunction::spin_product(std::vector<Offset> sites) {
  const std::size_t n = std::size_t{1} << sites.size();
  std::vector<double> t(n);
  for (std::size_t b = 0; b < n; ++b) {
    const int minus = static_cast<int>(sites.size()) - std::popcount(b);
    t[b] = minus % 2 ? -1.0 : 1.0;
  }
  return {std::move(sites), std::move(t)};
}

void CylinderFunction::validate() const {
  if (window.size() > 20) throw DomainError("cylinder window limited to 20 sites");
  if (table.size() != (std::size_t{1} << window.size()))
    throw InputShapeError("cylinder table needs 2^|window| entries");
}

TransferOperator::TransferOperator(RuleSpec rule, NoiseModel noise, Torus torus)
    : rule_(std::move(rule)), noise_(std::move(noise)), torus_(std::move(torus)) {
  require_tiny(torus_, kMaxSites);
  torus_.require_fits(rule_);
  noise_.require_covers(rule_);
  factored_ = noise_.factors_through_rule(rule_);
  if (!factored_) require_tiny(torus_, kMaxDenseSites);

  const int n = static_cast<int>(torus_.sites());
  const int r = rule_.size();
  std::vector<std::uint64_t> nbr(static_cast<std::size_t>(n) * r);
  for (int x = 0; x < n; ++x)
    for (int i = 0; i < r; ++i) nbr[x * r + i] = torus_.neighbor(x, rule_.offset(i));

  const std::size_t count = states();
  image_.resize(count);
  if (!factored_) local_config_.resize(count * n);
  for (std::size_t code = 0; code < count; ++code) {
    std::uint32_t img = 0;
    for (int x = 0; x < n; ++x) {
      LocalConfig c = 0;
      for (int i = 0; i < r; ++i)
        if (code >> nbr[x * r + i] & 1u) c |= LocalConfig{1} << i;
      if (rule_.output(c)) img |= std::uint32_t{1} << x;
      if (!factored_) local_config_[code * n + x] = c;
    }
    image_[code] = img;
  }
  if (factored_) {
    pp_ = noise_.p_plus_given_plus(rule_);
    pm_ = noise_.p_plus_given_minus(rule_);
  }
}

void TransferOperator::mix_sites(std::span<double> v, bool transpose) const {
  const int n = static_cast<int>(torus_.sites());
  for (int x = 0; x < n; ++x) {
    const std::size_t stride = std::size_t{1} << x;
    for (std::size_t base = 0; base < v.size(); base += 2 * stride) {
      for (std::size_t i = base; i < base + stride; ++i) {
        const double a = v[i], b = v[i + stride];
        if (!transpose) {
          // a: mass with prescribed -1 at x, b: prescribed +1
          v[i] = a * (1.0 - pm_) + b * (1.0 - pp_);
          v[i + stride] = a * pm_ + b * pp_;
        } else {
          // a = f(xi_x = -1), b = f(xi_x = +1)
          v[i] = (1.0 - pm_) * a + pm_ * b;
          v[i + stride] = (1.0 - pp_) * a + pp_ * b;
        }
      }
    }
  }
}

void TransferOperator::apply(std::span<const double> in, std::span<double> out) const {
  if (in.size() != states() || out.size() != states())
    throw InputShapeError("vector length differs from 2^N");
  std::fill(out.begin(), out.end(), 0.0);
  if (factored_) {
    for (std::size_t code = 0; code < in.size(); ++code) out[image_[code]] += in[code];
    mix_sites(out, false);
    return;
  }
  const int n = static_cast<int>(torus_.sites());
  std::vector<double> prod(states());
  for (std::size_t code = 0; code < in.size(); ++code) {
    if (in[code] == 0.0) continue;
    prod[0] = in[code];
    std::size_t filled = 1;
    for (int x = 0; x < n; ++x) {
      const double p = noise_.p_plus(rule_, local_config_[code * n + x]);
      for (std::size_t i = 0; i < filled; ++i) {
        prod[i + filled] = prod[i] * p;
        prod[i] *= 1.0 - p;
      }
      filled *= 2;
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += prod[i];
  }
}

void TransferOperator::apply_dual(std::span<const double> f, std::span<double> out) const {
  if (f.size() != states() || out.size() != states())
    throw InputShapeError("vector length differs from 2^N");
  if (factored_) {
    std::vector<double> g(f.begin(), f.end());
    mix_sites(g, true);
    for (std::size_t code = 0; code < out.size(); ++code) out[code] = g[image_[code]];
    return;
  }
  const int n = static_cast<int>(torus_.sites());
  std::vector<double> prod(states());
  for (std::size_t code = 0; code < out.size(); ++code) {
    prod[0] = 1.0;
    std::size_t filled = 1;
    for (int x = 0; x < n; ++x) {
      const double p = noise_.p_plus(rule_, local_config_[code * n + x]);
      for (std::size_t i = 0; i < filled; ++i) {
        prod[i + filled] = prod[i] * p;
        prod[i] *= 1.0 - p;
      }
      filled *= 2;
    }
    double s = 0;
    for (std::size_t i = 0; i < f.size(); ++i) s += prod[i] * f[i];
    out[code] = s;
  }
}

std::vector<std::uint32_t> TransferOperator::absorbing_states() const {
  std::vector<std::uint32_t> out;
  const int n = static_cast<int>(torus_.sites());
  for (std::uint32_t code = 0; code < states(); ++code) {
    bool stays = true;
    for (int x = 0; x < n && stays; ++x) {
      const bool plus = code >> x & 1u;
      double p;
      if (factored_)
        p = (image_[code] >> x & 1u) ? pp_ : pm_;
      else
        p = noise_.p_plus(rule_, local_config_[code * n + x]);
      stays = plus ? p == 1.0 : p == 0.0;
    }
    if (stays) out.push_back(code);
  }
  return out;
}

std::vector<bool> TransferOperator::reaches(std::uint32_t target) const {
  std::vector<double> f(states(), 0.0), g(states());
  f[target] = 1.0;
  for (std::size_t round = 0; round <= states(); ++round) {
    apply_dual(f, g);
    bool grew = false;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g[i] > 0.0 && f[i] == 0.0) {
        f[i] = 1.0;
        grew = true;
      }
    }
    if (!grew) break;
  }
  std::vector<bool> out(states());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] > 0.0;
  return out;
}

StateDistribution TransferOperator::operator()(const StateDistribution& dist) const {
  if (!(dist.torus() == torus_)) throw InputShapeError("distribution torus differs from operator torus");
  std::vector<double> out(states());
  apply(dist.probs(), out);
  double total = 0;
  for (double& p : out) {
    p = std::max(p, 0.0);
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw NumericalError("transfer application drifted total mass by " +
                         std::to_string(total - 1.0));
  for (double& p : out) p /= total;
  return StateDistribution(torus_, std::move(out));
}

StateDistribution transfer_apply(const StateDistribution& dist, const RuleSpec& rule,
                                 const NoiseModel& noise) {
  return TransferOperator(rule, noise, dist.torus())(dist);
}

double tv_distance(const StateDistribution& a, const StateDistribution& b) {
  if (!(a.torus() == b.torus())) throw InputShapeError("distributions live on different tori");
  double s = 0;
  for (std::size_t i = 0; i < a.states(); ++i) s += std::abs(a[i] - b[i]);
  return std::min(1.0, 0.5 * s);
}

StationaryResult stationary_distribution(const RuleSpec& rule, const NoiseModel& noise,
                                         const Torus& torus, const StationaryOptions& opts) {
  const TransferOperator op(rule, noise, torus);
  // A single absorbing state reachable from everywhere carries the unique
  // stationary measure; power iteration would only see its slow leak.
  if (const auto absorbing = op.absorbing_states(); absorbing.size() == 1) {
    const auto reach = op.reaches(absorbing.front());
    if (std::all_of(reach.begin(), reach.end(), [](bool b) { return b; })) {
      auto pi = StateDistribution::point_mass(torus, absorbing.front());
      return {pi, 0, false, tv_distance(op(pi), pi)};
    }
  }
  StateDistribution cur = StateDistribution::all_plus(torus);
  double prev_diff = std::numeric_limits<double>::infinity();
  double best_diff = prev_diff;
  std::uint64_t since_progress = 0;
  std::uint64_t it = 0;
  for (; it < opts.max_iterations; ++it) {
    StateDistribution next = op(cur);
    const double diff = tv_distance(next, cur);
    // Geometric tail estimate of the remaining distance to the fixed point.
    const double ratio = prev_diff > 0 ? diff / prev_diff : 0.0;
    const bool tail_small = diff == 0.0 || (ratio < 1.0 && diff * ratio / (1.0 - ratio) < opts.tol);
    cur = std::move(next);
    if (diff < opts.tol && tail_small) {
      const double residual = tv_distance(op(cur), cur);
      if (residual < opts.tol) return {cur, it + 1, false, residual};
    }
    if (diff < best_diff * (1.0 - 1e-9)) {
      best_diff = diff;
      since_progress = 0;
    } else if (++since_progress >= opts.cesaro_after) {
      break;
    }
    prev_diff = diff;
  }

  if (it < opts.max_iterations) {
    // Cesaro averages (1/m) sum_k T^k mu handle periodic chains.
    std::vector<double> sum(cur.probs());
    std::uint64_t m = 1;
    for (; it < opts.max_iterations; ++it) {
      cur = op(cur);
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += cur[i];
      ++m;
      if (m % 64 != 0) continue;
      std::vector<double> avg(sum.size());
      for (std::size_t i = 0; i < sum.size(); ++i) avg[i] = sum[i] / static_cast<double>(m);
      const double total = std::accumulate(avg.begin(), avg.end(), 0.0);
      for (double& p : avg) p /= total;
      StateDistribution candidate(torus, std::move(avg));
      const double residual = tv_distance(op(candidate), candidate);
      if (residual < opts.tol) return {candidate, it + 1, true, residual};
    }
  }
  char diag[96];
  std::snprintf(diag, sizeof diag, " iterations (last TV step %.3e, best %.3e)", prev_diff, best_diff);
  throw NumericalError("stationary distribution did not converge within " +
                       std::to_string(opts.max_iterations) + diag);
}

std::vector<double> expand(const CylinderFunction& f, const Torus& torus) {
  f.validate();
  require_tiny(torus, kMaxSites);
  const auto sites = window_sites(torus, f.window);
  std::vector<double> out(std::size_t{1} << torus.sites());
  for (std::size_t code = 0; code < out.size(); ++code) out[code] = f(window_bits(code, sites));
  return out;
}

double cylinder_expectation(const StateDistribution& dist, const CylinderFunction& f) {
  f.validate();
  const auto sites = window_sites(dist.torus(), f.window);
  double s = 0;
  for (std::size_t code = 0; code < dist.states(); ++code)
    if (dist[code] != 0.0) s += dist[code] * f(window_bits(code, sites));
  return s;
}

double seminorm(const CylinderFunction& f) {
  f.validate();
  double total = 0;
  for (std::size_t i = 0; i < f.window.size(); ++i) {
    double sup = 0;
    for (std::uint32_t b = 0; b < f.table.size(); ++b)
      sup = std::max(sup, std::abs(f(b) - f(b ^ (std::uint32_t{1} << i))));
    total += sup;
  }
  return total;
}

void ProductMeasureSpec::validate() const {
  if (minus_probs.empty()) throw InputShapeError("product measure needs at least one site");
  if (uniform && minus_probs.size() != 1) throw InputShapeError("uniform spec holds a single value");
  for (double m : minus_probs)
    if (!(m >= 0 && m <= 1)) throw ValidationError("minus probabilities must lie in [0, 1]");
}

bool basin_membership(const ProductMeasureSpec& spec, double K, double eps_prime) {
  spec.validate();
  if (!(K >= 0)) throw DomainError("K must be >= 0");
  if (!(eps_prime >= 0 && eps_prime <= 1)) throw DomainError("eps' must lie in [0, 1]");
  // Factor m_x / eps' per site (0 when m_x = 0). The supremum over nonempty
  // finite sets multiplies in every factor >= 1, or takes the largest single
  // factor when all are below 1.
  auto factor = [&](double m) {
    if (m == 0.0) return 0.0;
    if (eps_prime == 0.0) return std::numeric_limits<double>::infinity();
    return m / eps_prime;
  };
  if (spec.uniform) {
    const double f = factor(spec.minus_probs.front());
    if (f > 1.0) return false;  // f^|L| is unbounded on Z^d
    return f <= K;
  }
  double log_sup = 0.0;
  bool any_ge_one = false;
  double max_factor = 0.0;
  for (double m : spec.minus_probs) {
    const double f = factor(m);
    max_factor = std::max(max_factor, f);
    if (f >= 1.0) {
      any_ge_one = true;
      log_sup += std::log(f);
    }
  }
  if (!any_ge_one) return max_factor <= K;
  if (std::isinf(log_sup)) return false;
  return K > 0 && log_sup <= std::log(K) + 1e-15;
}

StateDistribution product_measure(const Torus& torus, const ProductMeasureSpec& spec) {
  spec.validate();
  require_tiny(torus, kMaxSites);
  const int n = static_cast<int>(torus.sites());
  if (!spec.uniform && spec.minus_probs.size() != static_cast<std::size_t>(n))
    throw InputShapeError("one minus probability per torus site required");
  std::vector<double> p{1.0};
  p.reserve(std::size_t{1} << n);
  for (int x = 0; x < n; ++x) {
    const double m = spec.uniform ? spec.minus_probs.front() : spec.minus_probs[x];
    const std::size_t filled = p.size();
    p.resize(2 * filled);
    for (std::size_t i = 0; i < filled; ++i) {
      p[i + filled] = p[i] * (1.0 - m);
      p[i] *= m;
    }
  }
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= total;
  return StateDistribution(torus, std::move(p));
}

std::vector<double> window_marginal(const StateDistribution& dist, const std::vector<Offset>& window) {
  if (window.size() > 20) throw DomainError("window limited to 20 sites");
  const auto sites = window_sites(dist.torus(), window);
  std::vector<double> out(std::size_t{1} << window.size(), 0.0);
  for (std::size_t code = 0; code < dist.states(); ++code) out[window_bits(code, sites)] += dist[code];
  return out;
}

double window_marginal_consistency(const RuleSpec& rule, const NoiseModel& noise,
                                   const std::vector<Offset>& window, int n, const Torus& small,
                                   const Torus& large) {
  if (n < 0) throw DomainError("step count must be >= 0");
  int radius = 0;
  for (const auto& w : window)
    for (int c : w) radius = std::max(radius, std::abs(c));
  const int min_side = *std::min_element(small.dims().begin(), small.dims().end());
  if (2 * (radius + n * rule.max_l1()) >= min_side)
    throw DomainError("light cone of the window wraps around the smaller torus");
  auto evolve = [&](const Torus& torus) {
    const TransferOperator op(rule, noise, torus);
    StateDistribution d = StateDistribution::all_plus(torus);
    for (int k = 0; k < n; ++k) d = op(d);
    return window_marginal(d, window);
  };
  const auto a = evolve(small), b = evolve(large);
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

std::vector<double> tv_curve(const TransferOperator& op, const StateDistribution& pi, int steps) {
  std::vector<double> out;
  StateDistribution d = StateDistribution::all_plus(op.torus());
  for (int k = 0; k <= steps; ++k) {
    out.push_back(tv_distance(d, pi));
    if (k < steps) d = op(d);
  }
  return out;
}

double stationary_covariance(const StateDistribution& pi, const Offset& a, const Offset& b) {
  const double ea = cylinder_expectation(pi, CylinderFunction::spin(a));
  const double eb = cylinder_expectation(pi, CylinderFunction::spin(b));
  if (a == b) return 1.0 - ea * ea;
  return cylinder_expectation(pi, CylinderFunction::spin_product({a, b})) - ea * eb;
}

double stationary_autocovariance(const TransferOperator& op, const StateDistribution& pi, int lag) {
  if (lag < 0) throw DomainError("lag must be >= 0");
  const Torus& torus = pi.torus();
  const int n = static_cast<int>(torus.sites());
  double total = 0;
  std::vector<double> v(pi.states()), w(pi.states());
  for (int x = 0; x < n; ++x) {
    // E[w_x(0) w_x(lag)] = < T^lag (pi * w_x), w_x >
    double mean = 0;
    for (std::size_t code = 0; code < v.size(); ++code) {
      const double s = (code >> x & 1u) ? 1.0 : -1.0;
      v[code] = pi[code] * s;
      mean += v[code];
    }
    for (int k = 0; k < lag; ++k) {
      op.apply(v, w);
      std::swap(v, w);
    }
    double joint = 0;
    for (std::size_t code = 0; code < v.size(); ++code) joint += v[code] * ((code >> x & 1u) ? 1.0 : -1.0);
    total += joint - mean * mean;
  }
  return total / n;
}

double stationary_minus_density(const StateDistribution& pi) {
  const int n = pi.sites();
  double s = 0;
  for (std::size_t code = 0; code < pi.states(); ++code)
    s += pi[code] * (n - std::popcount(code));
  return s / n;
}

}  // namespace toomlab::exact
