#include "toomlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "toomlab/engine.hpp"
#include "toomlab/error.hpp"

namespace toomlab::stats {

Estimate mean_and_se(const std::vector<double>& samples) {
  Estimate e;
  e.n = samples.size();
  if (samples.empty()) return e;
  double s = 0;
  for (double v : samples) s += v;
  e.mean = s / static_cast<double>(e.n);
  if (e.n < 2) return e;
  double ss = 0;
  for (double v : samples) ss += (v - e.mean) * (v - e.mean);
  e.se = std::sqrt(ss / static_cast<double>(e.n - 1) / static_cast<double>(e.n));
  return e;
}

Estimate batch_means(const std::vector<double>& series, int batches) {
  if (series.size() < static_cast<std::size_t>(2 * batches)) return mean_and_se(series);
  const std::size_t per = series.size() / batches;
  std::vector<double> means;
  for (int b = 0; b < batches; ++b) {
    double s = 0;
    for (std::size_t i = b * per; i < (b + 1) * per; ++i) s += series[i];
    means.push_back(s / static_cast<double>(per));
  }
  Estimate e = mean_and_se(means);
  double s = 0;
  for (double v : series) s += v;
  e.mean = s / static_cast<double>(series.size());
  e.n = series.size();
  return e;
}

FitResult fit_log_decay(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& se, double floor_se) {
  if (x.size() != y.size() || (!se.empty() && se.size() != y.size()))
    throw InputShapeError("fit inputs must have equal lengths");
  std::vector<double> xs, ls;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double mag = std::abs(y[i]);
    const double floor = se.empty() ? 0.0 : floor_se * se[i];
    if (mag > floor && mag > 0) {
      xs.push_back(x[i]);
      ls.push_back(std::log(mag));
    }
  }
  FitResult fit;
  fit.points = static_cast<int>(xs.size());
  if (fit.points < 3) return fit;
  const double n = fit.points;
  double mx = 0, my = 0;
  for (int i = 0; i < fit.points; ++i) {
    mx += xs[i];
    my += ls[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < fit.points; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ls[i] - my);
    syy += (ls[i] - my) * (ls[i] - my);
  }
  if (sxx == 0) return fit;
  const double slope = sxy / sxx;
  fit.intercept = my - slope * mx;
  for (int i = 0; i < fit.points; ++i) {
    const double r = ls[i] - (fit.intercept + slope * xs[i]);
    fit.residual += r * r;
  }
  fit.r_squared = syy > 0 ? 1.0 - fit.residual / syy : 1.0;
  fit.rate = std::exp(slope);
  fit.valid = fit.rate > 0 && fit.rate <= 1.0;
  return fit;
}

namespace {

// Runs `count` replicas over up to `threads` workers, one Engine per worker.
// `body(engine, replica_index)` must only write replica-indexed output.
template <class Body>
void for_replicas(const SimSetup& setup, std::uint64_t count, Body&& body) {
  const int workers = static_cast<int>(std::max<std::uint64_t>(
      1, std::min<std::uint64_t>(static_cast<std::uint64_t>(setup.threads), count)));
  auto work = [&](int w) {
    Engine engine(setup.rule, setup.torus, setup.noise);
    for (std::uint64_t i = count * w / workers; i < count * (w + 1) / workers; ++i) body(engine, i);
  };
  if (workers == 1) {
    work(0);
    return;
  }
  std::vector<std::jthread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work, w);
  work(0);
}

double minus_fraction(const LatticeState& s) {
  return static_cast<double>(s.count_minus()) / static_cast<double>(s.sites());
}

// Sum over sites of omega_x * omega_{nbr[x]}.
double pair_sum(const LatticeState& a, const LatticeState& b, const std::vector<std::uint64_t>& nbr) {
  long long equal = 0;
  for (std::uint64_t x = 0; x < nbr.size(); ++x) equal += a.plus(x) == b.plus(nbr[x]);
  return static_cast<double>(2 * equal - static_cast<long long>(nbr.size()));
}

double spin_mean(const LatticeState& s) { return s.magnetization(); }

}  // namespace

RunSummary minus_density_run(const SimSetup& setup, std::uint64_t steps, std::uint64_t burn_in,
                             std::uint64_t replicas) {
  if (replicas < 1) throw ConfigError("at least one replica required");
  if (burn_in > steps) throw ConfigError("burn-in exceeds step count");
  std::vector<std::vector<double>> series(replicas);
  for_replicas(setup, replicas, [&](const Engine& engine, std::uint64_t r) {
    const RngKey key = replicas == 1 ? RngKey{setup.seed} : replica_key(setup.seed, r);
    LatticeState cur = LatticeState::all_plus(setup.torus), next(setup.torus, false);
    auto& out = series[r];
    out.reserve(steps + 1);
    out.push_back(minus_fraction(cur));
    for (std::uint64_t t = 0; t < steps; ++t) {
      engine.step_into(cur, next, key, t);
      std::swap(cur, next);
      out.push_back(minus_fraction(cur));
    }
  });

  RunSummary summary;
  summary.steps = steps;
  summary.burn_in = burn_in;
  summary.replicas = replicas;
  summary.density.assign(steps + 1, 0.0);
  for (const auto& s : series)
    for (std::uint64_t t = 0; t <= steps; ++t) summary.density[t] += s[t];
  for (double& v : summary.density) v /= static_cast<double>(replicas);

  if (replicas == 1) {
    std::vector<double> tail(series[0].begin() + static_cast<long>(burn_in) + (steps > burn_in ? 1 : 0),
                             series[0].end());
    if (tail.empty()) tail.push_back(series[0].back());
    summary.stationary_density = batch_means(tail);
  } else {
    std::vector<double> per_replica;
    per_replica.reserve(replicas);
    for (const auto& s : series) {
      double acc = 0;
      std::uint64_t cnt = 0;
      for (std::uint64_t t = std::min(burn_in + 1, steps); t <= steps; ++t, ++cnt) acc += s[t];
      per_replica.push_back(acc / static_cast<double>(cnt));
    }
    summary.stationary_density = mean_and_se(per_replica);
  }
  return summary;
}

NoiseModel family_member(NoiseFamily family, double eps) {
  switch (family) {
    case NoiseFamily::Symmetric:
      return NoiseModel::symmetric(eps);
    case NoiseFamily::BiasedPlus:
      return NoiseModel::biased(eps, 0.0);
    case NoiseFamily::BiasedMinus:
      return NoiseModel::biased(0.0, eps);
  }
  throw ConfigError("unknown noise family");
}

std::vector<ScanRow> density_vs_epsilon_scan(const RuleSpec& rule, NoiseFamily family,
                                             const std::vector<double>& eps_grid,
                                             const Torus& torus, std::uint64_t steps,
                                             std::uint64_t burn_in, std::uint64_t seed,
                                             int threads) {
  if (!std::is_sorted(eps_grid.begin(), eps_grid.end()))
    throw ConfigError("eps grid must be sorted ascending");
  std::vector<ScanRow> rows;
  for (double eps : eps_grid) {
    SimSetup setup{rule, family_member(family, eps), torus, seed, threads};
    auto run = minus_density_run(setup, steps, burn_in);
    rows.push_back({eps, run.stationary_density});
  }
  return rows;
}

bool scan_monotone(const std::vector<ScanRow>& rows, double tolerance_se) {
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const auto& a = rows[i].density;
    const auto& b = rows[i + 1].density;
    if (b.mean < a.mean - tolerance_se * std::hypot(a.se, b.se)) return false;
  }
  return true;
}

namespace {

std::vector<std::uint64_t> neighbors_along(const Torus& torus, int axis, int distance) {
  Offset shift(torus.dimension(), 0);
  shift[axis] = distance;
  std::vector<std::uint64_t> out(torus.sites());
  for (std::uint64_t x = 0; x < torus.sites(); ++x) out[x] = torus.neighbor(x, shift);
  return out;
}

CorrelationPoint linearized(int sep, const std::vector<double>& joint, const std::vector<double>& a,
                            const std::vector<double>& b) {
  const auto ea = mean_and_se(a), eb = mean_and_se(b), ej = mean_and_se(joint);
  std::vector<double> influence(joint.size());
  for (std::size_t r = 0; r < joint.size(); ++r)
    influence[r] = joint[r] - eb.mean * a[r] - ea.mean * b[r];
  const auto ei = mean_and_se(influence);
  return {sep, ej.mean - ea.mean * eb.mean, ei.se, joint.size()};
}

FitResult fit_points(const std::vector<CorrelationPoint>& pts) {
  std::vector<double> x, y, se;
  for (const auto& p : pts) {
    if (p.separation <= 0) continue;
    x.push_back(p.separation);
    y.push_back(p.estimate);
    se.push_back(p.se);
  }
  return fit_log_decay(x, y, se, 2.0);
}

}  // namespace

CorrelationRun spatial_correlation(const SimSetup& setup, const std::vector<int>& distances,
                                   std::uint64_t replicas, std::uint64_t burn_in) {
  if (replicas < 2) throw ConfigError("covariance estimation needs at least two replicas");
  const Torus& torus = setup.torus;
  const int min_side = *std::min_element(torus.dims().begin(), torus.dims().end());
  for (int d : distances)
    if (d < 0 || 2 * d >= min_side) throw ConfigError("distance must be below min(dims)/2");
  const int dim = torus.dimension();
  std::vector<std::vector<std::uint64_t>> nbr;
  for (int d : distances)
    for (int a = 0; a < dim; ++a) nbr.push_back(neighbors_along(torus, a, d));

  const std::size_t nd = distances.size();
  std::vector<double> mean_spin(replicas);
  std::vector<std::vector<double>> joint(nd, std::vector<double>(replicas));
  for_replicas(setup, replicas, [&](const Engine& engine, std::uint64_t r) {
    const RngKey key = replica_key(setup.seed, r);
    LatticeState cur = LatticeState::all_plus(torus), next(torus, false);
    for (std::uint64_t t = 0; t < burn_in; ++t) {
      engine.step_into(cur, next, key, t);
      std::swap(cur, next);
    }
    mean_spin[r] = spin_mean(cur);
    for (std::size_t k = 0; k < nd; ++k) {
      double s = 0;
      for (int a = 0; a < dim; ++a) s += pair_sum(cur, cur, nbr[k * dim + a]);
      joint[k][r] = s / static_cast<double>(dim * torus.sites());
    }
  });

  CorrelationRun out;
  out.summary.steps = burn_in;
  out.summary.burn_in = burn_in;
  out.summary.replicas = replicas;
  for (std::size_t k = 0; k < nd; ++k)
    out.summary.correlations.push_back(linearized(distances[k], joint[k], mean_spin, mean_spin));
  out.fit = fit_points(out.summary.correlations);
  return out;
}

CorrelationRun temporal_autocorrelation(const SimSetup& setup, const std::vector<int>& lags,
                                        std::uint64_t replicas, std::uint64_t burn_in) {
  if (replicas < 2) throw ConfigError("covariance estimation needs at least two replicas");
  for (int l : lags)
    if (l < 0) throw ConfigError("lags must be nonnegative");
  const Torus& torus = setup.torus;
  const int max_lag = lags.empty() ? 0 : *std::max_element(lags.begin(), lags.end());
  std::vector<std::uint64_t> identity(torus.sites());
  for (std::uint64_t x = 0; x < identity.size(); ++x) identity[x] = x;

  const std::size_t nl = lags.size();
  std::vector<double> m0(replicas);
  std::vector<std::vector<double>> mk(nl, std::vector<double>(replicas)), joint = mk;
  for_replicas(setup, replicas, [&](const Engine& engine, std::uint64_t r) {
    const RngKey key = replica_key(setup.seed, r);
    LatticeState cur = LatticeState::all_plus(torus), next(torus, false);
    std::uint64_t t = 0;
    for (; t < burn_in; ++t) {
      engine.step_into(cur, next, key, t);
      std::swap(cur, next);
    }
    const LatticeState origin = cur;
    m0[r] = spin_mean(origin);
    for (int lag = 0; lag <= max_lag; ++lag) {
      for (std::size_t k = 0; k < nl; ++k) {
        if (lags[k] != lag) continue;
        mk[k][r] = spin_mean(cur);
        joint[k][r] = pair_sum(origin, cur, identity) / static_cast<double>(torus.sites());
      }
      if (lag < max_lag) {
        engine.step_into(cur, next, key, t++);
        std::swap(cur, next);
      }
    }
  });

  CorrelationRun out;
  out.summary.steps = burn_in + max_lag;
  out.summary.burn_in = burn_in;
  out.summary.replicas = replicas;
  for (std::size_t k = 0; k < nl; ++k)
    out.summary.correlations.push_back(linearized(lags[k], joint[k], m0, mk[k]));
  out.fit = fit_points(out.summary.correlations);
  return out;
}

std::string to_string(PhaseVerdict v) {
  switch (v) {
    case PhaseVerdict::Merged:
      return "MERGED";
    case PhaseVerdict::Separated:
      return "SEPARATED";
    case PhaseVerdict::Undecided:
      return "UNDECIDED";
    case PhaseVerdict::Inapplicable:
      return "INAPPLICABLE";
  }
  return "?";
}

bool flip_symmetric(const RuleSpec& rule, const NoiseModel& noise) {
  const LocalConfig all = static_cast<LocalConfig>(rule.table_size() - 1);
  for (LocalConfig c = 0; c <= all; ++c) {
    if (rule.output(c) == rule.output(all ^ c)) return false;
    if (noise.p(rule, c, Spin::Plus) != noise.p(rule, all ^ c, Spin::Minus)) return false;
  }
  return true;
}

DivergenceRun two_phase_divergence(const SimSetup& setup, std::uint64_t steps,
                                   std::uint64_t burn_in) {
  DivergenceRun out;
  if (!flip_symmetric(setup.rule, setup.noise)) return out;
  if (burn_in > steps) throw ConfigError("burn-in exceeds step count");
  Engine engine(setup.rule, setup.torus, setup.noise);
  engine.set_threads(setup.threads);
  const RngKey key{setup.seed};
  LatticeState plus = LatticeState::all_plus(setup.torus);
  LatticeState minus = LatticeState::all_minus(setup.torus);
  LatticeState next(setup.torus, false);
  auto record = [&](std::uint64_t t) {
    out.mag_plus.push_back(plus.magnetization());
    out.mag_minus.push_back(minus.magnetization());
    out.gap.push_back(out.mag_plus.back() - out.mag_minus.back());
    if (out.coalesced_at < 0 && plus == minus) out.coalesced_at = static_cast<long long>(t);
  };
  record(0);
  for (std::uint64_t t = 0; t < steps; ++t) {
    engine.step_into(plus, next, key, t);
    std::swap(plus, next);
    engine.step_into(minus, next, key, t);
    std::swap(minus, next);
    record(t + 1);
  }
  std::vector<double> tail(out.gap.begin() + static_cast<long>(std::min(burn_in + 1, steps)),
                           out.gap.end());
  out.post_burn_in_gap = batch_means(tail);
  const double mean = out.post_burn_in_gap.mean, se = out.post_burn_in_gap.se;
  if (std::abs(mean) <= 3.0 * se)
    out.verdict = PhaseVerdict::Merged;
  else if (std::abs(mean) > 10.0 * se)
    out.verdict = PhaseVerdict::Separated;
  else
    out.verdict = PhaseVerdict::Undecided;
  return out;
}

}  // namespace toomlab::stats

namespace toomlab::stats {

FitResult fit_tv_curve(const std::vector<double>& tv, int from, double floor) {
  std::vector<double> x, y;
  for (std::size_t n = std::max(from, 0); n < tv.size(); ++n) {
    if (!(tv[n] > floor)) break;
    x.push_back(static_cast<double>(n));
    y.push_back(tv[n]);
  }
  return fit_log_decay(x, y);
}

}  // namespace toomlab::stats
