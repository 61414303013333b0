#include "bankflow/interaction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "bankflow/errors.hpp"
#include "bankflow/number.hpp"
#include "bankflow/rk4.hpp"

namespace bankflow {

void InteractionHistory::append(double t, InteractionLevels m, InteractionLevels dm) {
  if (!samples_.empty() && !(t > samples_.back().t)) {
    throw std::logic_error("history times must be strictly increasing");
  }
  samples_.push_back({t, m, dm});
}

InteractionLevels InteractionHistory::at(double s) const {
  if (s <= 0.0 || samples_.empty()) return pre_;
  const auto& last = samples_.back();
  if (s > last.t) {
    if (s - last.t > 1e-9 * std::max(1.0, std::abs(last.t))) {
      throw std::logic_error("history queried ahead of the integrator (lag shorter than step)");
    }
    if (samples_.size() == 1) return last.m;
  }
  if (s < samples_.front().t) {
    throw std::logic_error("history queried behind the pruned window");
  }

  // First sample strictly after s, clamped so that [lo, hi] is a stored piece.
  auto it = std::upper_bound(samples_.begin(), samples_.end(), s,
                             [](double v, const Sample& x) { return v < x.t; });
  if (it == samples_.end()) --it;
  if (it == samples_.begin()) return it->m;
  const Sample& hi = *it;
  const Sample& lo = *(it - 1);
  if (s == lo.t) return lo.m;

  const double h = hi.t - lo.t;
  const double th = (s - lo.t) / h;
  const double th2 = th * th;
  const double th3 = th2 * th;
  const double h00 = 2.0 * th3 - 3.0 * th2 + 1.0;
  const double h10 = th3 - 2.0 * th2 + th;
  const double h01 = -2.0 * th3 + 3.0 * th2;
  const double h11 = th3 - th2;
  auto blend = [&](double y0, double d0, double y1, double d1) {
    return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
  };
  return {blend(lo.m.m_B, lo.dm.m_B, hi.m.m_B, hi.dm.m_B),
          blend(lo.m.m_C, lo.dm.m_C, hi.m.m_C, hi.dm.m_C)};
}

void InteractionHistory::prune_before(double earliest) {
  while (samples_.size() >= 2 && samples_[1].t <= earliest) samples_.pop_front();
}

InteractionLevels interaction_rhs(const InteractionConfig& c, double t,
                                  const HistoryLookup& lookup) {
  auto delayed = [&](double lag) -> InteractionLevels {
    const double s = t - lag;
    return s <= 0.0 ? InteractionLevels{c.N_B, c.N_C} : lookup(s);
  };
  const InteractionLevels now = lookup(t);
  const double m_C_tau = delayed(c.tau_C).m_C;
  const double m_B_tau = delayed(c.tau_B).m_B;
  const double m_B_info = delayed(c.delta_B).m_B;
  const double m_C_info = delayed(c.delta_C).m_C;

  if (!(m_B_info > kSingularityGuard)) {
    throw SingularityError("bank side: m_B(t - delta_B) = " + format_number(m_B_info) +
                           " at t = " + format_number(t));
  }
  if (!(m_C_info > kSingularityGuard)) {
    throw SingularityError("client side: m_C(t - delta_C) = " + format_number(m_C_info) +
                           " at t = " + format_number(t));
  }
  return {-c.p_C * c.lambda_C * m_C_tau * now.m_B / m_B_info,
          -c.p_B * c.lambda_B * m_B_tau * now.m_C / m_C_info};
}

std::vector<double> interaction_breakpoints(const InteractionConfig& c, double t_end) {
  std::vector<double> lags;
  for (double lag : {c.tau_B, c.tau_C, c.delta_B, c.delta_C}) {
    if (lag > 0.0 && std::find(lags.begin(), lags.end(), lag) == lags.end()) lags.push_back(lag);
  }
  std::vector<double> points{0.0};
  // Sums of up to three lags, repetition allowed.
  std::vector<double> frontier{0.0};
  for (int order = 1; order <= 3; ++order) {
    std::vector<double> next;
    for (double base : frontier) {
      for (double lag : lags) {
        const double p = base + lag;
        if (p <= t_end) next.push_back(p);
      }
    }
    points.insert(points.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  std::sort(points.begin(), points.end());
  const double tol = 1e-12 * std::max(1.0, t_end);
  std::vector<double> unique;
  for (double p : points) {
    if (unique.empty() || p - unique.back() > tol) unique.push_back(p);
  }
  return unique;
}

namespace {

constexpr double kMaxDecayPerStep = 1.0;

}  // namespace

InteractionTrajectory integrate_interaction(const InteractionConfig& config, double t_end,
                                            double dt, std::span<const double> output_grid) {
  require_valid(config);
  if (!(std::isfinite(t_end) && t_end > 0.0)) throw DomainError("t_end must be > 0");
  if (!(std::isfinite(dt) && dt > 0.0 && dt <= t_end)) {
    throw DomainError("dt must satisfy 0 < dt <= t_end");
  }
  double min_lag = t_end;
  for (double lag : {config.tau_B, config.tau_C, config.delta_B, config.delta_C}) {
    if (lag > 0.0) min_lag = std::min(min_lag, lag);
  }
  if (dt > min_lag) {
    throw DomainError("dt = " + format_number(dt) + " exceeds the smallest positive lag " +
                      format_number(min_lag));
  }
  require_valid_grid(output_grid, t_end);

  // Step boundaries: breakpoints merged with grid times; grid times win ties.
  struct Boundary {
    double t;
    bool output;
  };
  std::vector<Boundary> bounds;
  for (double g : output_grid) bounds.push_back({g, true});
  const double t_last = output_grid.back();
  for (double b : interaction_breakpoints(config, t_last)) bounds.push_back({b, false});
  std::sort(bounds.begin(), bounds.end(), [](const Boundary& a, const Boundary& b) {
    return a.t < b.t || (a.t == b.t && a.output > b.output);
  });
  const double tol = 1e-12 * std::max(1.0, t_last);
  std::vector<Boundary> merged;
  for (const auto& b : bounds) {
    if (!merged.empty() && b.t - merged.back().t <= tol && !(b.output && merged.back().output)) {
      if (b.output && !merged.back().output) merged.back() = b;
      continue;
    }
    merged.push_back(b);
  }

  InteractionState state{0.0, {config.N_B, config.N_C}, InteractionHistory({config.N_B, config.N_C})};
  const double keep_span = config.max_lag() + dt;

  // Stage evaluation: the stage value answers lookups at the stage time,
  // the history answers everything earlier.
  auto rhs = [&](double ts, std::span<const double> y, std::span<double> dydt) {
    const InteractionLevels current{y[0], y[1]};
    auto lookup = [&](double s) { return s >= ts ? current : state.history.at(s); };
    const auto d = interaction_rhs(config, ts, lookup);
    dydt[0] = d.m_B;
    dydt[1] = d.m_C;
  };

  std::array<double, 2> y{config.N_B, config.N_C};
  std::array<double, 2> k1{}, next{};
  rhs(0.0, y, k1);
  state.history.append(0.0, {y[0], y[1]}, {k1[0], k1[1]});

  InteractionTrajectory out;
  out.times.assign(output_grid.begin(), output_grid.end());
  out.m_B.reserve(output_grid.size());
  out.m_C.reserve(output_grid.size());
  out.m_B.push_back(y[0]);
  out.m_C.push_back(y[1]);

  for (std::size_t b = 1; b < merged.size(); ++b) {
    rk4::cover_interval(merged[b - 1].t, merged[b].t, dt, [&](double t, double t_next) {
      const double h = t_next - t;
      for (int side = 0; side < 2; ++side) {
        // Both equations read dm/dt = -a(t) m(t). Once h * a passes 1 the
        // level is collapsing faster than the step can follow, and the
        // collapse only feeds on itself through the delayed denominator.
        if (h * std::abs(k1[side]) > kMaxDecayPerStep * y[side]) {
          throw SingularityError(std::string(side == 0 ? "bank side: m_B" : "client side: m_C") +
                                 " = " + format_number(y[side]) + " is collapsing at t = " +
                                 format_number(t) + " (relative decay rate " +
                                 format_number(std::abs(k1[side]) / y[side]) +
                                 " per unit time is beyond dt = " + format_number(h) + ")");
        }
      }
      rk4::step(rhs, t, y, k1, h, next);
      for (int side = 0; side < 2; ++side) {
        if (!std::isfinite(next[side])) {
          throw NumericError(std::string("non-finite ") + (side == 0 ? "m_B" : "m_C") +
                             " at t = " + format_number(t_next));
        }
        if (next[side] < 0.0 || next[side] > y[side]) {
          throw NumericError(std::string(side == 0 ? "m_B" : "m_C") + " moved from " +
                             format_number(y[side]) + " to " + format_number(next[side]) +
                             " at t = " + format_number(t_next) + "; the step is unstable");
        }
      }
      y = next;
      state.t = t_next;
      state.m = {y[0], y[1]};
      rhs(t_next, y, k1);
      state.history.append(t_next, state.m, {k1[0], k1[1]});
      state.history.prune_before(t_next - keep_span);
    });
    if (merged[b].output) {
      out.m_B.push_back(y[0]);
      out.m_C.push_back(y[1]);
    }
  }
  return out;
}

}  // namespace bankflow
