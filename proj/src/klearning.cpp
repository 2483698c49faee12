#include "klearn/klearning.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace klearn {

Temperature::Temperature(double tau) : tau_(tau) {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("temperature must be positive and finite, got " +
                                std::to_string(tau));
}

Temperature schedule_tau(std::size_t t, double sigma, std::size_t horizon, std::size_t actions,
                         std::size_t state_count) {
  if (t < 1) throw std::invalid_argument("schedule_tau: episode index starts at 1");
  if (actions < 2) throw std::invalid_argument("schedule_tau: need at least two actions");
  if (horizon < 1 || state_count < 1) throw std::invalid_argument("schedule_tau: empty MDP");
  const double L = static_cast<double>(horizon);
  const double A = static_cast<double>(actions);
  const double X = static_cast<double>(state_count);
  const double td = static_cast<double>(t);
  return Temperature(std::sqrt((sigma * sigma + L * L) * A * X * (1.0 + std::log(td)) /
                               (4.0 * td * L * std::log(A))));
}

Temperature bandit_schedule_tau(std::size_t t, double sigma, std::size_t actions) {
  if (t < 1) throw std::invalid_argument("bandit_schedule_tau: episode index starts at 1");
  if (actions < 2) throw std::invalid_argument("bandit_schedule_tau: need at least two arms");
  const double A = static_cast<double>(actions);
  const double td = static_cast<double>(t);
  return Temperature(
      std::sqrt(sigma * sigma * A * (1.0 + std::log(td)) / (4.0 * td * std::log(A))));
}

PosteriorSummary::PosteriorSummary(const BeliefState& belief)
    : layout(belief.layout()),
      rho(belief.rho().begin(), belief.rho().end()),
      mean(layout.pair_count()),
      curvature(layout.pair_count()),
      transition(belief.expected_transitions()) {
  for (std::size_t s = 0; s < layout.state_count(); ++s)
    for (std::size_t a = 0; a < layout.actions(); ++a) {
      mean[layout.pair(s, a)] = belief.posterior_mean(s, a);
      curvature[layout.pair(s, a)] = belief.inflated_curvature(s, a);
    }
}

PosteriorSummary::PosteriorSummary(Layout layout_, std::vector<double> rho_,
                                   std::vector<double> mean_, std::vector<double> curvature_,
                                   std::vector<double> transition_)
    : layout(std::move(layout_)),
      rho(std::move(rho_)),
      mean(std::move(mean_)),
      curvature(std::move(curvature_)),
      transition(std::move(transition_)) {
  if (rho.size() != layout.layer_size(0) || mean.size() != layout.pair_count() ||
      curvature.size() != layout.pair_count())
    throw ValidationError("posterior summary: table sizes do not match layout");
  validate_transition(layout, transition);
}

namespace {

// Soft values tau log sum exp(K[s,.]/tau) for every state of layer l.
void layer_soft_values(const Layout& lay, std::span<const double> k, double tau, std::size_t l,
                       std::vector<double>& out) {
  const std::size_t A = lay.actions();
  out.resize(lay.layer_size(l));
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = soft_max_value(k.subspan(lay.global(l, i) * A, A), tau);
}

// Entry (s,a) of B(tau, K_next) given the next layer's soft values.
double backup_entry(const PosteriorSummary& m, std::size_t s, std::size_t a, double tau,
                    const std::vector<double>& next_soft) {
  const std::size_t pair = m.layout.pair(s, a);
  double k = m.mean[pair] + m.delta(pair, tau);
  const std::size_t n = m.layout.successor_count(s);
  if (n > 0) {
    const double* p = m.transition.data() + m.layout.row_offset(s, a);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += p[j] * next_soft[j];
    k += acc;
  }
  return k;
}

void check_finite(std::span<const double> k) {
  for (double x : k)
    if (!std::isfinite(x)) throw NumericError("k_backup: non-finite K-value (corrupted belief?)");
}

}  // namespace

std::vector<double> k_backup(const PosteriorSummary& model, Temperature tau) {
  const Layout& lay = model.layout;
  const double t = tau.value();
  std::vector<double> k(lay.pair_count());
  std::vector<double> next_soft;
  for (std::size_t l = lay.horizon(); l-- > 0;) {
    if (l + 1 < lay.horizon()) layer_soft_values(lay, k, t, l + 1, next_soft);
    for (std::size_t s = lay.layer_begin(l); s < lay.layer_end(l); ++s)
      for (std::size_t a = 0; a < lay.actions(); ++a)
        k[lay.pair(s, a)] = backup_entry(model, s, a, t, next_soft);
  }
  check_finite(k);
  return k;
}

std::vector<double> k_backup(const BeliefState& belief, Temperature tau) {
  return k_backup(PosteriorSummary(belief), tau);
}

double bellman_residual(const PosteriorSummary& model, std::span<const double> k,
                        Temperature tau) {
  const Layout& lay = model.layout;
  if (k.size() != lay.pair_count()) throw ValidationError("bellman_residual: K has wrong size");
  double worst = 0.0;
  std::vector<double> next_soft;
  for (std::size_t l = 0; l < lay.horizon(); ++l) {
    if (l + 1 < lay.horizon()) layer_soft_values(lay, k, tau.value(), l + 1, next_soft);
    for (std::size_t s = lay.layer_begin(l); s < lay.layer_end(l); ++s)
      for (std::size_t a = 0; a < lay.actions(); ++a) {
        const double b = backup_entry(model, s, a, tau.value(), next_soft);
        worst = std::max(worst, std::abs(k[lay.pair(s, a)] - b));
      }
  }
  return worst;
}

Policy boltzmann_policy(std::span<const double> k, std::size_t actions, Temperature tau) {
  if (actions == 0 || k.size() % actions != 0)
    throw ValidationError("boltzmann_policy: K size is not a multiple of the action count");
  Policy pi(k.size() / actions, actions);
  for (std::size_t s = 0; s < pi.state_count(); ++s)
    softmax(k.subspan(s * actions, actions), tau.value(), pi.row(s));
  return pi;
}

double variational_value(std::span<const double> k_row, Temperature tau) {
  return soft_max_value(k_row, tau.value());
}

double variational_gap(std::span<const double> k_row, Temperature tau,
                       std::span<const double> policy_row) {
  if (k_row.size() != policy_row.size())
    throw std::invalid_argument("variational_gap: row sizes differ");
  double lin = 0.0;
  for (std::size_t a = 0; a < k_row.size(); ++a)
    if (policy_row[a] > 0.0) lin += policy_row[a] * k_row[a];
  return variational_value(k_row, tau) - (lin + tau.value() * entropy(policy_row));
}

namespace {

double start_value(const PosteriorSummary& model, std::span<const double> k, double tau) {
  const std::size_t A = model.layout.actions();
  double obj = 0.0;
  for (std::size_t i = 0; i < model.rho.size(); ++i)
    if (model.rho[i] > 0.0) obj += model.rho[i] * soft_max_value(k.subspan(i * A, A), tau);
  return obj;
}

}  // namespace

double objective(const PosteriorSummary& model, Temperature tau) {
  const auto k = k_backup(model, tau);
  return start_value(model, k, tau.value());
}

double objective(const BeliefState& belief, Temperature tau) {
  return objective(PosteriorSummary(belief), tau);
}

double delta_bonus(const BeliefState& belief, std::size_t s, std::size_t a, Temperature tau) {
  const double t = tau.value();
  return t * belief.inflated_cgf(s, a, 1.0 / t) - belief.posterior_mean(s, a);
}

double phi(const PosteriorSummary& model, const OccupancyMeasure& occ, Temperature tau) {
  const Layout& lay = model.layout;
  const std::size_t A = lay.actions();
  if (occ.lambda.size() != lay.pair_count()) throw ValidationError("phi: occupancy size");
  const double t = tau.value();
  std::vector<double> cond(A);
  double total = 0.0;
  for (std::size_t s = 0; s < lay.state_count(); ++s) {
    double mass = 0.0;
    double bonus = 0.0;
    for (std::size_t a = 0; a < A; ++a) {
      const double lam = occ.lambda[lay.pair(s, a)];
      mass += lam;
      bonus += lam * model.delta(lay.pair(s, a), t);
    }
    if (mass > 0.0) {
      for (std::size_t a = 0; a < A; ++a) cond[a] = occ.lambda[lay.pair(s, a)] / mass;
      total += mass * t * entropy(cond);
    }
    total += bonus;
  }
  return total;
}

Certificate regret_certificate(const PosteriorSummary& model, const Policy& policy,
                               Temperature tau) {
  const Layout& lay = model.layout;
  validate_policy(lay, policy);
  const std::size_t A = lay.actions();
  const double t = tau.value();
  Certificate cert;
  cert.delta.resize(lay.pair_count());
  for (std::size_t i = 0; i < cert.delta.size(); ++i) cert.delta[i] = model.delta(i, t);

  cert.big_delta.assign(lay.state_count(), 0.0);
  for (std::size_t l = lay.horizon(); l-- > 0;) {
    for (std::size_t s = lay.layer_begin(l); s < lay.layer_end(l); ++s) {
      double d = t * entropy(policy.row(s));
      const std::size_t n = lay.successor_count(s);
      for (std::size_t a = 0; a < A; ++a) {
        double inner = cert.delta[lay.pair(s, a)];
        if (n > 0) {
          const double* p = model.transition.data() + lay.row_offset(s, a);
          const std::size_t base = lay.layer_begin(l + 1);
          for (std::size_t j = 0; j < n; ++j) inner += p[j] * cert.big_delta[base + j];
        }
        d += policy(s, a) * inner;
      }
      cert.big_delta[s] = d;
    }
  }
  for (std::size_t i = 0; i < model.rho.size(); ++i)
    cert.expected_delta += model.rho[i] * cert.big_delta[i];

  cert.occupancy = occupancy(lay, model.transition, model.rho, policy);
  cert.phi = phi(model, cert.occupancy, tau);
  const double scale = std::max(1.0, std::abs(cert.phi));
  if (std::abs(cert.expected_delta - cert.phi) > 1e-9 * scale)
    throw NumericError("regret_certificate: E Delta and Phi disagree (" +
                       std::to_string(cert.expected_delta) + " vs " + std::to_string(cert.phi) +
                       ")");
  return cert;
}

KSolution solve_k(const PosteriorSummary& model, Temperature tau) {
  KSolution sol;
  sol.tau = tau;
  sol.k = k_backup(model, tau);
  sol.policy = boltzmann_policy(sol.k, model.layout.actions(), tau);
  sol.objective = start_value(model, sol.k, tau.value());
  sol.certificate = regret_certificate(model, sol.policy, tau);
  return sol;
}

KSolution optimize_tau(const PosteriorSummary& model, const LineSearchOptions& opts) {
  auto f = [&model](double tau) { return objective(model, Temperature(tau)); };
  const LineSearchResult res = golden_section_log(f, opts);
  KSolution sol = solve_k(model, Temperature(res.argmin));
  sol.boundary_optimum = res.boundary;
  return sol;
}

KSolution optimize_tau(const BeliefState& belief, const LineSearchOptions& opts) {
  return optimize_tau(PosteriorSummary(belief), opts);
}

DualDiagnostic dual_diagnostic(const PosteriorSummary& model, const KSolution& sol,
                               const LineSearchOptions& opts) {
  DualDiagnostic out;
  out.occupancy = occupancy(model.layout, model.transition, model.rho, sol.policy);
  double linear = 0.0;
  for (std::size_t i = 0; i < out.occupancy.lambda.size(); ++i)
    linear += out.occupancy.lambda[i] * model.mean[i];
  auto f = [&](double tau) { return phi(model, out.occupancy, Temperature(tau)); };
  const LineSearchResult inner = golden_section_log(f, opts);
  out.inner_tau = inner.argmin;
  out.inner_boundary = inner.boundary;
  out.dual_value = linear + inner.value;
  out.gap = sol.objective - out.dual_value;
  return out;
}

Temperature scheduled_tau(const BeliefState& belief, ScheduleKind kind) {
  if (kind == ScheduleKind::automatic)
    kind = belief.is_bandit() ? ScheduleKind::bandit : ScheduleKind::mdp;
  if (kind == ScheduleKind::bandit)
    return bandit_schedule_tau(belief.episode(), belief.noise_std(), belief.actions());
  return schedule_tau(belief.episode(), belief.noise_std(), belief.horizon(), belief.actions(),
                      belief.state_count());
}

KSolution klearning_episode(const BeliefState& belief, TauMode mode, ScheduleKind kind,
                            const LineSearchOptions& opts) {
  const PosteriorSummary model(belief);
  if (mode == TauMode::optimal) return optimize_tau(model, opts);
  return solve_k(model, scheduled_tau(belief, kind));
}

}  // namespace klearn
