#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "klearn/belief.hpp"
#include "klearn/mdp.hpp"
#include "klearn/numerics.hpp"

namespace klearn {

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Risk-seeking temperature; strictly positive and finite.
class Temperature {
 public:
  explicit Temperature(double tau);
  double value() const { return tau_; }

 private:
  double tau_;
};

// Anytime schedule for episodic MDPs:
//   tau_t = sqrt((sigma^2 + L^2) A |X| (1 + log t) / (4 t L log A)).
Temperature schedule_tau(std::size_t t, double sigma, std::size_t horizon, std::size_t actions,
                         std::size_t state_count);
// Bandit version: tau_t = sqrt(sigma^2 A (1 + log t) / (4 t log A)).
Temperature bandit_schedule_tau(std::size_t t, double sigma, std::size_t actions);

// Snapshot of what the K-learning operator reads from a belief at the start of an episode.
// The inflated CGF of a Gaussian posterior is m beta + c beta^2 / 2 with
// c = v + (L - l)^2 / (n + 1), so tau * G(1/tau) = m + c / (2 tau).
struct PosteriorSummary {
  Layout layout;
  std::vector<double> rho;
  std::vector<double> mean;        // E^t mu[s,a]
  std::vector<double> curvature;   // c[s,a]
  std::vector<double> transition;  // E^t P, flat transition layout

  explicit PosteriorSummary(const BeliefState& belief);
  PosteriorSummary(Layout layout, std::vector<double> rho, std::vector<double> mean,
                   std::vector<double> curvature, std::vector<double> transition);

  // delta(tau) = tau * G_inflated(1/tau) - E mu.
  double delta(std::size_t pair, double tau) const { return curvature[pair] / (2.0 * tau); }
};

// K_{L+1} = 0 and, backwards over layers,
//   K[s,a] = tau G~(1/tau) + sum_s' E[P](s'|s,a) tau log sum_a' exp(K[s',a'] / tau).
std::vector<double> k_backup(const PosteriorSummary& model, Temperature tau);
std::vector<double> k_backup(const BeliefState& belief, Temperature tau);

// Largest |K - B(tau, K_next)| over all entries.
double bellman_residual(const PosteriorSummary& model, std::span<const double> k,
                        Temperature tau);

Policy boltzmann_policy(std::span<const double> k, std::size_t actions, Temperature tau);

// tau log sum exp(K/tau), and its gap to pi.K + tau H(pi) (nonnegative, zero iff Boltzmann).
double variational_value(std::span<const double> k_row, Temperature tau);
double variational_gap(std::span<const double> k_row, Temperature tau,
                       std::span<const double> policy_row);

// E_{s_1} tau log sum_a exp(K[s_1, a] / tau) with K = k_backup(tau).
double objective(const PosteriorSummary& model, Temperature tau);
double objective(const BeliefState& belief, Temperature tau);

double delta_bonus(const BeliefState& belief, std::size_t s, std::size_t a, Temperature tau);

// Per-episode regret-bound certificate.
struct Certificate {
  std::vector<double> delta;      // delta[s,a] at the episode's tau
  std::vector<double> big_delta;  // Delta[s], backward recursion with Delta_{L+1} = 0
  OccupancyMeasure occupancy;     // under the policy and expected dynamics
  double phi = 0.0;               // Phi(tau, lambda)
  double expected_delta = 0.0;    // E_{s_1} Delta[s_1]
};

// Phi(tau, lambda) = sum_l sum_{s,a} lambda[s,a] (tau H(pi(lambda_s)) + delta[s,a](tau)),
// with pi(lambda_s) = lambda_s / sum_b lambda[s,b].
double phi(const PosteriorSummary& model, const OccupancyMeasure& occ, Temperature tau);

// Throws NumericError if E_{s_1} Delta and Phi disagree by more than 1e-9 (relative).
Certificate regret_certificate(const PosteriorSummary& model, const Policy& policy,
                               Temperature tau);

struct KSolution {
  std::vector<double> k;
  Temperature tau{1.0};
  Policy policy;
  double objective = 0.0;
  Certificate certificate;
  bool boundary_optimum = false;
};

// Builds K, the Boltzmann policy, objective and certificate at a given temperature.
KSolution solve_k(const PosteriorSummary& model, Temperature tau);

// Minimizes objective(tau) by golden-section search on log tau.
KSolution optimize_tau(const PosteriorSummary& model, const LineSearchOptions& opts = {});
KSolution optimize_tau(const BeliefState& belief, const LineSearchOptions& opts = {});

struct DualDiagnostic {
  OccupancyMeasure occupancy;
  double dual_value = 0.0;  // sum lambda E mu + min_tau Phi(tau, lambda)
  double inner_tau = 0.0;   // minimizer of Phi(., lambda)
  bool inner_boundary = false;
  double gap = 0.0;  // primal objective - dual value
};

DualDiagnostic dual_diagnostic(const PosteriorSummary& model, const KSolution& sol,
                               const LineSearchOptions& opts = {});

enum class TauMode { scheduled, optimal };
enum class ScheduleKind { automatic, mdp, bandit };

// Temperature schedule for the belief's current episode. automatic picks the bandit
// schedule for single-state one-step beliefs and the MDP schedule otherwise.
Temperature scheduled_tau(const BeliefState& belief, ScheduleKind kind = ScheduleKind::automatic);

// One episode of K-learning: the returned solution's policy is the one to execute.
KSolution klearning_episode(const BeliefState& belief, TauMode mode,
                            ScheduleKind kind = ScheduleKind::automatic,
                            const LineSearchOptions& opts = {});

}  // namespace klearn
