#pragma once

// Geodesic Monte Carlo: HMC on an embedded manifold whose integrator
// alternates half-step velocity kicks (projected gradient of the log
// density) with exact geodesic flow.
//
// Hamiltonian: H(q, v) = -log π(q)/T + ½‖v‖². Temperature scales only the
// potential; the kinetic term is never tempered.

#include "gmc/geodesic.hpp"
#include "gmc/target.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace gmc {

struct GmcConfig {
  double epsilon = 0.1;
  int n_steps = 10;
  double temperature = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Raised when the log-density gradient is not finite at the kick location.
class KickError : public Error {
 public:
  KickError(const std::string& what, Eigen::VectorXd q) : Error(what), q_(std::move(q)) {}
  const Eigen::VectorXd& position() const { return q_; }

 private:
  Eigen::VectorXd q_;
};

struct ChainState {
  PhaseStated phase;
  double log_density = 0.0;
  Rng rng;
};

/// Starts a chain at q (checked against the manifold, then re-projected) with v = 0.
ChainState make_chain(const Target& target, const Eigen::VectorXd& q, std::uint64_t seed);

struct ProposalOutcome {
  ChainState chain;
  bool accepted = false;
  double delta_h = 0.0;
  /// ΔH or a gradient along the trajectory was non-finite; the proposal was rejected.
  bool divergent = false;
};

struct RunRecord {
  /// One draw per row, in the coordinates of the sampled space.
  Eigen::MatrixXd samples;
  std::size_t accept_count = 0;
  std::size_t total = 0;
  std::size_t divergent_count = 0;
  std::vector<double> delta_h;
  GmcConfig config;

  double accept_rate() const { return total == 0 ? 0.0 : double(accept_count) / double(total); }
};

/// v ← P_q(v + dt·∇log π(q)/T); q is untouched.
PhaseStated kick(const Target& target, const PhaseStated& s, double dt, double inverse_temperature = 1.0);

/// kick(ε/2), geodesic flow for ε, kick(ε/2).
PhaseStated splitting_step(const Target& target, const PhaseStated& s, double epsilon,
                           double inverse_temperature = 1.0);

/// n_steps splitting steps of size epsilon.
PhaseStated integrate_trajectory(const Target& target, PhaseStated s, double epsilon, int n_steps,
                                 double inverse_temperature = 1.0);

double hamiltonian(double log_density, const Eigen::VectorXd& v, double inverse_temperature = 1.0);

/// One GMC transition: full momentum refresh, integration, Metropolis test.
ProposalOutcome propose_and_accept(const Target& target, ChainState chain, const GmcConfig& cfg);

/// Runs n_burnin discarded transitions, then records every `thin`-th state
/// until n_draws are stored. Acceptance statistics cover the recorded phase.
RunRecord sample(const Target& target, const GmcConfig& cfg, std::size_t n_draws, std::size_t n_burnin,
                 const Eigen::VectorXd& initial, std::size_t thin = 1);

/// GMC for a density on the unit ball, run on S^D through the hemisphere lift.
/// Samples are returned in ball coordinates (n_draws x D).
RunRecord sample_on_ball(const BallTarget& ball, const GmcConfig& cfg, std::size_t n_draws,
                         std::size_t n_burnin, const Eigen::VectorXd& initial_theta, std::size_t thin = 1);

struct TemperingLadder {
  std::vector<double> temperatures{1.0};
  std::size_t swap_interval = 1;

  void validate() const;
};

struct SwapStats {
  /// Entry i refers to the pair (i, i+1) of the ladder.
  std::vector<std::size_t> attempts;
  std::vector<std::size_t> accepts;

  double rate(std::size_t pair) const {
    return attempts[pair] == 0 ? 0.0 : double(accepts[pair]) / double(attempts[pair]);
  }
};

struct TemperingRecord {
  RunRecord cold;
  SwapStats swaps;
};

/// Swap acceptance probability between rungs with inverse temperatures
/// beta_i, beta_j holding states of log-density log_pi_i, log_pi_j.
double swap_probability(double beta_i, double beta_j, double log_pi_i, double log_pi_j);

/// One GMC chain per rung (cfg.temperature is ignored); every swap_interval
/// iterations each adjacent pair attempts an exchange of states. The cold
/// chain uses cfg.seed exactly as sample() does, so a one-rung ladder
/// reproduces sample() draw for draw.
TemperingRecord parallel_tempering(const Target& target, const TemperingLadder& ladder, const GmcConfig& cfg,
                                   std::size_t n_draws, std::size_t n_burnin, const Eigen::VectorXd& initial,
                                   std::size_t thin = 1);

}  // namespace gmc
