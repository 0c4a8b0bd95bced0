#include "gmc/sampler.hpp"

#include "gmc/transforms.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace gmc {

void GmcConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ParameterError("epsilon: must be > 0");
  if (n_steps < 1) throw ParameterError("n_steps: must be >= 1");
  if (!(temperature >= 1.0) || !std::isfinite(temperature)) throw ParameterError("temperature: must be >= 1");
}

void TemperingLadder::validate() const {
  if (temperatures.empty()) throw ParameterError("temperatures: ladder is empty");
  if (temperatures.front() != 1.0) throw ParameterError("temperatures: first rung must be exactly 1");
  for (std::size_t i = 1; i < temperatures.size(); ++i) {
    if (!(temperatures[i] > temperatures[i - 1]) || !std::isfinite(temperatures[i])) {
      throw ParameterError("temperatures: must be strictly ascending and finite");
    }
  }
  if (swap_interval < 1) throw ParameterError("swap_interval: must be >= 1");
}

ChainState make_chain(const Target& target, const Eigen::VectorXd& q, std::uint64_t seed) {
  require_on_manifold(target.manifold, q);
  ChainState chain;
  chain.phase.q = retract_point(target.manifold, q);
  chain.phase.v = Eigen::VectorXd::Zero(q.size());
  chain.log_density = target.log_density(chain.phase.q);
  if (!std::isfinite(chain.log_density)) {
    throw InvalidPointError("initial point has non-finite log-density under " + target.name);
  }
  chain.rng.seed(seed);
  return chain;
}

PhaseStated kick(const Target& target, const PhaseStated& s, double dt, double inverse_temperature) {
  const Eigen::VectorXd g = target.gradient(s.q);
  if (!g.allFinite()) throw KickError("kick: non-finite gradient of " + target.name, s.q);
  return {s.q, project_to_tangent(target.manifold, s.q, s.v + (dt * inverse_temperature) * g)};
}

PhaseStated splitting_step(const Target& target, const PhaseStated& s, double epsilon,
                           double inverse_temperature) {
  PhaseStated out = kick(target, s, epsilon / 2, inverse_temperature);
  out = geodesic_flow(target.manifold, out, epsilon);
  return kick(target, out, epsilon / 2, inverse_temperature);
}

PhaseStated integrate_trajectory(const Target& target, PhaseStated s, double epsilon, int n_steps,
                                 double inverse_temperature) {
  for (int i = 0; i < n_steps; ++i) s = splitting_step(target, s, epsilon, inverse_temperature);
  return s;
}

double hamiltonian(double log_density, const Eigen::VectorXd& v, double inverse_temperature) {
  return -inverse_temperature * log_density + 0.5 * v.squaredNorm();
}

ProposalOutcome propose_and_accept(const Target& target, ChainState chain, const GmcConfig& cfg) {
  const double beta = 1.0 / cfg.temperature;
  chain.phase.v = sample_tangent_gaussian(target.manifold, chain.phase.q, chain.rng);
  const double h0 = hamiltonian(chain.log_density, chain.phase.v, beta);

  ProposalOutcome out;
  PhaseStated proposal;
  double proposal_log_density = -std::numeric_limits<double>::infinity();
  try {
    proposal = integrate_trajectory(target, chain.phase, cfg.epsilon, cfg.n_steps, beta);
    proposal_log_density = target.log_density(proposal.q);
    out.delta_h = hamiltonian(proposal_log_density, proposal.v, beta) - h0;
  } catch (const KickError&) {
    out.delta_h = std::numeric_limits<double>::infinity();
  }
  // The uniform draw is consumed on every path so the stream stays aligned.
  const double u = uniform01(chain.rng);
  if (!std::isfinite(out.delta_h)) {
    out.divergent = true;
  } else if (std::log(u) < -out.delta_h) {
    out.accepted = true;
    chain.phase = std::move(proposal);
    chain.log_density = proposal_log_density;
  }
  out.chain = std::move(chain);
  return out;
}

namespace {

void record_outcome(RunRecord& record, const ProposalOutcome& outcome) {
  ++record.total;
  if (outcome.accepted) ++record.accept_count;
  if (outcome.divergent) ++record.divergent_count;
  record.delta_h.push_back(outcome.delta_h);
}

}  // namespace

RunRecord sample(const Target& target, const GmcConfig& cfg, std::size_t n_draws, std::size_t n_burnin,
                 const Eigen::VectorXd& initial, std::size_t thin) {
  cfg.validate();
  if (thin < 1) throw ParameterError("thin: must be >= 1");
  ChainState chain = make_chain(target, initial, cfg.seed);

  RunRecord record;
  record.config = cfg;
  record.samples.resize(static_cast<Eigen::Index>(n_draws), target.manifold.ambient_dim());
  for (std::size_t i = 0; i < n_burnin; ++i) {
    chain = propose_and_accept(target, std::move(chain), cfg).chain;
  }
  record.delta_h.reserve(n_draws * thin);
  for (std::size_t draw = 0; draw < n_draws; ++draw) {
    for (std::size_t j = 0; j < thin; ++j) {
      ProposalOutcome outcome = propose_and_accept(target, std::move(chain), cfg);
      record_outcome(record, outcome);
      chain = std::move(outcome.chain);
    }
    record.samples.row(static_cast<Eigen::Index>(draw)) = chain.phase.q.transpose();
  }
  return record;
}

RunRecord sample_on_ball(const BallTarget& ball, const GmcConfig& cfg, std::size_t n_draws,
                         std::size_t n_burnin, const Eigen::VectorXd& initial_theta, std::size_t thin) {
  if (initial_theta.size() != ball.dim) throw DimensionError("sample_on_ball: initial point dimension");
  const Target lifted = lift_ball_target(ball);
  RunRecord record = sample(lifted, cfg, n_draws, n_burnin, ball_to_sphere(initial_theta, 1), thin);
  Eigen::MatrixXd theta = record.samples.leftCols(ball.dim);
  record.samples = std::move(theta);
  return record;
}

double swap_probability(double beta_i, double beta_j, double log_pi_i, double log_pi_j) {
  if (beta_i == beta_j) return 1.0;
  const double log_ratio = (beta_i - beta_j) * (log_pi_j - log_pi_i);
  if (std::isnan(log_ratio)) return 0.0;
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

TemperingRecord parallel_tempering(const Target& target, const TemperingLadder& ladder, const GmcConfig& cfg,
                                   std::size_t n_draws, std::size_t n_burnin, const Eigen::VectorXd& initial,
                                   std::size_t thin) {
  cfg.validate();
  ladder.validate();
  if (thin < 1) throw ParameterError("thin: must be >= 1");
  const std::size_t rungs = ladder.temperatures.size();

  std::vector<ChainState> chains;
  std::vector<GmcConfig> configs;
  for (std::size_t i = 0; i < rungs; ++i) {
    GmcConfig c = cfg;
    c.temperature = ladder.temperatures[i];
    c.seed = i == 0 ? cfg.seed : derive_seed(cfg.seed, i);
    configs.push_back(c);
    chains.push_back(make_chain(target, initial, c.seed));
  }
  Rng swap_rng(derive_seed(cfg.seed, 0x5eedULL << 32));

  TemperingRecord out;
  out.cold.config = configs.front();
  out.cold.samples.resize(static_cast<Eigen::Index>(n_draws), target.manifold.ambient_dim());
  out.swaps.attempts.assign(rungs > 1 ? rungs - 1 : 0, 0);
  out.swaps.accepts.assign(rungs > 1 ? rungs - 1 : 0, 0);

  const std::size_t total_iterations = n_burnin + n_draws * thin;
  for (std::size_t iter = 0; iter < total_iterations; ++iter) {
    const bool recording = iter >= n_burnin;
    for (std::size_t i = 0; i < rungs; ++i) {
      ProposalOutcome outcome = propose_and_accept(target, std::move(chains[i]), configs[i]);
      if (i == 0 && recording) record_outcome(out.cold, outcome);
      chains[i] = std::move(outcome.chain);
    }
    if ((iter + 1) % ladder.swap_interval == 0) {
      for (std::size_t i = 0; i + 1 < rungs; ++i) {
        const double prob = swap_probability(1.0 / ladder.temperatures[i], 1.0 / ladder.temperatures[i + 1],
                                             chains[i].log_density, chains[i + 1].log_density);
        ++out.swaps.attempts[i];
        if (uniform01(swap_rng) < prob) {
          ++out.swaps.accepts[i];
          std::swap(chains[i].phase, chains[i + 1].phase);
          std::swap(chains[i].log_density, chains[i + 1].log_density);
        }
      }
    }
    if (recording && (iter - n_burnin + 1) % thin == 0) {
      const auto row = static_cast<Eigen::Index>((iter - n_burnin) / thin);
      out.cold.samples.row(row) = chains.front().phase.q.transpose();
    }
  }
  return out;
}

}  // namespace gmc
