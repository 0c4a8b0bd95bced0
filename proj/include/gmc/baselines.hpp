#pragma once

// Independent-draw samplers: naive conditioning of a Gaussian on the unit
// sphere, ACG-envelope rejection for Bingham, Bingham-envelope rejection for
// Fisher–Bingham and matrix Fisher, and the barbell surface-measure sampler.
// They are usable on their own and double as oracles for the GMC chains.

#include "gmc/densities.hpp"
#include "gmc/random.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace gmc {

struct RejectionReport {
  std::size_t n_proposals = 0;
  std::size_t n_accepted = 0;
  /// One accepted draw per row.
  Eigen::MatrixXd samples;
  /// Bound M with target ≤ M · envelope, when the sampler has one.
  std::optional<double> envelope_constant;
  /// Proposals consumed by an inner rejection stage (two-stage samplers only).
  std::size_t inner_proposals = 0;

  double rate() const { return n_proposals == 0 ? 0.0 : double(n_accepted) / double(n_proposals); }
};

/// Draws Y ~ N(mu, sigma) and keeps those with |‖Y‖ - 1| < nu, normalized onto the sphere.
RejectionReport naive_conditional_fb(const GaussianEquivalent<double>& g, double nu, std::size_t n_proposals,
                                     Rng& rng);

/// Angular central Gaussian envelope for Bingham(A) on S^{q-1}.
///
/// With A' = λ_max(A)·I - A (positive semidefinite, smallest eigenvalue 0) the
/// target is f*(x) = exp(-xᵀA'x). The envelope is g*(x) = (xᵀΩx)^{-q/2} with
/// Ω = I + 2A'/b, b solving Σᵢ 1/(b + 2λ'ᵢ) = 1, and f* ≤ M g* for
/// M = exp(-(q - b)/2) (q/b)^{q/2}.
class AcgEnvelope {
 public:
  explicit AcgEnvelope(const Eigen::MatrixXd& A);

  int dim() const { return static_cast<int>(shifted_.rows()); }
  double b() const { return b_; }
  double log_m() const { return log_m_; }
  const Eigen::MatrixXd& omega() const { return omega_; }

  double log_target(const Eigen::VectorXd& x) const { return -x.dot(shifted_ * x); }
  double log_envelope(const Eigen::VectorXd& x) const;

  /// One ACG draw: normalized N(0, Ω⁻¹).
  Eigen::VectorXd propose(Rng& rng) const;

  /// Proposes until acceptance; returns the draw and adds the proposal count.
  Eigen::VectorXd draw(Rng& rng, std::size_t& proposals) const;

 private:
  Eigen::MatrixXd shifted_;
  Eigen::MatrixXd omega_;
  Eigen::MatrixXd cov_factor_;
  double b_ = 0.0;
  double log_m_ = 0.0;
};

/// Exact Bingham(A) draws by ACG rejection.
RejectionReport acg_rejection_bingham(const Eigen::MatrixXd& A, std::size_t n_draws, Rng& rng);

/// Exact Fisher–Bingham(c, A) draws: Bingham(A) proposals accepted with
/// probability exp(c·x - ‖c‖).
RejectionReport bingham_envelope_fb(const FisherBinghamParams<double>& params, std::size_t n_draws, Rng& rng);

struct MatrixFisherDraws {
  std::vector<Eigen::Matrix3d> rotations;
  /// Quaternion draws (w, x, y, z) and the acceptance bookkeeping.
  RejectionReport report;
};

MatrixFisherDraws matrix_fisher_sampler(const MatrixFisherParams<double>& params, std::size_t n_draws, Rng& rng);

/// Rejection sampler for x under the barbell surface measure: n_proposals
/// uniform x on [-L, L] paired with η ~ U(0, M), M = r cosh²((L - l)/r).
RejectionReport barbell_rejection_x(const BarbellParams<double>& params, std::size_t n_proposals, Rng& rng);

struct BarbellSurface {
  /// Embedded points (x, y, z), one per row.
  Eigen::MatrixX3d points;
  RejectionReport report;
};

/// Pairs each accepted x with θ ~ U[0, 2π) and embeds it.
BarbellSurface barbell_surface_from_x(const BarbellParams<double>& params, RejectionReport x_report, Rng& rng);

/// n_draws points uniform with respect to the barbell's surface area.
BarbellSurface barbell_uniform_surface(const BarbellParams<double>& params, std::size_t n_draws, Rng& rng);

}  // namespace gmc
