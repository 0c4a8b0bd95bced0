#include "gmc/baselines.hpp"

#include "gmc/transforms.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace gmc {

namespace {

Eigen::MatrixXd to_matrix(const std::vector<double>& flat, Eigen::Index cols) {
  const Eigen::Index rows = cols == 0 ? 0 : static_cast<Eigen::Index>(flat.size()) / cols;
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = flat[static_cast<std::size_t>(i * cols + j)];
  }
  return out;
}

void check_symmetric(const Eigen::MatrixXd& A, const char* who) {
  if (A.rows() != A.cols() || A.rows() < 1) throw DimensionError(std::string(who) + ": A must be square");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if (!A.allFinite() || (A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw ParameterError(std::string(who) + ": A must be finite and symmetric");
  }
}

}  // namespace

RejectionReport naive_conditional_fb(const GaussianEquivalent<double>& g, double nu, std::size_t n_proposals,
                                     Rng& rng) {
  if (!(nu > 0.0)) throw ParameterError("naive_conditional_fb: nu must be > 0");
  const Eigen::Index p = g.mu.size();
  if (g.sigma.rows() != p || g.sigma.cols() != p) throw DimensionError("naive_conditional_fb: sigma shape");
  Eigen::LLT<Eigen::MatrixXd> llt(g.sigma);
  if (llt.info() != Eigen::Success) throw ParameterError("naive_conditional_fb: sigma is not positive definite");
  const Eigen::MatrixXd chol = llt.matrixL();

  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(p);
  Eigen::VectorXd y(p);
  std::vector<double> kept;
  RejectionReport report;
  report.n_proposals = n_proposals;
  for (std::size_t i = 0; i < n_proposals; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) z(j) = normal(rng);
    y.noalias() = chol * z;
    y += g.mu;
    const double radius = y.norm();
    if (std::abs(radius - 1.0) < nu) {
      for (Eigen::Index j = 0; j < p; ++j) kept.push_back(y(j) / radius);
      ++report.n_accepted;
    }
  }
  report.samples = to_matrix(kept, p);
  return report;
}

AcgEnvelope::AcgEnvelope(const Eigen::MatrixXd& A) {
  check_symmetric(A, "acg envelope");
  const int q = static_cast<int>(A.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(-A);
  if (eig.info() != Eigen::Success) throw NumericError("acg envelope: eigendecomposition failed");
  const Eigen::VectorXd lambda = eig.eigenvalues().array() - eig.eigenvalues().minCoeff();
  shifted_ = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();

  // Σ 1/(b + 2λᵢ) decreases in b; it is +inf at 0 and <= 1 at b = q.
  auto excess = [&](double b) { return (1.0 / (b + 2.0 * lambda.array())).sum() - 1.0; };
  double lo = 0.0;
  double hi = q;
  if (excess(hi) >= 0.0) {
    b_ = hi;
  } else {
    for (int i = 0; i < 200 && hi - lo > 1e-15 * q; ++i) {
      const double mid = 0.5 * (lo + hi);
      (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    b_ = 0.5 * (lo + hi);
    if (!(b_ > 0.0) || std::abs(excess(b_)) > 1e-8) throw NumericError("acg envelope: root for b not found");
  }

  const Eigen::VectorXd omega_diag = 1.0 + 2.0 * lambda.array() / b_;
  omega_ = eig.eigenvectors() * omega_diag.asDiagonal() * eig.eigenvectors().transpose();
  cov_factor_ = eig.eigenvectors() * omega_diag.cwiseSqrt().cwiseInverse().asDiagonal();
  log_m_ = -0.5 * (q - b_) + 0.5 * q * std::log(q / b_);
}

double AcgEnvelope::log_envelope(const Eigen::VectorXd& x) const {
  return log_m_ - 0.5 * dim() * std::log(x.dot(omega_ * x));
}

Eigen::VectorXd AcgEnvelope::propose(Rng& rng) const {
  const Eigen::VectorXd y = cov_factor_ * standard_normal(dim(), rng);
  return y.normalized();
}

Eigen::VectorXd AcgEnvelope::draw(Rng& rng, std::size_t& proposals) const {
  while (true) {
    Eigen::VectorXd x = propose(rng);
    ++proposals;
    const double u = uniform01(rng);
    if (std::log(u) < log_target(x) - log_envelope(x)) return x;
  }
}

RejectionReport acg_rejection_bingham(const Eigen::MatrixXd& A, std::size_t n_draws, Rng& rng) {
  const AcgEnvelope envelope(A);
  RejectionReport report;
  report.samples.resize(static_cast<Eigen::Index>(n_draws), envelope.dim());
  for (std::size_t i = 0; i < n_draws; ++i) {
    report.samples.row(static_cast<Eigen::Index>(i)) = envelope.draw(rng, report.n_proposals).transpose();
  }
  report.n_accepted = n_draws;
  report.envelope_constant = std::exp(envelope.log_m());
  return report;
}

RejectionReport bingham_envelope_fb(const FisherBinghamParams<double>& params, std::size_t n_draws, Rng& rng) {
  validate(params);
  const AcgEnvelope envelope(params.A);
  const double c_norm = params.c.norm();
  RejectionReport report;
  report.samples.resize(static_cast<Eigen::Index>(n_draws), envelope.dim());
  report.envelope_constant = std::exp(c_norm);
  std::size_t accepted = 0;
  while (accepted < n_draws) {
    const Eigen::VectorXd x = envelope.draw(rng, report.inner_proposals);
    ++report.n_proposals;
    const double u = uniform01(rng);
    if (std::log(u) < params.c.dot(x) - c_norm) {
      report.samples.row(static_cast<Eigen::Index>(accepted++)) = x.transpose();
    }
  }
  report.n_accepted = accepted;
  return report;
}

MatrixFisherDraws matrix_fisher_sampler(const MatrixFisherParams<double>& params, std::size_t n_draws, Rng& rng) {
  const Eigen::MatrixXd A = matrix_fisher_to_bingham(params);
  MatrixFisherDraws out;
  out.report = acg_rejection_bingham(A, n_draws, rng);
  out.rotations.reserve(n_draws);
  for (Eigen::Index i = 0; i < out.report.samples.rows(); ++i) {
    out.rotations.push_back(quaternion_to_rotation(out.report.samples.row(i).transpose()));
  }
  return out;
}

RejectionReport barbell_rejection_x(const BarbellParams<double>& params, std::size_t n_proposals, Rng& rng) {
  validate(params);
  const double envelope = params.r * std::pow(std::cosh((std::abs(params.L) - params.l) / params.r), 2);
  std::uniform_real_distribution<double> xdist(-params.L, params.L);
  std::uniform_real_distribution<double> etadist(0.0, envelope);
  std::vector<double> xprop(n_proposals);
  std::vector<double> eta(n_proposals);
  for (auto& x : xprop) x = xdist(rng);
  for (auto& e : eta) e = etadist(rng);

  std::vector<double> kept;
  for (std::size_t i = 0; i < n_proposals; ++i) {
    if (std::abs(xprop[i]) > params.l) {
      if (eta[i] < params.r * std::pow(std::cosh((std::abs(xprop[i]) - params.l) / params.r), 2)) {
        kept.push_back(xprop[i]);
      }
    } else if (eta[i] < params.r) {
      kept.push_back(xprop[i]);
    }
  }
  RejectionReport report;
  report.n_proposals = n_proposals;
  report.n_accepted = kept.size();
  report.samples = to_matrix(kept, 1);
  report.envelope_constant = envelope;
  return report;
}

BarbellSurface barbell_surface_from_x(const BarbellParams<double>& params, RejectionReport x_report, Rng& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  BarbellSurface out;
  out.points.resize(x_report.samples.rows(), 3);
  for (Eigen::Index i = 0; i < x_report.samples.rows(); ++i) {
    out.points.row(i) = barbell_embed(params, x_report.samples(i, 0), angle(rng)).transpose();
  }
  out.report = std::move(x_report);
  return out;
}

BarbellSurface barbell_uniform_surface(const BarbellParams<double>& params, std::size_t n_draws, Rng& rng) {
  validate(params);
  const double envelope = params.r * std::pow(std::cosh((params.L - params.l) / params.r), 2);
  std::uniform_real_distribution<double> xdist(-params.L, params.L);
  std::uniform_real_distribution<double> etadist(0.0, envelope);
  RejectionReport report;
  report.envelope_constant = envelope;
  report.samples.resize(static_cast<Eigen::Index>(n_draws), 1);
  while (report.n_accepted < n_draws) {
    const double x = xdist(rng);
    const double eta = etadist(rng);
    ++report.n_proposals;
    if (eta < surface_density_barbell(params, x)) {
      report.samples(static_cast<Eigen::Index>(report.n_accepted++), 0) = x;
    }
  }
  return barbell_surface_from_x(params, std::move(report), rng);
}

}  // namespace gmc
