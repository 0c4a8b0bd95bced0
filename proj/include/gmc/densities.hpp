#pragma once

// Unnormalized log-densities and their ambient gradients. Callers project
// gradients onto the tangent space themselves.

#include "gmc/manifold.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <string>

namespace gmc {

// ---------------------------------------------------------------------------
// Fisher–Bingham: log f(x) = c·x + xᵀAx on the unit sphere.

template <typename Scalar = double>
struct FisherBinghamParams {
  Vec<Scalar> c;
  Mat<Scalar> A;

  Eigen::Index dim() const { return c.size(); }
};

template <typename Scalar>
void validate(const FisherBinghamParams<Scalar>& params) {
  using std::abs;
  if (params.A.rows() != params.c.size() || params.A.cols() != params.c.size()) {
    throw DimensionError("fisher-bingham: A must be " + std::to_string(params.c.size()) + "x" +
                         std::to_string(params.c.size()));
  }
  if (!params.A.allFinite() || !params.c.allFinite()) throw ParameterError("fisher-bingham: non-finite entries");
  const Scalar scale = std::max(Scalar(1), params.A.cwiseAbs().maxCoeff());
  if ((params.A - params.A.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * scale) {
    throw ParameterError("fisher-bingham: A is not symmetric");
  }
}

template <typename Scalar, typename Derived>
Scalar log_density_fb(const FisherBinghamParams<Scalar>& params, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != params.dim()) throw DimensionError("log_density_fb: dimension mismatch");
  return params.c.dot(x) + x.dot(params.A * x);
}

template <typename Scalar, typename Derived>
Vec<Scalar> grad_fb(const FisherBinghamParams<Scalar>& params, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != params.dim()) throw DimensionError("grad_fb: dimension mismatch");
  return params.c + Scalar(2) * (params.A * x);
}

/// N(mu, sigma) whose restriction to the unit sphere is Fisher–Bingham(c, A):
/// sigma = -½(A + aI)⁻¹, mu = sigma c, with a chosen so that trace(sigma) = 1.
template <typename Scalar = double>
struct GaussianEquivalent {
  Vec<Scalar> mu;
  Mat<Scalar> sigma;
  Scalar a;
};

template <typename Scalar>
GaussianEquivalent<Scalar> gaussian_equivalent(const FisherBinghamParams<Scalar>& params) {
  validate(params);
  const auto p = params.dim();
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> eig(params.A);
  if (eig.info() != Eigen::Success) throw NumericError("gaussian_equivalent: eigendecomposition failed");
  const Vec<Scalar>& lambda = eig.eigenvalues();
  const Scalar lambda_max = lambda.maxCoeff();

  auto trace_sigma = [&](Scalar a) { return (Scalar(-0.5) / (lambda.array() + a)).sum(); };

  // trace_sigma increases monotonically from 0 to +inf on (-inf, -lambda_max).
  const Scalar scale = std::max(Scalar(1), std::abs(lambda_max));
  Scalar lo = -lambda_max - Scalar(p);
  Scalar hi = -lambda_max - Scalar(1e-12) * scale;
  if (!(trace_sigma(lo) < Scalar(1)) || !(trace_sigma(hi) > Scalar(1))) {
    throw NumericError("gaussian_equivalent: root is not bracketed");
  }
  for (int i = 0; i < 200 && hi - lo > std::numeric_limits<Scalar>::epsilon() * scale; ++i) {
    const Scalar mid = (lo + hi) / 2;
    (trace_sigma(mid) < Scalar(1) ? lo : hi) = mid;
  }
  const Scalar a = (lo + hi) / 2;
  if (std::abs(trace_sigma(a) - Scalar(1)) > Scalar(1e-10)) {
    throw NumericError("gaussian_equivalent: bisection did not converge");
  }

  const Vec<Scalar> variances = Scalar(-0.5) / (lambda.array() + a);
  GaussianEquivalent<Scalar> out;
  out.a = a;
  out.sigma = eig.eigenvectors() * variances.asDiagonal() * eig.eigenvectors().transpose();
  out.sigma = (out.sigma + out.sigma.transpose()) / Scalar(2);
  out.mu = out.sigma * params.c;
  return out;
}

// ---------------------------------------------------------------------------
// Barbell: surface of revolution with radius f(x) = r on |x| <= l and
// r cosh((|x| - l)/r) beyond, for |x| <= L. Its surface measure in (x, θ)
// coordinates is f(x)·sqrt(1 + f'(x)²) = r on the bar and r cosh²((|x| - l)/r) on the bells.

template <typename Scalar = double>
struct BarbellParams {
  Scalar r = 1;
  Scalar l = 2;
  Scalar L = 4;
};

template <typename Scalar>
void validate(const BarbellParams<Scalar>& params) {
  if (!(params.r > 0)) throw ParameterError("barbell: r must be > 0");
  if (!(params.l >= 0)) throw ParameterError("barbell: l must be >= 0");
  if (!(params.L > params.l)) throw ParameterError("barbell: L must exceed l");
}

namespace detail {
template <typename Scalar>
void require_barbell_domain(const BarbellParams<Scalar>& params, Scalar x) {
  using std::abs;
  if (!(abs(x) <= params.L)) throw DomainError("barbell: |x| exceeds L");
}
}  // namespace detail

template <typename Scalar>
Scalar barbell_radius(const BarbellParams<Scalar>& params, Scalar x) {
  using std::abs;
  using std::cosh;
  detail::require_barbell_domain(params, x);
  const Scalar d = abs(x) - params.l;
  return d > 0 ? params.r * cosh(d / params.r) : params.r;
}

template <typename Scalar>
Scalar surface_density_barbell(const BarbellParams<Scalar>& params, Scalar x) {
  using std::abs;
  using std::cosh;
  detail::require_barbell_domain(params, x);
  const Scalar d = abs(x) - params.l;
  if (d <= 0) return params.r;
  const Scalar ch = cosh(d / params.r);
  return params.r * ch * ch;
}

template <typename Scalar>
Scalar log_surface_density_barbell(const BarbellParams<Scalar>& params, Scalar x) {
  using std::abs;
  using std::cosh;
  using std::log;
  detail::require_barbell_domain(params, x);
  const Scalar d = abs(x) - params.l;
  if (d <= 0) return log(params.r);
  return log(params.r) + 2 * log(cosh(d / params.r));
}

template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> barbell_embed(const BarbellParams<Scalar>& params, Scalar x, Scalar theta) {
  using std::cos;
  using std::sin;
  const Scalar f = barbell_radius(params, x);
  return {x, f * cos(theta), f * sin(theta)};
}

// ---------------------------------------------------------------------------
// Matrix Fisher on SO(3): density ∝ exp(trace(FᵀR)).

template <typename Scalar = double>
struct MatrixFisherParams {
  Eigen::Matrix<Scalar, 3, 3> F = Eigen::Matrix<Scalar, 3, 3>::Zero();
};

/// 4x4 symmetric A with xᵀAx = trace(Fᵀ R(x)) for every unit quaternion
/// x = (w, x, y, z), R as in quaternion_to_rotation.
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 4> matrix_fisher_to_bingham(const MatrixFisherParams<Scalar>& params) {
  const auto& f = params.F;
  Eigen::Matrix<Scalar, 4, 4> a;
  a(0, 0) = f(0, 0) + f(1, 1) + f(2, 2);
  a(1, 1) = f(0, 0) - f(1, 1) - f(2, 2);
  a(2, 2) = -f(0, 0) + f(1, 1) - f(2, 2);
  a(3, 3) = -f(0, 0) - f(1, 1) + f(2, 2);
  a(0, 1) = a(1, 0) = f(2, 1) - f(1, 2);
  a(0, 2) = a(2, 0) = f(0, 2) - f(2, 0);
  a(0, 3) = a(3, 0) = f(1, 0) - f(0, 1);
  a(1, 2) = a(2, 1) = f(0, 1) + f(1, 0);
  a(1, 3) = a(3, 1) = f(0, 2) + f(2, 0);
  a(2, 3) = a(3, 2) = f(1, 2) + f(2, 1);
  return a;
}

// ---------------------------------------------------------------------------
// Dirichlet(α) pulled back to the sphere through xᵢ = qᵢ².

template <typename Scalar = double>
struct DirichletParams {
  Vec<Scalar> alpha;
};

template <typename Scalar>
void validate(const DirichletParams<Scalar>& params) {
  if (params.alpha.size() < 2) throw ParameterError("dirichlet: need at least 2 components");
  if (!(params.alpha.array() > Scalar(0)).all() || !params.alpha.allFinite()) {
    throw ParameterError("dirichlet: every alpha must be positive and finite");
  }
}

/// Σ (2αᵢ - 1) log|qᵢ|. A coordinate qᵢ = 0 with αᵢ ≠ ½ returns -inf: the
/// point is treated as outside the support and any proposal landing there is rejected.
template <typename Scalar, typename Derived>
Scalar log_density_dirichlet_on_sphere(const DirichletParams<Scalar>& params,
                                       const Eigen::MatrixBase<Derived>& q) {
  using std::abs;
  using std::log;
  if (q.size() != params.alpha.size()) throw DimensionError("dirichlet: dimension mismatch");
  Scalar total(0);
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const Scalar w = 2 * params.alpha(i) - 1;
    if (w == Scalar(0)) continue;
    if (q(i) == Scalar(0)) return -std::numeric_limits<Scalar>::infinity();
    total += w * log(abs(q(i)));
  }
  return total;
}

/// Componentwise (2αᵢ - 1)/qᵢ; non-finite where qᵢ = 0 and αᵢ ≠ ½.
template <typename Scalar, typename Derived>
Vec<Scalar> grad_dirichlet_on_sphere(const DirichletParams<Scalar>& params,
                                     const Eigen::MatrixBase<Derived>& q) {
  if (q.size() != params.alpha.size()) throw DimensionError("dirichlet: dimension mismatch");
  Vec<Scalar> g(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const Scalar w = 2 * params.alpha(i) - 1;
    g(i) = w == Scalar(0) ? Scalar(0) : w / q(i);
  }
  return g;
}

}  // namespace gmc
