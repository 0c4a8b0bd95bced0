#include "gmc/diagnostics.hpp"

#include "gmc/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace gmc {

Eigen::VectorXd autocorrelation(const Eigen::Ref<const Eigen::VectorXd>& series) {
  const Eigen::Index n = series.size();
  const double mean = series.mean();
  std::size_t padded = 1;
  while (padded < static_cast<std::size_t>(2 * n)) padded <<= 1;

  std::vector<double> centered(padded, 0.0);
  for (Eigen::Index i = 0; i < n; ++i) centered[static_cast<std::size_t>(i)] = series(i) - mean;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> freq;
  fft.fwd(freq, centered);
  for (auto& f : freq) f = std::norm(f);
  std::vector<double> acov;
  fft.inv(acov, freq);

  Eigen::VectorXd rho(n);
  const double var = acov[0];
  if (!(var > 0.0)) throw DegenerateSeriesError("autocorrelation: series is constant");
  for (Eigen::Index k = 0; k < n; ++k) rho(k) = acov[static_cast<std::size_t>(k)] / var;
  return rho;
}

AutocorrelationTime autocorrelation_time(const Eigen::Ref<const Eigen::VectorXd>& series) {
  const Eigen::Index n = series.size();
  if (n < 10) throw ParameterError("ess: series needs at least 10 values");
  if (!series.allFinite()) throw ParameterError("ess: series has non-finite values");
  if (series.maxCoeff() == series.minCoeff()) throw DegenerateSeriesError("ess: series is constant");
  const Eigen::VectorXd rho = autocorrelation(series);

  double sum = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (Eigen::Index m = 0; 2 * m + 1 < n; ++m) {
    double pair = rho(2 * m) + rho(2 * m + 1);
    if (!(pair > 0.0)) break;
    pair = std::min(pair, prev);
    prev = pair;
    sum += pair;
  }
  const double floor = 1.0 / std::log10(static_cast<double>(n));
  const double tau = std::max(-1.0 + 2.0 * sum, floor);
  return {tau, static_cast<double>(n) / tau};
}

double ess(const Eigen::Ref<const Eigen::VectorXd>& series) { return autocorrelation_time(series).ess; }

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // Jacobi-theta form converges fast for small λ.
    const double x = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
    double sum = 0.0;
    for (int k = 1; k <= 7; k += 2) sum += std::pow(x, k * k);
    const double cdf = std::sqrt(2.0 * std::numbers::pi) / lambda * sum;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-300) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ParameterError("ks_two_sample: both samples must be nonempty");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(double(i) / na - double(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d)};
}

double MomentDeltas::max_abs() const {
  double m = 0.0;
  if (mean.size() > 0) m = std::max(m, mean.cwiseAbs().maxCoeff());
  if (second.size() > 0) m = std::max(m, second.cwiseAbs().maxCoeff());
  return m;
}

namespace {

double standardized_difference(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) {
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  const double mx = x.mean();
  const double my = y.mean();
  const double vx = nx > 1 ? (x.array() - mx).square().sum() / (nx - 1) : 0.0;
  const double vy = ny > 1 ? (y.array() - my).square().sum() / (ny - 1) : 0.0;
  const double se = std::sqrt(vx / nx + vy / ny);
  const double diff = mx - my;
  if (diff == 0.0) return 0.0;
  return se > 0.0 ? diff / se : std::copysign(std::numeric_limits<double>::infinity(), diff);
}

}  // namespace

MomentDeltas moment_compare(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::MatrixXd>& b) {
  if (a.rows() == 0 || b.rows() == 0) throw ParameterError("moment_compare: samples must be nonempty");
  if (a.cols() != b.cols()) throw DimensionError("moment_compare: samples have different dimensions");
  const Eigen::Index d = a.cols();
  MomentDeltas out;
  out.mean.resize(d);
  out.second.resize(d * (d + 1) / 2);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    out.mean(i) = standardized_difference(a.col(i), b.col(i));
    for (Eigen::Index j = i; j < d; ++j) {
      const Eigen::VectorXd pa = a.col(i).cwiseProduct(a.col(j));
      const Eigen::VectorXd pb = b.col(i).cwiseProduct(b.col(j));
      out.second(idx++) = standardized_difference(pa, pb);
    }
  }
  return out;
}

DiagnosticsSummary summarize(const Eigen::Ref<const Eigen::MatrixXd>& samples, double accept_rate,
                             const Eigen::MatrixXd* reference) {
  DiagnosticsSummary out;
  out.accept_rate = accept_rate;
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    try {
      const AutocorrelationTime t = autocorrelation_time(samples.col(j));
      out.ess.emplace_back(t.ess);
      out.act.emplace_back(t.act);
    } catch (const Error&) {
      out.ess.emplace_back();
      out.act.emplace_back();
    }
  }
  if (reference != nullptr && reference->rows() > 0 && samples.rows() > 0) {
    if (reference->cols() != samples.cols()) throw DimensionError("summarize: reference dimension mismatch");
    for (Eigen::Index j = 0; j < samples.cols(); ++j) {
      const Eigen::VectorXd a = samples.col(j);
      const Eigen::VectorXd b = reference->col(j);
      out.ks_results.push_back(ks_two_sample({a.data(), a.data() + a.size()}, {b.data(), b.data() + b.size()}));
    }
    out.moment_deltas = moment_compare(samples, *reference);
  }
  return out;
}

}  // namespace gmc
