#pragma once

// Chain-quality and two-sample agreement statistics.

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace gmc {

struct AutocorrelationTime {
  /// Integrated autocorrelation time τ = 1 + 2Σρₖ.
  double act;
  /// n / τ. Exceeds n for antithetic (negatively correlated) chains.
  double ess;
};

/// Geyer initial-positive-sequence estimate, with the monotone-sequence
/// correction. τ is floored at 1/log10(n) so an exactly antithetic series
/// still gets a finite ESS.
AutocorrelationTime autocorrelation_time(const Eigen::Ref<const Eigen::VectorXd>& series);

double ess(const Eigen::Ref<const Eigen::VectorXd>& series);

/// Biased (divide-by-n) sample autocorrelations ρ₀..ρ_{n-1}, computed by FFT.
Eigen::VectorXd autocorrelation(const Eigen::Ref<const Eigen::VectorXd>& series);

struct KsResult {
  double statistic;
  double p_value;
};

/// Asymptotic Kolmogorov survival function Q(λ) = 2Σ(-1)^{k-1} exp(-2k²λ²).
double kolmogorov_survival(double lambda);

/// Two-sample Kolmogorov–Smirnov test with the asymptotic p-value
/// (effective-size correction √nₑ + 0.12 + 0.11/√nₑ).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct MomentDeltas {
  /// (mean_a - mean_b)/SE per coordinate.
  Eigen::VectorXd mean;
  /// Same for the products xᵢxⱼ, i <= j, in row-major upper-triangular order.
  Eigen::VectorXd second;

  double max_abs() const;
};

/// Standardized first- and second-moment differences between two samples
/// (rows are draws), each divided by the combined i.i.d. standard error.
MomentDeltas moment_compare(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::MatrixXd>& b);

struct DiagnosticsSummary {
  /// Per coordinate; empty for a constant coordinate.
  std::vector<std::optional<double>> ess;
  std::vector<std::optional<double>> act;
  double accept_rate = 1.0;
  /// Per-coordinate KS against a reference sample, when one was supplied.
  std::vector<KsResult> ks_results;
  std::optional<MomentDeltas> moment_deltas;
};

DiagnosticsSummary summarize(const Eigen::Ref<const Eigen::MatrixXd>& samples, double accept_rate,
                             const Eigen::MatrixXd* reference = nullptr);

}  // namespace gmc
