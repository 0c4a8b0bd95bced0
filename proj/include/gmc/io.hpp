#pragma once

// JSON forms of parameter sets and summaries, and full-precision CSV.

#include "gmc/densities.hpp"
#include "gmc/diagnostics.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace gmc {

using json = nlohmann::json;

json vector_to_json(const Eigen::VectorXd& v);
/// Throws ParameterError naming `field` on malformed input.
Eigen::VectorXd vector_from_json(const json& j, const std::string& field);

/// Row-major nested arrays.
json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& j, const std::string& field);

void to_json(json& j, const FisherBinghamParams<double>& p);
void from_json(const json& j, FisherBinghamParams<double>& p);
void to_json(json& j, const GaussianEquivalent<double>& g);
void from_json(const json& j, GaussianEquivalent<double>& g);
void to_json(json& j, const BarbellParams<double>& p);
void from_json(const json& j, BarbellParams<double>& p);
void to_json(json& j, const DirichletParams<double>& p);
void from_json(const json& j, DirichletParams<double>& p);
void to_json(json& j, const MatrixFisherParams<double>& p);
void from_json(const json& j, MatrixFisherParams<double>& p);

void to_json(json& j, const KsResult& r);
void to_json(json& j, const MomentDeltas& m);
void to_json(json& j, const DiagnosticsSummary& s);

/// One CSV row per coordinate: index, ess, act, ks statistic, ks p-value.
std::string diagnostics_csv(const DiagnosticsSummary& s, const std::vector<std::string>& names);

struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
};

/// Header line then one row per matrix row, 17 significant digits.
void write_csv(const std::string& path, const std::vector<std::string>& header, const Eigen::MatrixXd& values);
/// Throws ParameterError naming the 1-based line of any malformed row.
CsvTable read_csv(const std::string& path);

std::string format_double(double x);

}  // namespace gmc
