#include "gmc/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace gmc {

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& field) {
  if (!j.is_array()) throw ParameterError(field + ": expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParameterError(field + "[" + std::to_string(i) + "]: expected a number");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_to_json(m.row(i).transpose()));
  return out;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ParameterError(field + ": expected a nonempty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string row_field = field + "[" + std::to_string(i) + "]";
    const Eigen::VectorXd row = vector_from_json(j[i], row_field);
    if (static_cast<std::size_t>(row.size()) != cols) throw ParameterError(row_field + ": ragged matrix row");
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

namespace {

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ParameterError(where + key + ": missing field");
  return j.at(key);
}

double number(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number()) throw ParameterError(where + key + ": expected a number");
  return v.get<double>();
}

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

}  // namespace

void to_json(json& j, const FisherBinghamParams<double>& p) {
  j = json{{"c", vector_to_json(p.c)}, {"A", matrix_to_json(p.A)}};
}

void from_json(const json& j, FisherBinghamParams<double>& p) {
  p.A = matrix_from_json(require(j, "A", ""), "A");
  p.c = j.contains("c") ? vector_from_json(j.at("c"), "c") : Eigen::VectorXd::Zero(p.A.rows());
  validate(p);
}

void to_json(json& j, const GaussianEquivalent<double>& g) {
  j = json{{"mu", vector_to_json(g.mu)}, {"sigma", matrix_to_json(g.sigma)}, {"a", g.a}};
}

void from_json(const json& j, GaussianEquivalent<double>& g) {
  g.mu = vector_from_json(require(j, "mu", ""), "mu");
  g.sigma = matrix_from_json(require(j, "sigma", ""), "sigma");
  g.a = number(j, "a", "");
}

void to_json(json& j, const BarbellParams<double>& p) { j = json{{"r", p.r}, {"l", p.l}, {"L", p.L}}; }

void from_json(const json& j, BarbellParams<double>& p) {
  BarbellParams<double> defaults;
  p.r = j.contains("r") ? number(j, "r", "") : defaults.r;
  p.l = j.contains("l") ? number(j, "l", "") : defaults.l;
  p.L = j.contains("L") ? number(j, "L", "") : defaults.L;
  validate(p);
}

void to_json(json& j, const DirichletParams<double>& p) { j = json{{"alpha", vector_to_json(p.alpha)}}; }

void from_json(const json& j, DirichletParams<double>& p) {
  p.alpha = vector_from_json(require(j, "alpha", ""), "alpha");
  validate(p);
}

void to_json(json& j, const MatrixFisherParams<double>& p) { j = json{{"F", matrix_to_json(p.F)}}; }

void from_json(const json& j, MatrixFisherParams<double>& p) {
  const Eigen::MatrixXd f = matrix_from_json(require(j, "F", ""), "F");
  if (f.rows() != 3 || f.cols() != 3) throw ParameterError("F: expected a 3x3 matrix");
  p.F = f;
}

void to_json(json& j, const KsResult& r) { j = json{{"statistic", r.statistic}, {"p_value", r.p_value}}; }

void to_json(json& j, const MomentDeltas& m) {
  j = json{{"mean", vector_to_json(m.mean)}, {"second", vector_to_json(m.second)}, {"max_abs", m.max_abs()}};
}

void to_json(json& j, const DiagnosticsSummary& s) {
  json ess = json::array();
  json act = json::array();
  for (const auto& e : s.ess) ess.push_back(optional_number(e));
  for (const auto& a : s.act) act.push_back(optional_number(a));
  j = json{{"ess", ess}, {"act", act}, {"accept_rate", s.accept_rate}, {"ks_results", s.ks_results}};
  j["moment_deltas"] = s.moment_deltas ? json(*s.moment_deltas) : json(nullptr);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string diagnostics_csv(const DiagnosticsSummary& s, const std::vector<std::string>& names) {
  std::ostringstream out;
  out << "coordinate,ess,act,ks_statistic,ks_p_value\n";
  for (std::size_t i = 0; i < s.ess.size(); ++i) {
    out << (i < names.size() ? names[i] : std::to_string(i)) << ',';
    out << (s.ess[i] ? format_double(*s.ess[i]) : "") << ',';
    out << (s.act[i] ? format_double(*s.act[i]) : "") << ',';
    if (i < s.ks_results.size()) {
      out << format_double(s.ks_results[i].statistic) << ',' << format_double(s.ks_results[i].p_value);
    } else {
      out << ',';
    }
    out << '\n';
  }
  return out.str();
}

void write_csv(const std::string& path, const std::vector<std::string>& header, const Eigen::MatrixXd& values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) out << (c ? "," : "") << format_double(values(r, c));
    out << '\n';
  }
  if (!out) throw Error("failed writing " + path);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw ParameterError(path + ":1: missing header row");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  std::vector<double> flat;
  std::size_t line_no = 1;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t count = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        flat.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ParameterError(path + ":" + std::to_string(line_no) + ": not a number: '" + cell + "'");
      }
      ++count;
    }
    if (count != table.header.size()) {
      throw ParameterError(path + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(table.header.size()) + " values, got " + std::to_string(count));
    }
    ++rows;
  }
  const auto cols = static_cast<Eigen::Index>(table.header.size());
  table.values.resize(static_cast<Eigen::Index>(rows), cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      table.values(static_cast<Eigen::Index>(r), c) = flat[r * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)];
    }
  }
  return table;
}

}  // namespace gmc
