#include "cli.hpp"

#include "gmc/transforms.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

namespace gmc::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kReferenceStream = 0x7265'6665'7265'6e63ULL;

using Path = std::vector<std::string>;

std::string join(const Path& path) {
  std::string out;
  for (const auto& p : path) out += (out.empty() ? "" : ".") + p;
  return out;
}

/// Raw config text plus enough bookkeeping to anchor messages to lines.
class Document {
 public:
  Document(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  json parse() const {
    try {
      return json::parse(text_);
    } catch (const json::parse_error& e) {
      const std::size_t byte = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text_.size());
      throw InputError(source_ + ":" + std::to_string(line_at(byte)) + ": invalid JSON: " + e.what());
    }
  }

  [[noreturn]] void fail(const Path& path, const std::string& message) const {
    const int line = line_of(path);
    std::string where = source_ + ":";
    if (line > 0) where += std::to_string(line) + ":";
    throw InputError(where + " " + (path.empty() ? "" : join(path) + ": ") + message);
  }

 private:
  int line_at(std::size_t byte) const {
    return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
  }

  // Finds the keys of path in order; the last one found fixes the line.
  int line_of(const Path& path) const {
    std::size_t pos = 0;
    bool found = false;
    for (const auto& key : path) {
      const std::size_t at = text_.find("\"" + key + "\"", pos);
      if (at == std::string::npos) break;
      pos = at;
      found = true;
    }
    return found ? line_at(pos) : 0;
  }

  const std::string& text_;
  std::string source_;
};

/// Typed field access on one JSON object, with anchored errors.
class Fields {
 public:
  Fields(const Document& doc, const json& obj, Path path) : doc_(doc), obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) doc_.fail(path_, "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& item : obj_.items()) {
      if (!allowed.count(item.key())) doc_.fail(at(item.key()), "unknown field");
    }
  }

  bool has(const char* key) const { return obj_.contains(key); }
  const json& raw(const char* key) const {
    if (!has(key)) doc_.fail(at(key), "missing field");
    return obj_.at(key);
  }
  Path at(const std::string& key) const {
    Path p = path_;
    p.push_back(key);
    return p;
  }
  [[noreturn]] void fail(const char* key, const std::string& message) const { doc_.fail(at(key), message); }

  std::string string(const char* key, std::optional<std::string> fallback = std::nullopt) const {
    if (!has(key) && fallback) return *fallback;
    const json& v = raw(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  double number(const char* key, std::optional<double> fallback = std::nullopt) const {
    if (!has(key) && fallback) return *fallback;
    const json& v = raw(key);
    if (!v.is_number()) fail(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "must be finite");
    return x;
  }

  std::int64_t integer(const char* key, std::optional<std::int64_t> fallback = std::nullopt) const {
    if (!has(key) && fallback) return *fallback;
    const json& v = raw(key);
    if (v.is_number_unsigned()) {
      if (v.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
        fail(key, "integer out of range");
      }
      return static_cast<std::int64_t>(v.get<std::uint64_t>());
    }
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<std::int64_t>();
  }

  std::size_t count(const char* key, std::optional<std::size_t> fallback = std::nullopt) const {
    if (!has(key) && fallback) return *fallback;
    const std::int64_t n = integer(key);
    if (n < 0) fail(key, "must be >= 0");
    return static_cast<std::size_t>(n);
  }

  Eigen::VectorXd vector(const char* key) const {
    try {
      return vector_from_json(raw(key), join(at(key)));
    } catch (const InputError&) {
      throw;
    } catch (const ParameterError& e) {
      fail(key, strip(e.what(), at(key)));
    }
  }

  Eigen::MatrixXd matrix(const char* key) const {
    try {
      return matrix_from_json(raw(key), join(at(key)));
    } catch (const InputError&) {
      throw;
    } catch (const ParameterError& e) {
      fail(key, strip(e.what(), at(key)));
    }
  }

 private:
  static std::string strip(const std::string& message, const Path& path) {
    const std::string prefix = join(path) + ": ";
    return message.rfind(prefix, 0) == 0 ? message.substr(prefix.size()) : message;
  }

  const Document& doc_;
  const json& obj_;
  Path path_;
};

ManifoldSpec parse_manifold(const Fields& f) {
  const std::string kind = f.string("kind");
  const auto dim = [&](const char* key) {
    const std::int64_t d = f.integer(key);
    if (d < 1) f.fail(key, "must be >= 1");
    return static_cast<int>(d);
  };
  if (kind == "sphere" || kind == "simplex" || kind == "ball") {
    f.allow({"kind", "dim"});
    const int d = dim("dim");
    if (kind == "sphere") return ManifoldSpec::sphere(d);
    if (kind == "simplex") return ManifoldSpec::simplex(d);
    return ManifoldSpec::ball(d);
  }
  if (kind == "stiefel") {
    f.allow({"kind", "k", "p"});
    const int k = dim("k");
    const int p = dim("p");
    if (k > p) f.fail("k", "must not exceed p");
    return ManifoldSpec::stiefel(k, p);
  }
  if (kind == "so3") {
    f.allow({"kind"});
    return ManifoldSpec::so3();
  }
  if (kind == "barbell") {
    f.allow({"kind"});
    return ManifoldSpec::barbell();
  }
  f.fail("kind", "unknown manifold '" + kind + "' (expected sphere, stiefel, so3, simplex, ball or barbell)");
}

json manifold_json(const ManifoldSpec& m) {
  switch (m.kind()) {
    case ManifoldKind::Sphere: return {{"kind", "sphere"}, {"dim", m.intrinsic_dim()}};
    case ManifoldKind::Stiefel: return {{"kind", "stiefel"}, {"k", m.cols()}, {"p", m.rows()}};
    case ManifoldKind::SO3: return {{"kind", "so3"}};
    case ManifoldKind::SimplexViaSphere: return {{"kind", "simplex"}, {"dim", m.intrinsic_dim()}};
    case ManifoldKind::BallViaSphere: return {{"kind", "ball"}, {"dim", m.intrinsic_dim()}};
    case ManifoldKind::Barbell: return {{"kind", "barbell"}};
  }
  return nullptr;
}

void parse_target(const Fields& f, ExperimentConfig& cfg) {
  const ManifoldSpec& m = cfg.manifold;
  cfg.target_kind = f.string("kind");
  const auto require_manifold = [&](bool ok, const std::string& what) {
    if (!ok) f.fail("kind", "target '" + cfg.target_kind + "' needs " + what + ", not " + m.name());
  };

  if (cfg.target_kind == "uniform") {
    f.allow({"kind"});
    require_manifold(m.kind() != ManifoldKind::Barbell, "a manifold with geodesics (use target 'barbell')");
    cfg.target_json = {{"kind", "uniform"}};
  } else if (cfg.target_kind == "fisher_bingham") {
    f.allow({"kind", "c", "A"});
    require_manifold(m.kind() == ManifoldKind::Sphere || m.kind() == ManifoldKind::Stiefel ||
                         m.kind() == ManifoldKind::SO3,
                     "a sphere, stiefel or so3 manifold");
    const int p = m.ambient_dim();
    auto& fb = cfg.fisher_bingham;
    fb.A = f.matrix("A");
    fb.c = f.has("c") ? f.vector("c") : Eigen::VectorXd::Zero(p);
    if (fb.A.rows() != p || fb.A.cols() != p) {
      f.fail("A", "expected a " + std::to_string(p) + "x" + std::to_string(p) + " matrix for " + m.name());
    }
    if (fb.c.size() != p) f.fail("c", "expected length " + std::to_string(p) + " for " + m.name());
    try {
      validate(fb);
    } catch (const ParameterError& e) {
      f.fail("A", e.what());
    }
    cfg.target_json = {{"kind", "fisher_bingham"}, {"c", vector_to_json(fb.c)}, {"A", matrix_to_json(fb.A)}};
  } else if (cfg.target_kind == "matrix_fisher") {
    f.allow({"kind", "F"});
    require_manifold(m.kind() == ManifoldKind::SO3, "the so3 manifold");
    const Eigen::MatrixXd F = f.matrix("F");
    if (F.rows() != 3 || F.cols() != 3) f.fail("F", "expected a 3x3 matrix");
    cfg.matrix_fisher.F = F;
    cfg.target_json = {{"kind", "matrix_fisher"}, {"F", matrix_to_json(F)}};
  } else if (cfg.target_kind == "dirichlet") {
    f.allow({"kind", "alpha"});
    require_manifold(m.kind() == ManifoldKind::SimplexViaSphere, "a simplex manifold");
    cfg.dirichlet.alpha = f.vector("alpha");
    if (cfg.dirichlet.alpha.size() != m.ambient_dim()) {
      f.fail("alpha", "expected length " + std::to_string(m.ambient_dim()) + " for " + m.name());
    }
    if ((cfg.dirichlet.alpha.array() <= 0.0).any()) f.fail("alpha", "every entry must be > 0");
    cfg.target_json = {{"kind", "dirichlet"}, {"alpha", vector_to_json(cfg.dirichlet.alpha)}};
  } else if (cfg.target_kind == "barbell") {
    f.allow({"kind", "r", "l", "L"});
    require_manifold(m.kind() == ManifoldKind::Barbell, "the barbell manifold");
    auto& b = cfg.barbell;
    b.r = f.number("r", 1.0);
    b.l = f.number("l", 2.0);
    b.L = f.number("L", 4.0);
    if (!(b.r > 0)) f.fail("r", "must be > 0");
    if (!(b.l >= 0)) f.fail("l", "must be >= 0");
    if (!(b.L > b.l)) f.fail("L", "must exceed l");
    cfg.target_json = {{"kind", "barbell"}, {"r", b.r}, {"l", b.l}, {"L", b.L}};
  } else {
    f.fail("kind", "unknown target '" + cfg.target_kind +
                       "' (expected uniform, fisher_bingham, matrix_fisher, dirichlet or barbell)");
  }
}

Eigen::VectorXd default_initial(const ManifoldSpec& m) {
  switch (m.kind()) {
    case ManifoldKind::BallViaSphere: return Eigen::VectorXd::Zero(m.intrinsic_dim());
    case ManifoldKind::SimplexViaSphere:
      return Eigen::VectorXd::Constant(m.ambient_dim(), 1.0 / std::sqrt(double(m.ambient_dim())));
    case ManifoldKind::Stiefel: {
      Eigen::MatrixXd frame = Eigen::MatrixXd::Identity(m.rows(), m.cols());
      return Eigen::Map<const Eigen::VectorXd>(frame.data(), frame.size());
    }
    default: return Eigen::VectorXd::Unit(m.ambient_dim(), 0);
  }
}

void parse_sampler(const Fields& f, ExperimentConfig& cfg) {
  const ManifoldSpec& m = cfg.manifold;
  cfg.sampler_kind = f.string("kind");
  const std::string& kind = cfg.sampler_kind;
  const auto require_pair = [&](bool ok, const std::string& what) {
    if (!ok) {
      f.fail("kind", "sampler '" + kind + "' needs " + what + " (got target '" + cfg.target_kind + "' on " +
                         m.name() + ")");
    }
  };

  if (kind == "gmc" || kind == "tempered-gmc") {
    if (kind == "gmc") {
      f.allow({"kind", "epsilon", "n_steps", "temperature", "thin", "initial"});
    } else {
      f.allow({"kind", "epsilon", "n_steps", "thin", "initial", "temperatures", "swap_interval"});
    }
    require_pair(m.kind() != ManifoldKind::Barbell, "a manifold with geodesic flow");
    cfg.gmc.epsilon = f.number("epsilon", 0.1);
    if (!(cfg.gmc.epsilon > 0)) f.fail("epsilon", "must be > 0");
    const std::int64_t steps = f.integer("n_steps", 10);
    if (steps < 1) f.fail("n_steps", "must be >= 1");
    if (steps > std::numeric_limits<int>::max()) f.fail("n_steps", "too large");
    cfg.gmc.n_steps = static_cast<int>(steps);
    cfg.gmc.temperature = kind == "gmc" ? f.number("temperature", 1.0) : 1.0;
    if (!(cfg.gmc.temperature >= 1.0)) f.fail("temperature", "must be >= 1");
    cfg.thin = f.count("thin", 1);
    if (cfg.thin < 1) f.fail("thin", "must be >= 1");

    if (kind == "tempered-gmc") {
      require_pair(m.kind() != ManifoldKind::BallViaSphere, "a manifold other than ball");
      const Eigen::VectorXd temps = f.vector("temperatures");
      cfg.ladder.temperatures.assign(temps.data(), temps.data() + temps.size());
      cfg.ladder.swap_interval = f.count("swap_interval", 1);
      if (cfg.ladder.swap_interval < 1) f.fail("swap_interval", "must be >= 1");
      try {
        cfg.ladder.validate();
      } catch (const ParameterError& e) {
        f.fail("temperatures", e.what());
      }
    }

    Eigen::VectorXd init = f.has("initial") ? f.vector("initial") : default_initial(m);
    if (m.kind() == ManifoldKind::BallViaSphere) {
      if (init.size() != m.intrinsic_dim()) f.fail("initial", "expected " + std::to_string(m.intrinsic_dim()) + " coordinates");
      if (init.norm() > 1.0) f.fail("initial", "must lie in the closed unit ball");
    } else {
      if (init.size() != m.ambient_dim()) f.fail("initial", "expected " + std::to_string(m.ambient_dim()) + " coordinates");
      const double err = constraint_error(m, init);
      if (!(err <= kPointTolerance)) f.fail("initial", "point is off " + m.name() + " by " + std::to_string(err));
    }
    cfg.initial = init;
    return;
  }

  const bool sphere_fb = cfg.target_kind == "fisher_bingham" && m.kind() == ManifoldKind::Sphere;
  if (kind == "naive-conditional") {
    f.allow({"kind", "nu", "n_proposals"});
    require_pair(sphere_fb, "a fisher_bingham target on a sphere");
    cfg.nu = f.number("nu", 0.01);
    if (!(cfg.nu > 0)) f.fail("nu", "must be > 0");
    cfg.n_proposals = f.count("n_proposals");
    return;
  }
  if (kind == "acg-bingham") {
    f.allow({"kind"});
    require_pair(cfg.target_kind == "fisher_bingham" &&
                     (m.kind() == ManifoldKind::Sphere || m.kind() == ManifoldKind::SO3),
                 "a fisher_bingham target on a sphere or so3");
    if (!cfg.fisher_bingham.c.isZero(0.0)) f.fail("kind", "acg-bingham samples Bingham targets only (c must be 0)");
    return;
  }
  if (kind == "fb-envelope") {
    f.allow({"kind"});
    require_pair(sphere_fb || (cfg.target_kind == "fisher_bingham" && m.kind() == ManifoldKind::SO3),
                 "a fisher_bingham target on a sphere or so3");
    return;
  }
  if (kind == "matrix-fisher") {
    f.allow({"kind"});
    require_pair(cfg.target_kind == "matrix_fisher", "a matrix_fisher target");
    return;
  }
  if (kind == "barbell") {
    f.allow({"kind", "n_proposals"});
    require_pair(cfg.target_kind == "barbell", "a barbell target");
    cfg.n_proposals = f.count("n_proposals", 5000);
    return;
  }
  f.fail("kind", "unknown sampler '" + kind +
                     "' (expected gmc, tempered-gmc, naive-conditional, acg-bingham, fb-envelope, matrix-fisher or "
                     "barbell)");
}

bool is_gmc(const std::string& kind) { return kind == "gmc" || kind == "tempered-gmc"; }
bool draws_from_proposals(const std::string& kind) { return kind == "naive-conditional" || kind == "barbell"; }

Target build_target(const ExperimentConfig& cfg) {
  if (cfg.target_kind == "uniform") return uniform_target(cfg.manifold);
  if (cfg.target_kind == "fisher_bingham") return fisher_bingham_target(cfg.manifold, cfg.fisher_bingham);
  if (cfg.target_kind == "matrix_fisher") return matrix_fisher_target(cfg.matrix_fisher);
  if (cfg.target_kind == "dirichlet") return dirichlet_target(cfg.dirichlet);
  throw NotImplementedError("no geodesic target for '" + cfg.target_kind + "'");
}

Eigen::MatrixXd uniform_sphere_draws(int n_ambient, std::size_t n, Rng& rng) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), n_ambient);
  for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) = standard_normal(n_ambient, rng).normalized().transpose();
  return out;
}

/// Exact draws from the configured target when a direct sampler exists.
std::optional<Eigen::MatrixXd> exact_reference(const ExperimentConfig& cfg, std::size_t n, Rng& rng) {
  const ManifoldSpec& m = cfg.manifold;
  if (n == 0) return std::nullopt;
  const auto rows = static_cast<Eigen::Index>(n);
  if (cfg.target_kind == "uniform") {
    if (m.kind() == ManifoldKind::Stiefel) {
      Eigen::MatrixXd out(rows, m.ambient_dim());
      for (Eigen::Index i = 0; i < rows; ++i) {
        const Eigen::VectorXd z = standard_normal(m.ambient_dim(), rng);
        const Eigen::MatrixXd g = Eigen::Map<const Eigen::MatrixXd>(z.data(), m.rows(), m.cols());
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
        const Eigen::MatrixXd r = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
        for (int j = 0; j < m.cols(); ++j) {
          if (r(j, j) < 0) q.col(j) = -q.col(j);
        }
        out.row(i) = Eigen::Map<const Eigen::RowVectorXd>(q.data(), q.size());
      }
      return out;
    }
    if (m.kind() == ManifoldKind::BallViaSphere) {
      const int d = m.intrinsic_dim();
      Eigen::MatrixXd out(rows, d);
      for (Eigen::Index i = 0; i < rows; ++i) {
        const Eigen::VectorXd dir = standard_normal(d, rng).normalized();
        out.row(i) = (dir * std::pow(uniform01(rng), 1.0 / d)).transpose();
      }
      return out;
    }
    return uniform_sphere_draws(m.ambient_dim(), n, rng);
  }
  if (cfg.target_kind == "fisher_bingham" && m.kind() != ManifoldKind::Stiefel) {
    return bingham_envelope_fb(cfg.fisher_bingham, n, rng).samples;
  }
  if (cfg.target_kind == "matrix_fisher") return matrix_fisher_sampler(cfg.matrix_fisher, n, rng).report.samples;
  if (cfg.target_kind == "dirichlet") {
    const Eigen::VectorXd& alpha = cfg.dirichlet.alpha;
    Eigen::MatrixXd out(rows, alpha.size());
    for (Eigen::Index i = 0; i < rows; ++i) {
      double total = 0.0;
      for (Eigen::Index j = 0; j < alpha.size(); ++j) total += out(i, j) = std::gamma_distribution<double>(alpha(j))(rng);
      for (Eigen::Index j = 0; j < alpha.size(); ++j) {
        out(i, j) = std::sqrt(out(i, j) / total) * (uniform01(rng) < 0.5 ? -1.0 : 1.0);
      }
    }
    return out;
  }
  return std::nullopt;
}

json run_record_stats(const RunRecord& rec) {
  double mean_abs = 0.0;
  for (double dh : rec.delta_h) mean_abs += std::isfinite(dh) ? std::abs(dh) : 0.0;
  if (!rec.delta_h.empty()) mean_abs /= double(rec.delta_h.size());
  return {{"accept_count", rec.accept_count},
          {"total", rec.total},
          {"divergent_count", rec.divergent_count},
          {"mean_abs_delta_h", mean_abs}};
}

json rejection_stats(const RejectionReport& rep) {
  json j{{"n_proposals", rep.n_proposals}, {"n_accepted", rep.n_accepted}, {"rate", rep.rate()}};
  j["envelope_constant"] = rep.envelope_constant ? json(*rep.envelope_constant) : json(nullptr);
  if (rep.inner_proposals > 0) j["inner_proposals"] = rep.inner_proposals;
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

std::string histogram_csv(const Eigen::MatrixXd& samples, const HistogramSpec& spec) {
  const Eigen::VectorXd x = samples.col(spec.coordinate);
  double lo = x.size() ? x.minCoeff() : 0.0;
  double hi = x.size() ? x.maxCoeff() : 1.0;
  if (spec.range) std::tie(lo, hi) = *spec.range;
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / spec.bins;
  std::vector<std::size_t> counts(static_cast<std::size_t>(spec.bins), 0);
  for (double v : x) {
    if (v < lo || v > hi) continue;
    const auto b = std::min<std::size_t>(static_cast<std::size_t>((v - lo) / width), counts.size() - 1);
    ++counts[b];
  }
  std::ostringstream out;
  out << "bin_lo,bin_hi,count,density\n";
  for (int b = 0; b < spec.bins; ++b) {
    const double density = x.size() ? double(counts[b]) / (double(x.size()) * width) : 0.0;
    out << format_double(lo + b * width) << ',' << format_double(lo + (b + 1) * width) << ',' << counts[b] << ','
        << format_double(density) << '\n';
  }
  return out.str();
}

json read_json_file(const std::string& path) {
  const std::string text = read_file(path);
  return Document(text, path).parse();
}

Eigen::VectorXd ess_vector(const DiagnosticsSummary& s) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(s.ess.size()));
  for (std::size_t i = 0; i < s.ess.size(); ++i) out(static_cast<Eigen::Index>(i)) = s.ess[i].value_or(std::nan(""));
  return out;
}

json per_second(const Eigen::VectorXd& ess, double seconds) {
  json out = json::array();
  for (double e : ess) out.push_back(std::isfinite(e) && seconds > 0 ? json(e / seconds) : json(nullptr));
  return out;
}

}  // namespace

json ExperimentConfig::echo() const {
  json sampler{{"kind", sampler_kind}};
  if (is_gmc(sampler_kind)) {
    sampler["epsilon"] = gmc.epsilon;
    sampler["n_steps"] = gmc.n_steps;
    sampler["thin"] = thin;
    if (initial) sampler["initial"] = vector_to_json(*initial);
    if (sampler_kind == "gmc") {
      sampler["temperature"] = gmc.temperature;
    } else {
      sampler["temperatures"] = ladder.temperatures;
      sampler["swap_interval"] = ladder.swap_interval;
    }
  } else if (sampler_kind == "naive-conditional") {
    sampler["nu"] = nu;
    sampler["n_proposals"] = n_proposals;
  } else if (sampler_kind == "barbell") {
    sampler["n_proposals"] = n_proposals;
  }

  json j{{"experiment", experiment}, {"manifold", manifold_json}, {"target", target_json}, {"sampler", sampler},
         {"seed", seed}};
  if (!draws_from_proposals(sampler_kind)) j["n_draws"] = n_draws;
  if (is_gmc(sampler_kind)) {
    j["n_burnin"] = n_burnin;
    j["reference_draws"] = reference_draws;
  }
  if (!output_dir.empty()) j["output_dir"] = output_dir;
  if (histogram) {
    json h{{"coordinate", histogram->coordinate}, {"bins", histogram->bins}};
    if (histogram->range) h["range"] = {histogram->range->first, histogram->range->second};
    j["histogram"] = h;
  }
  return j;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source,
                              std::optional<std::uint64_t> seed_override) {
  const Document doc(text, source);
  const json root = doc.parse();
  const Fields top(doc, root, {});
  top.allow({"experiment", "manifold", "target", "sampler", "n_draws", "n_burnin", "reference_draws", "seed",
             "output_dir", "histogram"});

  ExperimentConfig cfg;
  cfg.experiment = top.string("experiment", std::string("experiment"));
  cfg.manifold = parse_manifold(Fields(doc, top.raw("manifold"), {"manifold"}));
  cfg.manifold_json = manifold_json(cfg.manifold);
  parse_target(Fields(doc, top.raw("target"), {"target"}), cfg);
  parse_sampler(Fields(doc, top.raw("sampler"), {"sampler"}), cfg);

  if (draws_from_proposals(cfg.sampler_kind)) {
    if (top.has("n_draws")) top.fail("n_draws", "not used by sampler '" + cfg.sampler_kind + "'; set sampler.n_proposals");
  } else {
    cfg.n_draws = top.count("n_draws");
  }
  if (is_gmc(cfg.sampler_kind)) {
    cfg.n_burnin = top.count("n_burnin", 0);
    cfg.reference_draws = top.count("reference_draws", cfg.n_draws);
  } else {
    for (const char* key : {"n_burnin", "reference_draws"}) {
      if (top.has(key)) top.fail(key, "only used by gmc samplers");
    }
  }

  if (seed_override) {
    cfg.seed = *seed_override;
  } else {
    if (!top.has("seed")) top.fail("seed", "missing field (a seed is mandatory; pass --seed or set it in the config)");
    const json& s = top.raw("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      top.fail("seed", "expected a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  cfg.gmc.seed = cfg.seed;
  cfg.output_dir = top.string("output_dir", std::string());

  if (top.has("histogram")) {
    const Fields h(doc, top.raw("histogram"), {"histogram"});
    h.allow({"coordinate", "bins", "range"});
    HistogramSpec spec;
    spec.coordinate = static_cast<int>(h.count("coordinate", 0));
    const int n_coords = static_cast<int>(coordinate_names(cfg.manifold).size());
    if (spec.coordinate >= n_coords) h.fail("coordinate", "must be < " + std::to_string(n_coords));
    const std::size_t bins = h.count("bins", 50);
    if (bins < 1 || bins > 100000) h.fail("bins", "must be in [1, 100000]");
    spec.bins = static_cast<int>(bins);
    if (h.has("range")) {
      const Eigen::VectorXd r = h.vector("range");
      if (r.size() != 2 || !(r(1) > r(0))) h.fail("range", "expected [lo, hi] with lo < hi");
      spec.range = std::make_pair(r(0), r(1));
    }
    cfg.histogram = spec;
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override) {
  return parse_config(read_file(path), path, seed_override);
}

std::vector<std::string> coordinate_names(const ManifoldSpec& m) {
  std::vector<std::string> names;
  switch (m.kind()) {
    case ManifoldKind::Stiefel:
      for (int j = 0; j < m.cols(); ++j) {
        for (int i = 0; i < m.rows(); ++i) names.push_back("q_r" + std::to_string(i) + "_c" + std::to_string(j));
      }
      break;
    case ManifoldKind::BallViaSphere:
      for (int i = 0; i < m.intrinsic_dim(); ++i) names.push_back("theta" + std::to_string(i));
      break;
    case ManifoldKind::Barbell: names = {"x", "y", "z"}; break;
    default:
      for (int i = 0; i < m.ambient_dim(); ++i) names.push_back("x" + std::to_string(i));
  }
  return names;
}

RunResult execute(const ExperimentConfig& cfg) {
  RunResult out;
  out.names = coordinate_names(cfg.manifold);
  Rng rng(cfg.seed);
  const auto start = std::chrono::steady_clock::now();
  const std::string& kind = cfg.sampler_kind;

  if (kind == "gmc" && cfg.manifold.kind() == ManifoldKind::BallViaSphere) {
    const RunRecord rec = sample_on_ball(uniform_ball_target(cfg.manifold.intrinsic_dim()), cfg.gmc, cfg.n_draws,
                                         cfg.n_burnin, *cfg.initial, cfg.thin);
    out.samples = rec.samples;
    out.accept_rate = rec.accept_rate();
    out.stats = run_record_stats(rec);
  } else if (kind == "gmc") {
    const RunRecord rec = sample(build_target(cfg), cfg.gmc, cfg.n_draws, cfg.n_burnin, *cfg.initial, cfg.thin);
    out.samples = rec.samples;
    out.accept_rate = rec.accept_rate();
    out.stats = run_record_stats(rec);
  } else if (kind == "tempered-gmc") {
    const TemperingRecord rec =
        parallel_tempering(build_target(cfg), cfg.ladder, cfg.gmc, cfg.n_draws, cfg.n_burnin, *cfg.initial, cfg.thin);
    out.samples = rec.cold.samples;
    out.accept_rate = rec.cold.accept_rate();
    out.stats = run_record_stats(rec.cold);
    json swaps = json::array();
    for (std::size_t i = 0; i < rec.swaps.attempts.size(); ++i) {
      swaps.push_back({{"pair", {i, i + 1}},
                       {"attempts", rec.swaps.attempts[i]},
                       {"accepts", rec.swaps.accepts[i]},
                       {"rate", rec.swaps.rate(i)}});
    }
    out.stats["swaps"] = swaps;
  } else if (kind == "naive-conditional") {
    const GaussianEquivalent<double> g = gaussian_equivalent(cfg.fisher_bingham);
    const RejectionReport rep = naive_conditional_fb(g, cfg.nu, cfg.n_proposals, rng);
    out.samples = rep.samples;
    out.accept_rate = rep.rate();
    out.stats = rejection_stats(rep);
    out.stats["gaussian_equivalent"] = g;
  } else if (kind == "acg-bingham") {
    const RejectionReport rep = acg_rejection_bingham(cfg.fisher_bingham.A, cfg.n_draws, rng);
    out.samples = rep.samples;
    out.accept_rate = rep.rate();
    out.stats = rejection_stats(rep);
  } else if (kind == "fb-envelope") {
    const RejectionReport rep = bingham_envelope_fb(cfg.fisher_bingham, cfg.n_draws, rng);
    out.samples = rep.samples;
    out.accept_rate = rep.rate();
    out.stats = rejection_stats(rep);
  } else if (kind == "matrix-fisher") {
    const MatrixFisherDraws draws = matrix_fisher_sampler(cfg.matrix_fisher, cfg.n_draws, rng);
    out.samples = draws.report.samples;
    out.accept_rate = draws.report.rate();
    out.stats = rejection_stats(draws.report);
  } else if (kind == "barbell") {
    RejectionReport xs = barbell_rejection_x(cfg.barbell, cfg.n_proposals, rng);
    out.accept_rate = xs.rate();
    out.stats = rejection_stats(xs);
    const BarbellSurface surf = barbell_surface_from_x(cfg.barbell, std::move(xs), rng);
    out.samples = surf.points;
  } else {
    throw NotImplementedError("sampler '" + kind + "'");
  }
  out.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (is_gmc(kind)) {
    Rng ref_rng(derive_seed(cfg.seed, kReferenceStream));
    out.reference = exact_reference(cfg, cfg.reference_draws, ref_rng);
  }
  return out;
}

void write_run(const ExperimentConfig& cfg, const RunResult& result, const std::string& dir) {
  const fs::path root(dir);
  fs::create_directories(root);

  std::vector<std::pair<fs::path, fs::path>> staged;
  const auto stage = [&](const std::string& name) {
    const fs::path final_path = root / name;
    const fs::path tmp = root / (name + ".partial");
    staged.emplace_back(tmp, final_path);
    return tmp;
  };
  try {
    write_csv(stage("samples.csv").string(), result.names, result.samples);

    const DiagnosticsSummary summary =
        summarize(result.samples, result.accept_rate, result.reference ? &*result.reference : nullptr);
    json diag = summary;
    diag["experiment"] = cfg.experiment;
    diag["sampler"] = cfg.sampler_kind;
    diag["n_draws"] = result.samples.rows();
    diag["coordinates"] = result.names;
    diag["elapsed_seconds"] = result.elapsed_seconds;
    diag["ess_per_second"] = per_second(ess_vector(summary), result.elapsed_seconds);
    diag["reference"] = result.reference
                            ? json{{"kind", "exact"}, {"n_draws", result.reference->rows()}}
                            : json(nullptr);
    diag["stats"] = result.stats;
    write_text(stage("diagnostics.json"), diag.dump(2) + "\n");
    write_text(stage("config-echo.json"), cfg.echo().dump(2) + "\n");

    if (cfg.histogram) write_text(stage("histogram.csv"), histogram_csv(result.samples, *cfg.histogram));
    if (cfg.manifold.kind() == ManifoldKind::SimplexViaSphere) {
      Eigen::MatrixXd simplex = result.samples.array().square();
      std::vector<std::string> names;
      for (int i = 0; i < cfg.manifold.ambient_dim(); ++i) names.push_back("p" + std::to_string(i));
      write_csv(stage("simplex.csv").string(), names, simplex);
    }
    for (const auto& [tmp, final_path] : staged) fs::rename(tmp, final_path);
  } catch (...) {
    std::error_code ec;
    for (const auto& [tmp, final_path] : staged) fs::remove(tmp, ec);
    throw;
  }
}

json compare_runs(const std::string& dir_a, const std::string& dir_b) {
  const fs::path a(dir_a), b(dir_b);
  const json echo_a = read_json_file((a / "config-echo.json").string());
  const json echo_b = read_json_file((b / "config-echo.json").string());
  for (const char* key : {"manifold", "target"}) {
    if (!echo_a.contains(key) || !echo_b.contains(key)) {
      throw InputError(std::string("config-echo.json lacks '") + key + "'; is this a run directory?");
    }
    if (echo_a[key] != echo_b[key]) {
      throw InputError(std::string("refusing to compare runs with different ") + key + "s: " + dir_a + " has " +
                       echo_a[key].dump() + ", " + dir_b + " has " + echo_b[key].dump());
    }
  }
  const CsvTable sa = read_csv((a / "samples.csv").string());
  const CsvTable sb = read_csv((b / "samples.csv").string());
  if (sa.header != sb.header) throw InputError("samples.csv headers differ between " + dir_a + " and " + dir_b);
  if (sa.values.rows() == 0 || sb.values.rows() == 0) throw InputError("cannot compare an empty run");
  const json diag_a = read_json_file((a / "diagnostics.json").string());
  const json diag_b = read_json_file((b / "diagnostics.json").string());

  const auto side = [](const std::string& dir, const json& echo, const json& diag, const CsvTable& t) {
    const DiagnosticsSummary s = summarize(t.values, diag.value("accept_rate", 1.0));
    const double seconds = diag.value("elapsed_seconds", 0.0);
    json ess = json::array();
    for (const auto& e : s.ess) ess.push_back(e ? json(*e) : json(nullptr));
    return json{{"dir", dir},
                {"sampler", echo.value("sampler", json::object()).value("kind", "")},
                {"n_draws", t.values.rows()},
                {"accept_rate", s.accept_rate},
                {"elapsed_seconds", seconds},
                {"ess", ess},
                {"ess_per_second", per_second(ess_vector(s), seconds)}};
  };

  json ks = json::array();
  for (Eigen::Index j = 0; j < sa.values.cols(); ++j) {
    const Eigen::VectorXd x = sa.values.col(j), y = sb.values.col(j);
    const KsResult r = ks_two_sample({x.data(), x.data() + x.size()}, {y.data(), y.data() + y.size()});
    ks.push_back({{"coordinate", sa.header[static_cast<std::size_t>(j)]}, {"statistic", r.statistic},
                  {"p_value", r.p_value}});
  }
  return json{{"coordinates", sa.header},
              {"run_a", side(dir_a, echo_a, diag_a, sa)},
              {"run_b", side(dir_b, echo_b, diag_b, sb)},
              {"ks_results", ks},
              {"moment_deltas", moment_compare(sa.values, sb.values)}};
}

Frames read_frames(const std::string& path) {
  const CsvTable table = read_csv(path);
  Frames out;
  const std::regex stiefel_name(R"(q_r(\d+)_c(\d+))");
  const std::regex sphere_name(R"(x(\d+))");
  std::smatch match;

  const std::size_t n = table.header.size();
  std::vector<std::pair<int, int>> where(n);
  bool stiefel = true, sphere = true;
  int p = 0, k = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (std::regex_match(table.header[c], match, stiefel_name)) {
      where[c] = {std::stoi(match[1]), std::stoi(match[2])};
      p = std::max(p, where[c].first + 1);
      k = std::max(k, where[c].second + 1);
      sphere = false;
    } else if (std::regex_match(table.header[c], match, sphere_name)) {
      where[c] = {std::stoi(match[1]), 0};
      p = std::max(p, where[c].first + 1);
      k = 1;
      stiefel = false;
    } else {
      throw InputError(path + ":1: column '" + table.header[c] + "' is neither q_r<i>_c<j> nor x<i>");
    }
  }
  if (!stiefel && !sphere) throw InputError(path + ":1: header mixes q_r<i>_c<j> and x<i> columns");
  if (n == 0 || static_cast<std::size_t>(p) * static_cast<std::size_t>(k) != n) {
    throw InputError(path + ":1: header does not name every entry of a " + std::to_string(p) + "x" +
                     std::to_string(k) + " frame exactly once");
  }
  std::vector<Eigen::Index> slot(n);
  std::set<Eigen::Index> seen;
  for (std::size_t c = 0; c < n; ++c) {
    slot[c] = static_cast<Eigen::Index>(where[c].second) * p + where[c].first;
    if (!seen.insert(slot[c]).second) throw InputError(path + ":1: duplicate column '" + table.header[c] + "'");
  }
  if (sphere && p < 2) throw InputError(path + ":1: a sphere frame needs at least 2 coordinates");
  out.manifold = sphere ? ManifoldSpec::sphere(p - 1) : ManifoldSpec::stiefel(k, p);
  out.header = coordinate_names(out.manifold);

  for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
    Eigen::VectorXd q(static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < n; ++c) q(slot[c]) = table.values(r, static_cast<Eigen::Index>(c));
    const double err = constraint_error(out.manifold, q);
    if (!(err <= kPointTolerance)) {
      throw InputError(path + ":" + std::to_string(r + 2) + ": frame is not orthonormal (error " +
                       format_double(err) + ")");
    }
    out.frames.push_back(std::move(q));
  }
  return out;
}

std::vector<Eigen::VectorXd> tour_path(const Frames& frames, int n_interp) {
  if (frames.frames.size() < 2) throw InputError("a tour needs at least 2 frames");
  if (n_interp < 2) throw InputError("--n-interp must be >= 2");
  std::vector<Eigen::VectorXd> path;
  for (std::size_t i = 0; i + 1 < frames.frames.size(); ++i) {
    const auto segment = geodesic_interpolate(frames.manifold, frames.frames[i], frames.frames[i + 1], n_interp);
    path.insert(path.end(), segment.begin() + (i == 0 ? 0 : 1), segment.end());
  }
  return path;
}

namespace {

int report(const std::string& message, int code) {
  std::cerr << "gmc_tool: error: " << message << '\n';
  return code;
}

int run_command(const std::string& config_path, const std::string& out_flag, std::optional<std::uint64_t> seed) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path, seed);
  } catch (const Error& e) {
    return report(e.what(), kValidation);
  }
  const std::string dir = !out_flag.empty() ? out_flag : (!cfg.output_dir.empty() ? cfg.output_dir : "gmc-out");
  try {
    const RunResult result = execute(cfg);
    write_run(cfg, result, dir);
    std::cout << "wrote " << result.samples.rows() << " draws to " << dir << " (accept rate "
              << result.accept_rate << ")\n";
  } catch (const std::exception& e) {
    return report(std::string("run failed: ") + e.what(), kRuntime);
  }
  return kSuccess;
}

int compare_command(const std::string& a, const std::string& b, const std::string& out_flag) {
  json comparison;
  try {
    comparison = compare_runs(a, b);
  } catch (const Error& e) {
    return report(e.what(), kValidation);
  }
  try {
    const fs::path dir(out_flag.empty() ? "." : out_flag);
    fs::create_directories(dir);
    const fs::path tmp = dir / "comparison.json.partial";
    write_text(tmp, comparison.dump(2) + "\n");
    fs::rename(tmp, dir / "comparison.json");
    std::cout << "wrote " << (dir / "comparison.json").string() << '\n';
  } catch (const std::exception& e) {
    return report(e.what(), kRuntime);
  }
  return kSuccess;
}

int tour_command(const std::string& frames_path, int n_interp, const std::string& out_flag) {
  std::vector<Eigen::VectorXd> path;
  Frames frames;
  try {
    frames = read_frames(frames_path);
    path = tour_path(frames, n_interp);
  } catch (const Error& e) {
    return report(e.what(), kValidation);
  }
  try {
    const fs::path dir(out_flag.empty() ? "." : out_flag);
    fs::create_directories(dir);
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(path.size()), frames.manifold.ambient_dim());
    for (std::size_t i = 0; i < path.size(); ++i) rows.row(static_cast<Eigen::Index>(i)) = path[i].transpose();
    const fs::path tmp = dir / "frames.csv.partial";
    write_csv(tmp.string(), frames.header, rows);
    fs::rename(tmp, dir / "frames.csv");
    std::cout << "wrote " << path.size() << " frames to " << (dir / "frames.csv").string() << '\n';
  } catch (const std::exception& e) {
    return report(e.what(), kRuntime);
  }
  return kSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesic Monte Carlo experiments on spheres, Stiefel manifolds and friends"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "Run one experiment config and write samples.csv, diagnostics.json, config-echo.json");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides output_dir in the config)");
  auto* seed_opt = run->add_option("--seed", seed, "RNG seed (overrides the config)");

  std::string run_a, run_b;
  auto* compare = app.add_subcommand("compare", "Compare two run directories targeting the same distribution");
  compare->add_option("run_a", run_a, "First run directory")->required();
  compare->add_option("run_b", run_b, "Second run directory")->required();
  compare->add_option("--out", out_dir, "Directory for comparison.json (default: current directory)");

  std::string frames_path;
  int n_interp = 10;
  auto* tour = app.add_subcommand("tour", "Interpolate geodesics through a sequence of frames");
  tour->add_option("frames", frames_path, "CSV of frames (header q_r<i>_c<j> or x<i>)")->required();
  tour->add_option("--n-interp", n_interp, "Frames per segment, endpoints included")->capture_default_str();
  tour->add_option("--out", out_dir, "Directory for frames.csv (default: current directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kValidation;
  }

  if (run->parsed()) {
    return run_command(config_path, out_dir, seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt);
  }
  if (compare->parsed()) return compare_command(run_a, run_b, out_dir);
  return tour_command(frames_path, n_interp, out_dir);
}

}  // namespace gmc::cli
