#include "bandit/feature_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "bandit/environment.hpp"
#include "bandit/error.hpp"

namespace bandit {
namespace {

[[noreturn]] void malformed(const std::string& path, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kIoError, path + ":" + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& tok, const std::string& path, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    malformed(path, line, "bad number '" + tok + "'");
  }
  return v;
}

void put_double(std::ostream& os, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  os.write(buf, res.ptr - buf);
}

}  // namespace

FeatureFile read_feature_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open feature file " + path);

  std::string text;
  std::size_t line_no = 1;
  if (!std::getline(in, text)) malformed(path, line_no, "missing header");
  int dim = 0;
  long rows = -1;
  {
    std::istringstream hs(text);
    std::string a, b;
    hs >> a >> b;
    if (a.rfind("dim=", 0) != 0 || b.rfind("n=", 0) != 0) malformed(path, line_no, "expected 'dim=<d> n=<rows>'");
    dim = static_cast<int>(parse_double(a.substr(4), path, line_no));
    rows = static_cast<long>(parse_double(b.substr(2), path, line_no));
    if (dim < 1 || rows < 0) malformed(path, line_no, "non-positive dim or negative n");
  }

  FeatureFile file;
  file.dim = dim;
  file.features.resize(rows, dim);
  file.labels.reserve(static_cast<std::size_t>(rows));

  std::vector<std::string> toks;
  for (long r = 0; r < rows; ++r) {
    ++line_no;
    if (!std::getline(in, text)) malformed(path, line_no, "file ends before " + std::to_string(rows) + " rows");
    std::istringstream ls(text);
    toks.clear();
    for (std::string t; ls >> t;) toks.push_back(t);
    if (toks.size() != static_cast<std::size_t>(dim) + 1) {
      malformed(path, line_no, "expected label and " + std::to_string(dim) + " values");
    }
    if (toks[0] != "0" && toks[0] != "1") malformed(path, line_no, "label must be 0 or 1");
    file.labels.push_back(toks[0] == "1" ? 1 : 0);
    for (int j = 0; j < dim; ++j) file.features(r, j) = parse_double(toks[static_cast<std::size_t>(j) + 1], path, line_no);
  }

  while (std::getline(in, text)) {
    ++line_no;
    std::istringstream ls(text);
    toks.clear();
    for (std::string t; ls >> t;) toks.push_back(t);
    if (toks.empty()) continue;
    if (toks[0] != "theta_star" || toks.size() != static_cast<std::size_t>(dim) + 1 || file.theta_star) {
      malformed(path, line_no, "unexpected trailing content");
    }
    Eigen::VectorXd theta(dim);
    for (int j = 0; j < dim; ++j) theta[j] = parse_double(toks[static_cast<std::size_t>(j) + 1], path, line_no);
    file.theta_star = theta;
  }
  return file;
}

void write_feature_file(const std::string& path, const FeatureFile& file) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write feature file " + path);
  out << "dim=" << file.dim << " n=" << file.features.rows() << '\n';
  for (Eigen::Index i = 0; i < file.features.rows(); ++i) {
    out << file.labels[static_cast<std::size_t>(i)];
    for (int j = 0; j < file.dim; ++j) {
      out << ' ';
      put_double(out, file.features(i, j));
    }
    out << '\n';
  }
  if (file.theta_star) {
    out << "theta_star";
    for (int j = 0; j < file.dim; ++j) {
      out << ' ';
      put_double(out, (*file.theta_star)[j]);
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path);
}

Eigen::VectorXd fit_least_squares(const FeatureFile& file) {
  Eigen::VectorXd y(file.features.rows());
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = file.labels[static_cast<std::size_t>(i)];
  return file.features.colPivHouseholderQr().solve(y);
}

FeatureFile make_synthetic_feature_file(int dim, int rows_per_class, double label_noise, std::uint64_t seed) {
  if (dim < 2 || rows_per_class < 1) throw Error(ErrorCode::kInvalidArgument, "need dim >= 2 and rows >= 1");
  Rng rng = make_stream(seed, 2);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Two class centres; features are centre + isotropic jitter, normalized.
  Eigen::VectorXd pos_centre = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd neg_centre = Eigen::VectorXd::Zero(dim);
  pos_centre[0] = 1.0;
  neg_centre[1] = 1.0;

  FeatureFile file;
  file.dim = dim;
  file.features.resize(2 * rows_per_class, dim);
  file.labels.resize(static_cast<std::size_t>(2 * rows_per_class));
  for (int i = 0; i < 2 * rows_per_class; ++i) {
    const int label = i < rows_per_class ? 1 : 0;
    Eigen::VectorXd v = label == 1 ? pos_centre : neg_centre;
    for (int j = 0; j < dim; ++j) v[j] += label_noise * normal(rng);
    file.features.row(i) = (v / v.norm()).transpose();
    file.labels[static_cast<std::size_t>(i)] = label;
  }
  return file;
}

}  // namespace bandit
