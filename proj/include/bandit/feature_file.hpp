#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bandit {

/// Precomputed feature table backing the dataset environment.
///
/// Text layout:
///   dim=<d> n=<rows>
///   <label in {0,1}> <d floats>        (n lines)
///   theta_star <d floats>              (optional)
/// Floats are written with 17 significant digits.
struct FeatureFile {
  int dim = 0;
  std::vector<int> labels;
  Eigen::MatrixXd features;  // one row per example
  std::optional<Eigen::VectorXd> theta_star;
};

FeatureFile read_feature_file(const std::string& path);
void write_feature_file(const std::string& path, const FeatureFile& file);

/// argmin_theta sum_i (phi_i^T theta - label_i)^2.
Eigen::VectorXd fit_least_squares(const FeatureFile& file);

/// Unit-norm features whose labels follow a noisy linear rule; stands in for
/// the image-feature table when exercising the dataset code path.
FeatureFile make_synthetic_feature_file(int dim, int rows_per_class, double label_noise,
                                        std::uint64_t seed);

}  // namespace bandit
