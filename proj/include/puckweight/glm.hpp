#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "puckweight/features.hpp"
#include "puckweight/tables.hpp"

namespace puckweight::glm {

struct IrlsOptions {
  int max_iter = 50;
  double tol = 1e-8;  // max absolute coefficient change
};

struct FittedModel {
  std::vector<std::string> predictor_names;
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd covariance;  // inverse observed Fisher information
  std::int64_t n_obs = 0;
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Maximum-likelihood logistic regression by iteratively reweighted least
// squares (Newton-Raphson on the binomial deviance) with step-halving.
// Each weighted least-squares step is solved through a Householder QR of
// the weighted design rather than by inverting normal equations; the
// covariance comes from the final R factor. Raises on rank-deficient
// designs (naming a dependent column) and on complete separation.
FittedModel fit_irls(const Eigen::MatrixXd& design, const Eigen::VectorXd& labels,
                     const std::vector<std::string>& names,
                     const IrlsOptions& options = {});

double log_likelihood(const Eigen::MatrixXd& design,
                      const Eigen::VectorXd& labels,
                      const Eigen::VectorXd& beta);
Eigen::VectorXd log_likelihood_gradient(const Eigen::MatrixXd& design,
                                        const Eigen::VectorXd& labels,
                                        const Eigen::VectorXd& beta);

struct SummaryRow {
  std::string predictor;
  double coefficient = 0.0;
  double std_error = 0.0;
  double odds = 1.0;
  double z = 0.0;
  double p_value = 1.0;
  std::string signif;  // R-style: *** ** * . or blank
};

std::vector<SummaryRow> summarize(const FittedModel& model);
Table summary_table(const FittedModel& model);

struct Prediction {
  double probability = 0.0;
  double std_error = 0.0;
  double linear_predictor = 0.0;
};

Prediction predict(const FittedModel& model, const features::FeatureVector& fv);
Prediction predict_expanded(const FittedModel& model, const Eigen::VectorXd& x);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

struct RocResult {
  std::vector<RocPoint> points;  // from (0,0) to (1,1)
  double auc = 0.0;
};

// ROC over all distinct score thresholds; AUC by the trapezoid rule, which
// with tied scores grouped equals the Mann-Whitney concordance probability
// with ties counted one half. Both classes must be present.
RocResult roc_auc(std::span<const double> scores, std::span<const int> labels);

inline double logistic(double eta) {
  if (eta >= 0) {
    return 1.0 / (1.0 + std::exp(-eta));
  }
  double e = std::exp(eta);
  return e / (1.0 + e);
}

inline constexpr const char* kModelVersionLine = "#puckweight-model v1";

// Versioned text format: coefficients at 17 significant digits and the
// lower triangle of the covariance. save/load round-trips exactly.
void save_model(std::ostream& out, const FittedModel& model);
void save_model_file(const std::filesystem::path& path,
                     const FittedModel& model);
FittedModel load_model(std::istream& in,
                       const std::string& source_name = "model");
FittedModel load_model_file(const std::filesystem::path& path);

}  // namespace puckweight::glm
