#include "puckweight/glm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "puckweight/errors.hpp"

namespace puckweight::glm {

namespace {

constexpr double kMinWeight = 1e-10;
constexpr double kSeparationDeviance = 1e-8;

// log(1 + e^eta), overflow-safe
double log1pexp(double eta) {
  if (eta > 35.0) return eta;
  if (eta < -35.0) return std::exp(eta);
  return std::log1p(std::exp(eta));
}

double deviance(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                const Eigen::VectorXd& beta) {
  return -2.0 * log_likelihood(X, y, beta);
}

double normal_sf(double z) {
  // upper tail of the standard normal
  return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

std::string significance_code(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  if (p < 0.1) return ".";
  return "";
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double log_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& beta) {
  Eigen::VectorXd eta = X * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    ll += y(i) * eta(i) - log1pexp(eta(i));
  }
  return ll;
}

Eigen::VectorXd log_likelihood_gradient(const Eigen::MatrixXd& X,
                                        const Eigen::VectorXd& y,
                                        const Eigen::VectorXd& beta) {
  Eigen::VectorXd eta = X * beta;
  Eigen::VectorXd resid(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    resid(i) = y(i) - logistic(eta(i));
  }
  return X.transpose() * resid;
}

FittedModel fit_irls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const std::vector<std::string>& names,
                     const IrlsOptions& options) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (static_cast<Eigen::Index>(names.size()) != p) {
    throw Error(ErrorCategory::Data, "predictor name count does not match "
                                     "design columns");
  }
  {
    std::set<std::string> uniq(names.begin(), names.end());
    if (static_cast<Eigen::Index>(uniq.size()) != p) {
      throw Error(ErrorCategory::Data, "duplicate predictor names");
    }
  }
  if (y.size() != n) {
    throw Error(ErrorCategory::Data, "label count does not match design rows");
  }
  if (n <= p) {
    throw Error(ErrorCategory::Numeric,
                "need more observations than predictors (" +
                    std::to_string(n) + " rows, " + std::to_string(p) +
                    " columns)");
  }

  // Rank check once, on the unweighted design; the IRLS weights never
  // change the column space.
  {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_qr(X);
    rank_qr.setThreshold(1e-10);
    if (rank_qr.rank() < p) {
      Eigen::Index bad = rank_qr.colsPermutation().indices()(p - 1);
      throw Error(ErrorCategory::Numeric,
                  "design is rank deficient; column '" +
                      names[static_cast<std::size_t>(bad)] +
                      "' is linearly dependent on the others");
    }
  }

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double dev = deviance(X, y, beta);

  FittedModel model;
  model.predictor_names = names;
  model.n_obs = n;

  bool converged = false;
  int iter = 0;
  Eigen::VectorXd eta(n), mu(n), w(n), z(n);
  for (iter = 1; iter <= options.max_iter; ++iter) {
    eta = X * beta;
    for (Eigen::Index i = 0; i < n; ++i) {
      mu(i) = logistic(eta(i));
      w(i) = std::max(mu(i) * (1.0 - mu(i)), kMinWeight);
      z(i) = eta(i) + (y(i) - mu(i)) / w(i);
    }
    Eigen::VectorXd sqw = w.cwiseSqrt();
    Eigen::MatrixXd A = sqw.asDiagonal() * X;
    Eigen::VectorXd b = sqw.cwiseProduct(z);
    Eigen::VectorXd proposal = A.householderQr().solve(b);

    // Step-halve if the full Newton step increases the deviance.
    double new_dev = deviance(X, y, proposal);
    int halvings = 0;
    while (new_dev > dev + 1e-12 * (std::abs(dev) + 1.0) && halvings < 30) {
      proposal = 0.5 * (proposal + beta);
      new_dev = deviance(X, y, proposal);
      ++halvings;
    }

    double delta = (proposal - beta).cwiseAbs().maxCoeff();
    beta = proposal;
    dev = new_dev;

    // A deviance at zero is only reachable with fitted probabilities pinned
    // to the labels, i.e. diverging coefficients.
    if (dev < kSeparationDeviance) {
      throw Error(ErrorCategory::Numeric,
                  "complete separation detected: deviance collapsed to zero "
                  "and coefficients diverge");
    }
    if (delta < options.tol) {
      converged = true;
      break;
    }
  }

  model.coefficients = beta;
  model.converged = converged;
  model.iterations = std::min(iter, options.max_iter);
  model.log_likelihood = log_likelihood(X, y, beta);

  // Covariance from the QR of the weighted design at the optimum:
  // (X' W X)^-1 = R^-1 R^-T.
  eta = X * beta;
  for (Eigen::Index i = 0; i < n; ++i) {
    mu(i) = logistic(eta(i));
    w(i) = std::max(mu(i) * (1.0 - mu(i)), kMinWeight);
  }
  Eigen::MatrixXd A = w.cwiseSqrt().asDiagonal() * X;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  Eigen::MatrixXd R = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  Eigen::MatrixXd Rinv =
      R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  model.covariance = Rinv * Rinv.transpose();
  model.covariance = 0.5 * (model.covariance + model.covariance.transpose());
  return model;
}

std::vector<SummaryRow> summarize(const FittedModel& model) {
  std::vector<SummaryRow> rows;
  const Eigen::Index p = model.coefficients.size();
  rows.reserve(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    SummaryRow r;
    r.predictor = model.predictor_names[static_cast<std::size_t>(j)];
    r.coefficient = model.coefficients(j);
    r.std_error = std::sqrt(std::max(model.covariance(j, j), 0.0));
    r.odds = std::exp(r.coefficient);
    if (r.std_error > 0) {
      r.z = r.coefficient / r.std_error;
      r.p_value = 2.0 * normal_sf(std::abs(r.z));
    } else if (r.coefficient == 0.0) {
      r.z = 0.0;
      r.p_value = 1.0;
    } else {
      r.z = r.coefficient > 0 ? std::numeric_limits<double>::infinity()
                              : -std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
    }
    r.signif = significance_code(r.p_value);
    rows.push_back(std::move(r));
  }
  return rows;
}

Table summary_table(const FittedModel& model) {
  Table t;
  t.columns = {"Predictor", "Coeff", "Error", "Odds", "Z-val", "P-value",
               "Signif"};
  t.formats = {ColumnFormat::Text,    ColumnFormat::Fixed3,
               ColumnFormat::Fixed3,  ColumnFormat::Fixed2,
               ColumnFormat::Fixed2,  ColumnFormat::General,
               ColumnFormat::Text};
  for (const auto& r : summarize(model)) {
    t.add_row({r.predictor, r.coefficient, r.std_error, r.odds, r.z, r.p_value,
               r.signif});
  }
  return t;
}

Prediction predict_expanded(const FittedModel& model,
                            const Eigen::VectorXd& x) {
  if (x.size() != model.coefficients.size()) {
    throw Error(ErrorCategory::Data,
                "feature vector length does not match model");
  }
  Prediction pred;
  pred.linear_predictor = model.coefficients.dot(x);
  pred.probability = logistic(pred.linear_predictor);
  double quad = x.dot(model.covariance * x);
  pred.std_error = pred.probability * (1.0 - pred.probability) *
                   std::sqrt(std::max(quad, 0.0));
  return pred;
}

Prediction predict(const FittedModel& model,
                   const features::FeatureVector& fv) {
  return predict_expanded(model, features::expand(fv, model.predictor_names));
}

RocResult roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw Error(ErrorCategory::Data, "scores and labels must align");
  }
  std::int64_t pos = 0, neg = 0;
  for (int lbl : labels) (lbl ? pos : neg) += 1;
  if (pos == 0 || neg == 0) {
    throw Error(ErrorCategory::Data,
                "ROC needs both classes present (" + std::to_string(pos) +
                    " positives, " + std::to_string(neg) + " negatives)");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  RocResult result;
  result.points.push_back(
      {0.0, 0.0, std::numeric_limits<double>::infinity()});

  // Integer accumulation keeps trapezoid AUC exactly equal to the pairwise
  // concordance count.
  std::int64_t tp = 0, fp = 0;
  std::int64_t twice_area = 0;  // sum of (tp_prev + tp) * (fp - fp_prev)
  std::size_t i = 0;
  while (i < order.size()) {
    double threshold = scores[order[i]];
    std::int64_t tp_prev = tp, fp_prev = fp;
    while (i < order.size() && scores[order[i]] == threshold) {
      (labels[order[i]] ? tp : fp) += 1;
      ++i;
    }
    twice_area += (tp_prev + tp) * (fp - fp_prev);
    result.points.push_back({static_cast<double>(fp) / neg,
                             static_cast<double>(tp) / pos, threshold});
  }
  result.auc = static_cast<double>(twice_area) /
               (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
  return result;
}

void save_model(std::ostream& out, const FittedModel& model) {
  const Eigen::Index p = model.coefficients.size();
  out << kModelVersionLine << '\n';
  out << "predictors " << p << '\n';
  for (Eigen::Index j = 0; j < p; ++j) {
    out << model.predictor_names[static_cast<std::size_t>(j)] << ' '
        << fmt17(model.coefficients(j)) << '\n';
  }
  out << "covariance\n";
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      if (j) out << ' ';
      out << fmt17(model.covariance(i, j));
    }
    out << '\n';
  }
  out << "n_obs " << model.n_obs << '\n';
  out << "log_likelihood " << fmt17(model.log_likelihood) << '\n';
  out << "converged " << (model.converged ? 1 : 0) << '\n';
  out << "iterations " << model.iterations << '\n';
}

void save_model_file(const std::filesystem::path& path,
                     const FittedModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCategory::Data, "cannot write " + path.string());
  }
  save_model(out, model);
}

FittedModel load_model(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCategory::Parse, source_name + ": empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kModelVersionLine) {
    throw Error(ErrorCategory::SchemaVersion,
                source_name + ": unsupported version line '" + line + "'");
  }

  auto fail = [&](const std::string& what) -> void {
    throw Error(ErrorCategory::Parse, source_name + ": " + what);
  };

  std::string word;
  Eigen::Index p = 0;
  if (!(in >> word >> p) || word != "predictors" || p <= 0) {
    fail("expected 'predictors <count>'");
  }
  FittedModel model;
  model.predictor_names.resize(static_cast<std::size_t>(p));
  model.coefficients.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!(in >> model.predictor_names[static_cast<std::size_t>(j)] >>
          model.coefficients(j))) {
      fail("truncated coefficient block");
    }
  }
  {
    std::set<std::string> uniq(model.predictor_names.begin(),
                               model.predictor_names.end());
    if (static_cast<Eigen::Index>(uniq.size()) != p) {
      fail("duplicate predictor names");
    }
  }
  if (!(in >> word) || word != "covariance") fail("expected 'covariance'");
  model.covariance = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double v;
      if (!(in >> v)) fail("truncated covariance block");
      model.covariance(i, j) = v;
      model.covariance(j, i) = v;
    }
  }
  while (in >> word) {
    if (word == "n_obs") {
      if (!(in >> model.n_obs)) fail("bad n_obs");
    } else if (word == "log_likelihood") {
      if (!(in >> model.log_likelihood)) fail("bad log_likelihood");
    } else if (word == "converged") {
      int c;
      if (!(in >> c)) fail("bad converged flag");
      model.converged = c != 0;
    } else if (word == "iterations") {
      if (!(in >> model.iterations)) fail("bad iterations");
    } else {
      fail("unexpected token '" + word + "'");
    }
  }
  return model;
}

FittedModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCategory::MissingInput,
                "cannot open model file: " + path.string());
  }
  return load_model(in, path.filename().string());
}

}  // namespace puckweight::glm
