#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "skeptic/survey.hpp"

namespace skeptic::estimators {

// Dense design matrix with a leading intercept column of ones. Values are
// finite; rank is checked by the estimator consuming it.
struct DesignMatrix {
  Eigen::MatrixXd values;          // n x k
  std::vector<std::string> names;  // k entries, names[0] == "const"

  long n() const { return values.rows(); }
  int k() const { return static_cast<int>(values.cols()); }
};

// Listwise-complete analysis view over a dataset: the design built from the
// requested covariates plus the outcome columns, all row-aligned.
struct AnalysisFrame {
  DesignMatrix x;          // [const | covariates]
  Eigen::VectorXd prior;
  Eigen::VectorXd post;
  Eigen::VectorXd change;  // 0/1 as double
  std::vector<int> row_index;  // positions in the source dataset
};

// Drops invalid rows and rows missing any requested covariate.
AnalysisFrame make_frame(const dataio::Dataset& data,
                         const std::vector<std::string>& covariates);

// [const, prior, covariates...] — the regressor set of the change equation.
DesignMatrix design_with_prior(const AnalysisFrame& frame);

}  // namespace skeptic::estimators
