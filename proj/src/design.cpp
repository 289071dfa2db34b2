#include "skeptic/design.hpp"

#include "skeptic/dataio.hpp"

namespace skeptic::estimators {

AnalysisFrame make_frame(const dataio::Dataset& data,
                         const std::vector<std::string>& covariates) {
  for (const auto& name : covariates) {
    if (name == "const" || name == "prior" || name == "post" || name == "change") {
      throw InvalidArgumentError("'" + name + "' cannot appear in a covariate list");
    }
  }
  const auto keep = dataio::complete_rows(data, covariates);
  const long n = static_cast<long>(keep.size());

  AnalysisFrame frame;
  frame.row_index = keep;
  frame.prior.resize(n);
  frame.post.resize(n);
  frame.change.resize(n);
  frame.x.values.resize(n, 1 + static_cast<long>(covariates.size()));
  frame.x.names.clear();
  frame.x.names.push_back("const");
  for (const auto& name : covariates) frame.x.names.push_back(name);

  for (long i = 0; i < n; ++i) {
    const auto& r = data.rows[keep[i]];
    frame.prior[i] = r.prior;
    frame.post[i] = r.post;
    frame.change[i] = static_cast<double>(r.change);
    frame.x.values(i, 0) = 1.0;
    for (size_t j = 0; j < covariates.size(); ++j) {
      frame.x.values(i, 1 + j) = *dataio::field_value(r, covariates[j]);
    }
  }
  return frame;
}

DesignMatrix design_with_prior(const AnalysisFrame& frame) {
  DesignMatrix out;
  const long n = frame.x.values.rows();
  const long k = frame.x.values.cols();
  out.values.resize(n, k + 1);
  out.values.col(0) = frame.x.values.col(0);
  out.values.col(1) = frame.prior;
  out.values.rightCols(k - 1) = frame.x.values.rightCols(k - 1);
  out.names.push_back("const");
  out.names.push_back("prior");
  for (size_t j = 1; j < frame.x.names.size(); ++j) out.names.push_back(frame.x.names[j]);
  return out;
}

}  // namespace skeptic::estimators
