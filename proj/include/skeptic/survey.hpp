#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "skeptic/errors.hpp"

namespace skeptic::dataio {

// One interview row under the survey coding: percent scales for the
// probabilities, 0/1 dummies, integer age/police that may be missing.
// Non-updaters carry post == prior exactly.
struct SurveyRecord {
  double prior = 0.0;
  int change = 0;
  double post = 0.0;
  int gender = 0;
  std::optional<int> age;
  std::optional<int> police;
  int educ_int = 0;
  int matching_gender = 0;
  bool valid = true;  // false when the row breaks a coding/consistency rule
};

struct Dataset {
  std::vector<SurveyRecord> rows;

  long size() const { return static_cast<long>(rows.size()); }
  long n_valid() const {
    long n = 0;
    for (const auto& r : rows) n += r.valid ? 1 : 0;
    return n;
  }
};

// Schema column order of the CSV interface.
const std::vector<std::string>& schema_columns();

// Value of a named variable for one record; nullopt when missing.
// Throws InvalidArgumentError for names outside the schema.
std::optional<double> field_value(const SurveyRecord& record,
                                  const std::string& name);

struct RowIssue {
  long line = 0;  // 1-based line number in the source file
  std::string message;
};

struct MissingnessReport {
  long n_rows = 0;
  std::map<std::string, long> missing;  // per-variable missing counts
  std::vector<RowIssue> invariant_violations;
  long low_prior_warnings = 0;  // priors below 1 percent (accepted, flagged)
};

struct DescriptiveRow {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
  long missing = 0;
  long n = 0;  // non-missing count behind the statistics
};

using RecordFilter = std::function<bool(const SurveyRecord&)>;

// Indices of valid rows with every covariate in `covariates` present.
// prior/post/change are always present on valid rows; age/police may drop out.
std::vector<int> complete_rows(const Dataset& data,
                               const std::vector<std::string>& covariates);

}  // namespace skeptic::dataio
