#pragma once

#include <string>
#include <utility>
#include <vector>

#include "skeptic/survey.hpp"

namespace skeptic::dataio {

// Parses the schema CSV (header row, comma separated, empty or "NA" cells
// missing). Coding-rule and consistency violations are collected per row and
// the row is flagged invalid rather than aborting the load; strict mode turns
// the first such violation into an InvariantViolationError. Unparseable cells
// are always hard MalformedRowErrors with their line number.
std::pair<Dataset, MissingnessReport> load_survey(const std::string& path,
                                                  bool strict = false);

// Writes the schema CSV with shortest round-trip numeric formatting, so
// load -> write -> load is byte-stable. Missing values are written as NA.
void write_survey(const Dataset& data, const std::string& path);
std::string survey_to_csv(const Dataset& data);

// Sample statistics per schema variable over valid rows (optionally filtered).
std::vector<DescriptiveRow> describe(const Dataset& data,
                                     const RecordFilter& filter = {});

// Scale bridge between the [0,1] probability scale of the belief algebra and
// the percent scale the survey stores.
double to_percent(double p01);
double from_percent(double pct);

}  // namespace skeptic::dataio
