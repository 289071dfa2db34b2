#include "skeptic/dataio.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace skeptic::dataio {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool is_missing_cell(const std::string& cell) {
  return cell.empty() || cell == "NA";
}

double parse_double(const std::string& cell, long line, const std::string& col) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw MalformedRowError("line " + std::to_string(line) + ": column '" + col +
                            "' is not a number: '" + cell + "'");
  }
  return value;
}

int parse_int(const std::string& cell, long line, const std::string& col) {
  const double v = parse_double(cell, line, col);
  const double r = std::nearbyint(v);
  if (std::fabs(v - r) > 0.0) {
    throw MalformedRowError("line " + std::to_string(line) + ": column '" + col +
                            "' must be an integer: '" + cell + "'");
  }
  return static_cast<int>(r);
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), ptr);
}

void flag(SurveyRecord& rec, MissingnessReport& report, long line,
          const std::string& message, bool strict) {
  if (strict) {
    throw InvariantViolationError("line " + std::to_string(line) + ": " + message);
  }
  rec.valid = false;
  report.invariant_violations.push_back({line, message});
}

}  // namespace

const std::vector<std::string>& schema_columns() {
  static const std::vector<std::string> cols = {
      "prior", "change", "post",     "gender",
      "age",   "police", "educ_int", "matching_gender"};
  return cols;
}

std::optional<double> field_value(const SurveyRecord& r, const std::string& name) {
  if (name == "prior") return r.prior;
  if (name == "change") return static_cast<double>(r.change);
  if (name == "post") return r.post;
  if (name == "gender") return static_cast<double>(r.gender);
  if (name == "age") {
    if (!r.age) return std::nullopt;
    return static_cast<double>(*r.age);
  }
  if (name == "police") {
    if (!r.police) return std::nullopt;
    return static_cast<double>(*r.police);
  }
  if (name == "educ_int") return static_cast<double>(r.educ_int);
  if (name == "matching_gender") return static_cast<double>(r.matching_gender);
  throw InvalidArgumentError("unknown variable '" + name + "'");
}

std::vector<int> complete_rows(const Dataset& data,
                               const std::vector<std::string>& covariates) {
  std::vector<int> keep;
  keep.reserve(data.rows.size());
  for (int i = 0; i < static_cast<int>(data.rows.size()); ++i) {
    const auto& r = data.rows[i];
    if (!r.valid) continue;
    bool complete = true;
    for (const auto& name : covariates) {
      if (!field_value(r, name)) {
        complete = false;
        break;
      }
    }
    if (complete) keep.push_back(i);
  }
  return keep;
}

std::pair<Dataset, MissingnessReport> load_survey(const std::string& path,
                                                  bool strict) {
  std::ifstream in(path);
  if (!in) throw InvalidArgumentError("cannot open '" + path + "'");

  Dataset data;
  MissingnessReport report;
  for (const auto& col : schema_columns()) report.missing[col] = 0;

  std::string line;
  if (!std::getline(in, line)) throw SchemaMismatchError("empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  auto header = split_csv_line(line);
  const auto& schema = schema_columns();
  if (header.size() != schema.size()) {
    throw SchemaMismatchError("expected " + std::to_string(schema.size()) +
                              " columns, found " + std::to_string(header.size()));
  }
  for (size_t j = 0; j < schema.size(); ++j) {
    if (lower(header[j]) != schema[j]) {
      throw SchemaMismatchError("column " + std::to_string(j + 1) + " is '" +
                                header[j] + "', expected '" + schema[j] + "'");
    }
  }

  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != schema.size()) {
      throw MalformedRowError("line " + std::to_string(lineno) + ": expected " +
                              std::to_string(schema.size()) + " cells, found " +
                              std::to_string(cells.size()));
    }

    SurveyRecord rec;
    // prior, change, post, gender, educ_int, matching_gender are required
    for (size_t j : {size_t{0}, size_t{1}, size_t{2}, size_t{3}, size_t{6}, size_t{7}}) {
      if (is_missing_cell(cells[j])) {
        throw MalformedRowError("line " + std::to_string(lineno) + ": column '" +
                                schema[j] + "' may not be missing");
      }
    }
    rec.prior = parse_double(cells[0], lineno, "prior");
    rec.change = parse_int(cells[1], lineno, "change");
    rec.post = parse_double(cells[2], lineno, "post");
    rec.gender = parse_int(cells[3], lineno, "gender");
    if (is_missing_cell(cells[4])) {
      rec.age.reset();
    } else {
      rec.age = parse_int(cells[4], lineno, "age");
    }
    if (is_missing_cell(cells[5])) {
      rec.police.reset();
    } else {
      rec.police = parse_int(cells[5], lineno, "police");
    }
    rec.educ_int = parse_int(cells[6], lineno, "educ_int");
    rec.matching_gender = parse_int(cells[7], lineno, "matching_gender");

    // coding ranges (Table-1 dictionary)
    if (rec.prior < 0.0 || rec.prior > 100.0) {
      flag(rec, report, lineno, "prior outside [0,100]", strict);
    } else if (rec.prior < 1.0) {
      ++report.low_prior_warnings;
    }
    if (rec.post < 0.0 || rec.post > 100.0) {
      flag(rec, report, lineno, "post outside [0,100]", strict);
    }
    if (rec.change != 0 && rec.change != 1) {
      flag(rec, report, lineno, "change must be 0 or 1", strict);
    }
    if (rec.gender != 0 && rec.gender != 1) {
      flag(rec, report, lineno, "gender must be 0 or 1", strict);
    }
    if (rec.educ_int != 0 && rec.educ_int != 1) {
      flag(rec, report, lineno, "educ_int must be 0 or 1", strict);
    }
    if (rec.matching_gender != 0 && rec.matching_gender != 1) {
      flag(rec, report, lineno, "matching_gender must be 0 or 1", strict);
    }
    if (rec.age && (*rec.age < 16 || *rec.age > 94)) {
      flag(rec, report, lineno, "age outside [16,94]", strict);
    }
    if (rec.police && (*rec.police < 1 || *rec.police > 5)) {
      flag(rec, report, lineno, "police outside {1..5}", strict);
    }

    // change/post consistency
    if (rec.valid) {
      if (rec.change == 0 && rec.post != rec.prior) {
        flag(rec, report, lineno, "change=0 but post != prior", strict);
      } else if (rec.change == 1 && !(rec.post < rec.prior)) {
        flag(rec, report, lineno, "change=1 but post >= prior", strict);
      }
    }

    if (rec.valid) {
      if (!rec.age) ++report.missing["age"];
      if (!rec.police) ++report.missing["police"];
    }
    data.rows.push_back(std::move(rec));
    ++report.n_rows;
  }
  return {std::move(data), std::move(report)};
}

std::string survey_to_csv(const Dataset& data) {
  std::string out;
  const auto& schema = schema_columns();
  for (size_t j = 0; j < schema.size(); ++j) {
    if (j) out += ',';
    out += schema[j];
  }
  out += '\n';
  for (const auto& r : data.rows) {
    out += format_double(r.prior);
    out += ',';
    out += std::to_string(r.change);
    out += ',';
    out += format_double(r.post);
    out += ',';
    out += std::to_string(r.gender);
    out += ',';
    out += r.age ? std::to_string(*r.age) : std::string("NA");
    out += ',';
    out += r.police ? std::to_string(*r.police) : std::string("NA");
    out += ',';
    out += std::to_string(r.educ_int);
    out += ',';
    out += std::to_string(r.matching_gender);
    out += '\n';
  }
  return out;
}

void write_survey(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgumentError("cannot write '" + path + "'");
  out << survey_to_csv(data);
}

std::vector<DescriptiveRow> describe(const Dataset& data,
                                     const RecordFilter& filter) {
  std::vector<const SurveyRecord*> kept;
  for (const auto& r : data.rows) {
    if (!r.valid) continue;
    if (filter && !filter(r)) continue;
    kept.push_back(&r);
  }
  if (kept.empty()) throw EmptyAfterFilterError("no valid rows after filter");

  std::vector<DescriptiveRow> table;
  for (const auto& name : schema_columns()) {
    DescriptiveRow row;
    row.name = name;
    double sum = 0.0;
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
    std::vector<double> values;
    values.reserve(kept.size());
    for (const auto* r : kept) {
      const auto v = field_value(*r, name);
      if (!v) {
        ++row.missing;
        continue;
      }
      values.push_back(*v);
      sum += *v;
      min = std::min(min, *v);
      max = std::max(max, *v);
    }
    row.n = static_cast<long>(values.size());
    if (row.n > 0) {
      row.mean = sum / static_cast<double>(row.n);
      double ss = 0.0;
      for (double v : values) ss += (v - row.mean) * (v - row.mean);
      row.sd = row.n > 1 ? std::sqrt(ss / static_cast<double>(row.n - 1)) : 0.0;
      row.min = min;
      row.max = max;
    }
    table.push_back(std::move(row));
  }
  return table;
}

double to_percent(double p01) {
  if (!(p01 >= 0.0 && p01 <= 1.0)) {
    throw OutOfRangeError("to_percent: input must lie in [0,1]");
  }
  return p01 * 100.0;
}

double from_percent(double pct) {
  if (!(pct >= 0.0 && pct <= 100.0)) {
    throw OutOfRangeError("from_percent: input must lie in [0,100]");
  }
  return pct / 100.0;
}

}  // namespace skeptic::dataio
