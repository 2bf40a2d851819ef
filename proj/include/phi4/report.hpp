#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace phi4 {

// How a row decides pass/fail:
//   ratio:    |measured / predicted - 1| <= tolerance
//   absolute: |measured - predicted| <= tolerance
//   upper:    measured <= upper
//   interval: lower <= measured <= upper
//   info:     reported only, always passes
enum class Rule { ratio, absolute, upper, interval, info };

std::string to_string(Rule r);

struct ReportRow {
  std::string experiment;
  double beta = 0.0;
  std::string quantity;
  double measured = 0.0;
  double predicted = 0.0;
  double ratio = 0.0;
  Rule rule = Rule::info;
  double tolerance = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool pass = true;
  std::string params;  // "key=value;..." echo of the inputs that matter
};

ReportRow ratio_row(const std::string& exp, double beta, const std::string& quantity,
                    double measured, double predicted, double tol);
ReportRow absolute_row(const std::string& exp, double beta, const std::string& quantity,
                       double measured, double predicted, double tol);
ReportRow upper_row(const std::string& exp, double beta, const std::string& quantity,
                    double measured, double bound);
ReportRow interval_row(const std::string& exp, double beta, const std::string& quantity,
                       double measured, double lower, double upper, double predicted = 0.0);
ReportRow info_row(const std::string& exp, double beta, const std::string& quantity,
                   double measured, double predicted = 0.0);

// Recomputes `pass` (and `ratio`) from the rule.
void evaluate(ReportRow& row);

std::string csv_header(const std::string& experiment);
void write_csv(std::ostream& out, const std::string& experiment, const std::vector<ReportRow>& rows);

// summary.json payload.
std::string summary_json(const std::string& experiment, const std::vector<ReportRow>& rows,
                         double wall_seconds, unsigned long long seed);

std::string format_number(double x);

}  // namespace phi4
