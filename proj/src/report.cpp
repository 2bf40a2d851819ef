#include "phi4/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "json.hpp"

namespace phi4 {

std::string to_string(Rule r) {
  switch (r) {
    case Rule::ratio:
      return "ratio";
    case Rule::absolute:
      return "absolute";
    case Rule::upper:
      return "upper";
    case Rule::interval:
      return "interval";
    case Rule::info:
      return "info";
  }
  return "info";
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

void evaluate(ReportRow& row) {
  row.ratio = row.predicted != 0.0 ? row.measured / row.predicted : std::nan("");
  const double m = row.measured;
  switch (row.rule) {
    case Rule::ratio:
      row.pass = std::isfinite(row.ratio) && std::abs(row.ratio - 1.0) <= row.tolerance;
      break;
    case Rule::absolute:
      row.pass = std::isfinite(m) && std::abs(m - row.predicted) <= row.tolerance;
      break;
    case Rule::upper:
      row.pass = std::isfinite(m) && m <= row.upper;
      break;
    case Rule::interval:
      row.pass = std::isfinite(m) && m >= row.lower && m <= row.upper;
      break;
    case Rule::info:
      row.pass = true;
      break;
  }
}

namespace {

ReportRow base(const std::string& exp, double beta, const std::string& quantity, double measured,
               double predicted, Rule rule) {
  ReportRow r;
  r.experiment = exp;
  r.beta = beta;
  r.quantity = quantity;
  r.measured = measured;
  r.predicted = predicted;
  r.rule = rule;
  return r;
}

}  // namespace

ReportRow ratio_row(const std::string& exp, double beta, const std::string& quantity,
                    double measured, double predicted, double tol) {
  auto r = base(exp, beta, quantity, measured, predicted, Rule::ratio);
  r.tolerance = tol;
  r.lower = predicted * (1.0 - tol);
  r.upper = predicted * (1.0 + tol);
  evaluate(r);
  return r;
}

ReportRow absolute_row(const std::string& exp, double beta, const std::string& quantity,
                       double measured, double predicted, double tol) {
  auto r = base(exp, beta, quantity, measured, predicted, Rule::absolute);
  r.tolerance = tol;
  r.lower = predicted - tol;
  r.upper = predicted + tol;
  evaluate(r);
  return r;
}

ReportRow upper_row(const std::string& exp, double beta, const std::string& quantity,
                    double measured, double bound) {
  auto r = base(exp, beta, quantity, measured, bound, Rule::upper);
  r.upper = bound;
  r.lower = -INFINITY;
  evaluate(r);
  return r;
}

ReportRow interval_row(const std::string& exp, double beta, const std::string& quantity,
                       double measured, double lower, double upper, double predicted) {
  auto r = base(exp, beta, quantity, measured, predicted, Rule::interval);
  r.lower = lower;
  r.upper = upper;
  evaluate(r);
  return r;
}

ReportRow info_row(const std::string& exp, double beta, const std::string& quantity,
                   double measured, double predicted) {
  auto r = base(exp, beta, quantity, measured, predicted, Rule::info);
  evaluate(r);
  return r;
}

std::string csv_header(const std::string& experiment) {
  return "# phi4 " + experiment +
         " schema v1\nexperiment,beta,quantity,measured,predicted,ratio,rule,tolerance,lower,upper,"
         "pass,params\n";
}

void write_csv(std::ostream& out, const std::string& experiment, const std::vector<ReportRow>& rows) {
  out << csv_header(experiment);
  for (const auto& r : rows) {
    out << r.experiment << ',' << format_number(r.beta) << ',' << r.quantity << ','
        << format_number(r.measured) << ',' << format_number(r.predicted) << ','
        << format_number(r.ratio) << ',' << to_string(r.rule) << ',' << format_number(r.tolerance)
        << ',' << format_number(r.lower) << ',' << format_number(r.upper) << ','
        << (r.pass ? "true" : "false") << ',' << '"' << r.params << '"' << '\n';
  }
}

namespace {

nlohmann::json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

}  // namespace

std::string summary_json(const std::string& experiment, const std::vector<ReportRow>& rows,
                         double wall_seconds, unsigned long long seed) {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["seed"] = seed;
  j["wall_time_s"] = wall_seconds;
  std::size_t pass = 0, fail = 0, info = 0;
  auto arr = nlohmann::json::array();
  for (const auto& r : rows) {
    if (r.rule == Rule::info) {
      ++info;
    } else if (r.pass) {
      ++pass;
    } else {
      ++fail;
    }
    arr.push_back({{"beta", number(r.beta)},
                   {"quantity", r.quantity},
                   {"measured", number(r.measured)},
                   {"predicted", number(r.predicted)},
                   {"ratio", number(r.ratio)},
                   {"rule", to_string(r.rule)},
                   {"tolerance", number(r.tolerance)},
                   {"lower", number(r.lower)},
                   {"upper", number(r.upper)},
                   {"pass", r.pass},
                   {"params", r.params}});
  }
  j["rows"] = arr;
  j["pass_count"] = pass;
  j["fail_count"] = fail;
  j["info_count"] = info;
  return j.dump(2);
}

}  // namespace phi4
