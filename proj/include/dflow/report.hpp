#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dflow {

enum class Verdict { pass, fail, divergent };

const char* to_string(Verdict v);

/// One line of a verification report. Items with `gated == false` are
/// informational (recorded values such as fitted slopes) and never fail.
struct ReportItem {
  std::string name;
  double value = 0.0;
  std::optional<double> reference;
  double residual = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::pass;
  bool gated = true;
  std::string note;
};

struct Report {
  std::string title;
  std::vector<ReportItem> items;

  /// Gated comparison |value - reference| <= tol (relative to |reference| when
  /// `relative` and |reference| > 0).
  ReportItem& compare(std::string name, double value, double reference, double tol, bool relative = false);
  /// Gated bound value <= tol (a residual that should vanish).
  ReportItem& bound(std::string name, double value, double tol);
  /// Gated boolean condition.
  ReportItem& require(std::string name, bool ok, std::string note = {});
  /// Informational value.
  ReportItem& record(std::string name, double value, std::string note = {});
  /// Gated divergence verdict (the check expected a finite value).
  ReportItem& divergent(std::string name, double value, std::string note = {});

  bool passed() const;
  const ReportItem* find(std::string_view name) const;
};

}  // namespace dflow
