#include "dflow/report.hpp"

#include <algorithm>
#include <cmath>

namespace dflow {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::divergent: return "divergent";
  }
  return "unknown";
}

ReportItem& Report::compare(std::string name, double value, double reference, double tol, bool relative) {
  ReportItem it;
  it.name = std::move(name);
  it.value = value;
  it.reference = reference;
  it.residual = std::abs(value - reference);
  if (relative && reference != 0.0) it.residual /= std::abs(reference);
  it.tolerance = tol;
  it.verdict = std::isfinite(value) && it.residual <= tol ? Verdict::pass : Verdict::fail;
  items.push_back(std::move(it));
  return items.back();
}

ReportItem& Report::bound(std::string name, double value, double tol) {
  ReportItem it;
  it.name = std::move(name);
  it.value = value;
  it.residual = std::abs(value);
  it.tolerance = tol;
  it.verdict = std::isfinite(value) && it.residual <= tol ? Verdict::pass : Verdict::fail;
  items.push_back(std::move(it));
  return items.back();
}

ReportItem& Report::require(std::string name, bool ok, std::string note) {
  ReportItem it;
  it.name = std::move(name);
  it.value = ok ? 1.0 : 0.0;
  it.reference = 1.0;
  it.residual = ok ? 0.0 : 1.0;
  it.verdict = ok ? Verdict::pass : Verdict::fail;
  it.note = std::move(note);
  items.push_back(std::move(it));
  return items.back();
}

ReportItem& Report::record(std::string name, double value, std::string note) {
  ReportItem it;
  it.name = std::move(name);
  it.value = value;
  it.gated = false;
  it.note = std::move(note);
  items.push_back(std::move(it));
  return items.back();
}

ReportItem& Report::divergent(std::string name, double value, std::string note) {
  ReportItem it;
  it.name = std::move(name);
  it.value = value;
  it.verdict = Verdict::divergent;
  it.note = std::move(note);
  items.push_back(std::move(it));
  return items.back();
}

bool Report::passed() const {
  return std::all_of(items.begin(), items.end(),
                     [](const ReportItem& it) { return !it.gated || it.verdict == Verdict::pass; });
}

const ReportItem* Report::find(std::string_view name) const {
  for (const auto& it : items)
    if (it.name == name) return &it;
  return nullptr;
}

}  // namespace dflow
