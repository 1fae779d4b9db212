#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dflow/config.hpp"
#include "dflow/discspace.hpp"
#include "dflow/halfplane.hpp"
#include "dflow/report.hpp"

namespace dflow {

/// Budgets and seed shared by the checks of one run.
struct RunContext {
  DiscQuadrature disc;
  HalfPlaneQuadrature halfplane;
  std::uint64_t seed = 0;
};

/// What an operation hands back to the runner. `reference` is the operation's
/// own oracle (a second route or a closed form); a reference given in the
/// campaign takes precedence.
struct CheckOutcome {
  double value = 0.0;
  Convergence status = Convergence::converged;
  std::optional<double> reference;
  std::string provenance;
  Report detail;
};

using CheckRunner = std::function<CheckOutcome(const RunContext&)>;

struct OperationInfo {
  std::string name;
  std::string summary;
  std::vector<std::string> inputs;  ///< required input keys
  std::vector<std::string> optional_inputs;
  /// Parses the inputs (SchemaError with paths below `path`) into a runner.
  std::function<CheckRunner(const Json& inputs, const std::string& path)> prepare;
};

const std::vector<OperationInfo>& operation_catalog();
const OperationInfo* find_operation(std::string_view name);

enum class Expectation { finite, divergent };

struct CheckSpec {
  std::string id;
  std::string operation;
  Json inputs;
  double tolerance = 1e-8;
  std::optional<double> reference;
  std::string provenance;
  Expectation expect = Expectation::finite;
  bool relative = true;  ///< residual relative to |reference| when it is nonzero
  CheckRunner runner;
};

struct Campaign {
  std::string name;
  std::vector<CheckSpec> checks;
  std::optional<int> quad_radial, quad_angular, halfplane_gauss;
  std::optional<std::string> output_path;
  std::string format = "csv";
  std::uint64_t seed = 0;
};

/// Validates the whole document and reports every problem at once.
Campaign parse_campaign(const Json& doc);
/// Reads and parses a campaign file; SchemaError on unreadable or invalid input.
Campaign load_campaign(const std::filesystem::path& path);

struct RunOptions {
  unsigned jobs = 1;
  std::optional<double> tolerance;  ///< global override
  std::optional<int> quad_radial, quad_angular;
  std::optional<std::uint64_t> seed;
  bool timings = false;
};

struct CheckRow {
  std::string id;
  std::string operation;
  std::string inputs_digest;
  double value = 0.0;
  std::optional<double> reference;
  std::string provenance;
  double residual = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::pass;
  double seconds = 0.0;
  Convergence status = Convergence::converged;
  std::string note;
  Report detail;
};

struct CampaignReport {
  std::string name;
  std::vector<CheckRow> rows;
  int passed = 0, failed = 0, divergent = 0;
  bool timings = false;

  /// 0 all pass, 1 any fail, 2 any divergence where a finite value was expected
  /// (2 wins over 1).
  int exit_code() const;
};

/// Runs every check on up to `jobs` threads; rows keep the campaign order.
CampaignReport run_campaign(const Campaign& c, const RunOptions& opt = {});

/// Stable 64-bit FNV-1a digest of the canonical (sorted-key) JSON dump, as hex.
std::string inputs_digest(const Json& inputs);

/// Columns check_id, operation, inputs_digest, value, reference, provenance,
/// residual, tolerance, verdict, seconds. Numbers use 17 significant digits;
/// seconds are blank unless the report was produced with timings.
std::string to_csv(const CampaignReport& r);
/// Summary plus rows (with detail items), same number formatting.
std::string to_json(const CampaignReport& r);

/// One row of a regenerated oracle table.
struct ReferenceRow {
  std::string table;
  std::string case_name;
  double value = 0.0;
  double reference = 0.0;
  double residual = 0.0;
  std::string provenance;
};

/// Recomputes every closed-form oracle value from scratch.
std::vector<ReferenceRow> reference_rows(const RunContext& ctx = {});
/// Writes one CSV per table into `dir` (created if needed); returns the paths.
std::vector<std::filesystem::path> emit_reference_tables(const std::filesystem::path& dir, const RunContext& ctx = {});

/// printf("%.17g") without locale effects.
std::string format_double(double v);

}  // namespace dflow
