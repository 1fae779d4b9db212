// dflow: run verification campaigns, list operations, regenerate reference tables.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dflow/campaign.hpp"
#include "dflow/quadrature.hpp"

namespace {

constexpr int kBadInput = 3;

struct Flags {
  std::string campaign;
  std::string output;
  std::string format;
  std::optional<unsigned> jobs;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  std::optional<int> quad_radial, quad_angular;
  bool timings = false;
};

void add_run_flags(CLI::App& app, Flags& f, bool require_campaign) {
  auto* c = app.add_option("--campaign", f.campaign, "campaign JSON file");
  if (require_campaign) c->required();
  app.add_option("--output", f.output, "report path (default: campaign output.path, else stdout)");
  app.add_option("--format", f.format, "report format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--jobs", f.jobs, "concurrent checks (fallback: DFLOW_JOBS, else 1)")->check(CLI::PositiveNumber);
  app.add_option("--seed", f.seed, "64-bit seed for randomized checks");
  app.add_option("--tolerance", f.tolerance, "override every check tolerance")->check(CLI::PositiveNumber);
  app.add_option("--quad-radial", f.quad_radial, "radial quadrature nodes")->check(CLI::Range(4, 4096));
  app.add_option("--quad-angular", f.quad_angular, "angular quadrature nodes")->check(CLI::Range(4, 8192));
  app.add_flag("--timings", f.timings, "fill the seconds column");
}

unsigned jobs_from_env() {
  const char* s = std::getenv("DFLOW_JOBS");
  if (!s || !*s) return 1;
  char* end = nullptr;
  const unsigned long v = std::strtoul(s, &end, 10);
  if (*end != '\0' || v == 0) {
    std::cerr << "dflow: ignoring DFLOW_JOBS=" << s << " (expected a positive integer)\n";
    return 1;
  }
  return static_cast<unsigned>(v);
}

int run(const Flags& f) {
  dflow::Campaign c;
  try {
    c = dflow::load_campaign(f.campaign);
  } catch (const dflow::SchemaError& e) {
    std::cerr << "dflow: invalid campaign " << f.campaign << "\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << "\n";
    return kBadInput;
  }

  dflow::RunOptions opt;
  opt.jobs = f.jobs ? *f.jobs : jobs_from_env();
  opt.seed = f.seed;
  opt.tolerance = f.tolerance;
  opt.quad_radial = f.quad_radial;
  opt.quad_angular = f.quad_angular;
  opt.timings = f.timings;
  // Block sums are deterministic at any thread count; this only avoids
  // oversubscription when checks already run side by side.
  if (opt.jobs > 1) dflow::set_quadrature_threads(1);

  const dflow::CampaignReport rep = dflow::run_campaign(c, opt);
  const std::string format = !f.format.empty() ? f.format : c.format;
  const std::string text = format == "json" ? dflow::to_json(rep) : dflow::to_csv(rep);
  const std::string out = !f.output.empty() ? f.output : c.output_path.value_or("");
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    std::ofstream os(out, std::ios::binary);
    if (!os || !(os << text)) {
      std::cerr << "dflow: cannot write " << out << "\n";
      return kBadInput;
    }
  }
  std::cerr << rep.name << ": " << rep.rows.size() << " checks, " << rep.passed << " pass, " << rep.failed
            << " fail, " << rep.divergent << " divergent\n";
  for (const auto& row : rep.rows)
    if (row.verdict != dflow::Verdict::pass)
      std::cerr << "  " << dflow::to_string(row.verdict) << " " << row.id << (row.note.empty() ? "" : ": " + row.note)
                << "\n";
  return rep.exit_code();
}

int list_checks() {
  for (const auto& op : dflow::operation_catalog()) {
    std::cout << op.name << "\n  " << op.summary << "\n  inputs:";
    for (const auto& k : op.inputs) std::cout << " " << k;
    if (!op.optional_inputs.empty()) {
      std::cout << "  optional:";
      for (const auto& k : op.optional_inputs) std::cout << " " << k;
    }
    std::cout << "\n";
  }
  return 0;
}

int emit_references(const std::string& dir) {
  int worst = 0;
  for (const auto& r : dflow::reference_rows())
    if (r.residual > 1e-5) {
      std::cerr << "  " << r.table << " " << r.case_name << ": residual " << dflow::format_double(r.residual) << "\n";
      worst = 1;
    }
  for (const auto& p : dflow::emit_reference_tables(dir)) std::cout << p.string() << "\n";
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet-space verification campaigns"};
  app.require_subcommand(0, 1);
  Flags top, sub;
  add_run_flags(app, top, false);

  auto* run_cmd = app.add_subcommand("run", "run a campaign and write its report");
  add_run_flags(*run_cmd, sub, true);
  auto* list_cmd = app.add_subcommand("list-checks", "print the operation catalog");
  std::string ref_dir = "references";
  auto* ref_cmd = app.add_subcommand("emit-references", "regenerate the reference tables as CSV files");
  ref_cmd->add_option("--output", ref_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kBadInput;
  }

  try {
    if (*run_cmd) return run(sub);
    if (*list_cmd) return list_checks();
    if (*ref_cmd) return emit_references(ref_dir);
    if (!top.campaign.empty()) return run(top);
  } catch (const std::exception& e) {
    std::cerr << "dflow: " << e.what() << "\n";
    return kBadInput;
  }
  std::cerr << app.help();
  return kBadInput;
}
