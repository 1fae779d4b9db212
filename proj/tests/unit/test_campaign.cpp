#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "dflow/campaign.hpp"

using namespace dflow;

namespace {

Json check(std::string id, std::string op, Json inputs) {
  return Json{{"id", std::move(id)}, {"operation", std::move(op)}, {"inputs", std::move(inputs)}};
}

Json dirac(double theta) { return Json{{"type", "dirac"}, {"theta", theta}}; }

std::vector<std::string> problems_of(const Json& doc) {
  try {
    parse_campaign(doc);
  } catch (const SchemaError& e) {
    return e.problems();
  }
  return {};
}

bool has(const std::vector<std::string>& v, const std::string& prefix) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.rfind(prefix, 0) == 0; });
}

}  // namespace

TEST_CASE("config parsers") {
  CHECK(parse_complex(Json(2.5), "/x") == cplx(2.5));
  CHECK(parse_complex(Json::array({1, -2}), "/x") == cplx(1, -2));
  CHECK_THROWS_AS(parse_complex(Json("a"), "/x"), SchemaError);

  const CircleMeasure mu = parse_circle_measure(Json::parse(R"({"type":"sum","terms":[
      {"type":"dirac","theta":3.141592653589793,"mass":0.5},{"type":"lebesgue","c":0.5}]})"), "/m");
  CHECK(total_mass(mu) == doctest::Approx(1.0));

  const HalfPlaneWeightSpec w = parse_weight(Json::parse(R"({"rho":0,"nu":{"atoms":[{"tau":0,"mass":3.14}]}})"), "/w");
  CHECK(w.rho == 0.0);
  CHECK(w.nu.atoms().size() == 1);

  const DiscFunction f = parse_disc_function(Json::parse(R"({"type":"product","terms":[
      {"type":"monomial","n":2},{"type":"polynomial","coeffs":[1,[0,1]]}]})"), "/f");
  CHECK(std::abs(f(0.5) - 0.25 * cplx(1, 0.5)) < 1e-15);

  const TimeFunction g = parse_time_function(Json::parse(R"({"type":"samples","grid":[0,1,2],"values":[0,1,0.5],
      "tail":{"type":"exp","a":1},"shift":0.5})"), "/g");
  CHECK(std::abs(g(1.5) - 1.0) < 1e-15);

  try {
    parse_circle_measure(Json::parse(R"({"atoms":[{"theta":1,"mass":"x"}]})"), "/c/measure");
    FAIL("expected a schema error");
  } catch (const SchemaError& e) {
    CHECK(e.problems().front() == "/c/measure/atoms/0/mass: expected a number");
  }
}

TEST_CASE("catalog") {
  CHECK(find_operation("two_isometry_defect") != nullptr);
  CHECK(find_operation("nope") == nullptr);
  const auto& ops = operation_catalog();
  CHECK(std::is_sorted(ops.begin(), ops.end(), [](const auto& a, const auto& b) { return a.name < b.name; }));
  for (const auto& op : ops) {
    CHECK_FALSE(op.summary.empty());
    CHECK(static_cast<bool>(op.prepare));
  }
}

TEST_CASE("schema errors carry paths") {
  Json doc{{"name", "bad"},
           {"checks", Json::array({check("a", "monomial_law", {{"measure", dirac(1.0)}}),
                                   check("a", "unknown_op", Json::object()),
                                   check("c", "monomial_law", {{"measure", dirac(1.0)}, {"n", 2}, {"extra", 1}}),
                                   Json{{"id", "d"}, {"operation", "monomial_law"}, {"tolerance", -1},
                                        {"inputs", {{"measure", dirac(1.0)}, {"n", 2}}}}})}};
  const auto p = problems_of(doc);
  CHECK(has(p, "/checks/0/inputs/n: missing"));
  CHECK(has(p, "/checks/1/id: duplicate"));
  CHECK(has(p, "/checks/1/operation: unknown operation"));
  CHECK(has(p, "/checks/2/inputs/extra:"));
  CHECK(has(p, "/checks/3/tolerance:"));
  CHECK(has(problems_of(Json::object()), "/name"));
  CHECK(has(problems_of(Json{{"name", "x"}, {"checks", 3}}), "/checks"));
  CHECK(has(problems_of(Json{{"name", "x"}, {"checks", Json::array()}, {"budgets", {{"quad_radial", 2}}}}),
            "/budgets/quad_radial"));
  CHECK_THROWS_AS(load_campaign("/nonexistent/campaign.json"), SchemaError);
}

TEST_CASE("empty campaign") {
  const CampaignReport r = run_campaign(parse_campaign(Json{{"name", "empty"}, {"checks", Json::array()}}));
  CHECK(r.rows.empty());
  CHECK(r.exit_code() == 0);
  CHECK(to_csv(r) == "check_id,operation,inputs_digest,value,reference,provenance,residual,tolerance,verdict,seconds\n");
}

TEST_CASE("verdicts and exit codes") {
  const Json bergman = Json::parse(R"({"type":"exp_poly","terms":[{"k":1,"a":1}]})");
  Json pass = check("b", "bergman_norm_sq", {{"function", bergman}, {"alpha", 1}});
  pass["tolerance"] = 1e-5;
  pass["reference"] = 0.7853981633974483;
  Json fail = check("f", "monomial_law", {{"measure", dirac(2.0)}, {"n", 3}});
  fail["reference"] = 4.0;
  const Json diverge = check("d", "dtilde_norm_sq",
                             {{"function", {{"type", "exp_line"}, {"t", 1}}}, {"weight", {{"rho", 1}}}, {"method", "direct"}});
  Json expected = diverge;
  expected["id"] = "e";
  expected["expect"] = "divergent";

  auto run = [](Json checks) { return run_campaign(parse_campaign(Json{{"name", "t"}, {"checks", std::move(checks)}})); };

  const CampaignReport a = run(Json::array({pass, expected}));
  CHECK(a.exit_code() == 0);
  CHECK(a.rows[0].verdict == Verdict::pass);
  CHECK(a.rows[0].value == doctest::Approx(kPi / 4).epsilon(1e-5));
  CHECK(a.rows[0].provenance == "campaign");
  CHECK(a.rows[1].verdict == Verdict::pass);

  const CampaignReport b = run(Json::array({pass, fail}));
  CHECK(b.exit_code() == 1);
  CHECK(b.rows[1].verdict == Verdict::fail);
  CHECK(b.rows[1].residual == doctest::Approx(0.25));

  const CampaignReport c = run(Json::array({fail, diverge}));
  CHECK(c.exit_code() == 2);
  CHECK(c.rows[1].verdict == Verdict::divergent);
  CHECK(c.failed == 1);
  CHECK(c.divergent == 1);

  Json wrong = check("w", "bergman_norm_sq", {{"function", bergman}, {"alpha", 1}});
  wrong["expect"] = "divergent";
  CHECK(run(Json::array({wrong})).rows[0].verdict == Verdict::fail);
}

TEST_CASE("global overrides") {
  Json c = check("m", "monomial_law", {{"measure", dirac(2.0)}, {"n", 3}});
  c["reference"] = 3.0 + 1e-7;
  const Campaign camp = parse_campaign(Json{{"name", "t"}, {"checks", Json::array({c})}});
  CHECK(run_campaign(camp).rows[0].verdict == Verdict::fail);
  RunOptions opt;
  opt.tolerance = 1e-6;
  CHECK(run_campaign(camp, opt).rows[0].verdict == Verdict::pass);
  opt.quad_radial = 2;
  CHECK_THROWS_AS(run_campaign(camp, opt), PreconditionError);
}

TEST_CASE("reports are deterministic across job counts") {
  const std::filesystem::path path = std::filesystem::path(DFLOW_SOURCE_DIR) / "campaigns" / "standard.json";
  const Campaign camp = load_campaign(path);
  RunOptions one, many;
  many.jobs = 4;
  const std::string a = to_json(run_campaign(camp, one));
  const std::string b = to_json(run_campaign(camp, many));
  CHECK(a == b);
  CHECK(a.find("\"exit_code\": 0") != std::string::npos);

  RunOptions seeded = one;
  seeded.seed = 7;
  const CampaignReport s = run_campaign(camp, seeded);
  CHECK(s.exit_code() == 0);
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(kPi / 4) == "0.78539816339744828");
  CHECK(inputs_digest(Json::parse(R"({"b":1,"a":2})")) == inputs_digest(Json::parse(R"({"a":2,"b":1})")));
  CHECK(inputs_digest(Json::parse(R"({"a":1})")) != inputs_digest(Json::parse(R"({"a":2})")));
  CHECK(inputs_digest(Json::object()).size() == 16);
}

TEST_CASE("CSV quoting and JSON nulls") {
  CampaignReport r;
  r.name = "q";
  CheckRow row;
  row.id = "a,b";
  row.operation = "op";
  row.provenance = "say \"hi\"";
  row.value = INFINITY;
  r.rows.push_back(row);
  const std::string csv = to_csv(r);
  CHECK(csv.find("\"a,b\"") != std::string::npos);
  CHECK(csv.find("\"say \"\"hi\"\"\"") != std::string::npos);
  const Json j = Json::parse(to_json(r));
  CHECK(j["rows"][0]["value"].is_null());
  CHECK(j["rows"][0]["reference"].is_null());
  CHECK(j["summary"]["checks"] == 1);
}

TEST_CASE("reference tables") {
  const auto rows = reference_rows();
  int monomial = 0, inner = 0;
  for (const auto& r : rows) {
    if (r.table == "monomial_law_area") {
      ++monomial;
      CHECK(r.residual <= 1e-6);
    }
    if (r.table == "monomial_law_boundary") CHECK(r.residual <= 1e-10);
    if (r.table == "inner_exp_norm") {
      ++inner;
      CHECK(r.residual <= 1e-5);
    }
    CHECK(r.residual <= 1e-5);
  }
  CHECK(monomial == 32);
  CHECK(inner == 5);

  const auto dir = std::filesystem::temp_directory_path() / "dflow_refs_test";
  std::filesystem::remove_all(dir);
  const auto files = emit_reference_tables(dir);
  CHECK(files.size() == 8);
  std::ifstream is(dir / "bergman.csv");
  std::string header;
  std::getline(is, header);
  CHECK(header == "case,value,reference,residual,provenance");
  std::filesystem::remove_all(dir);
}
