#include <gtest/gtest.h>

#include "support.hpp"

using namespace cs_test;

namespace {

std::string classical_text() { return read_file(scenario_path("classical.yaml")); }

std::string replace(std::string s, const std::string& from, const std::string& to) {
  auto p = s.find(from);
  EXPECT_NE(p, std::string::npos) << from;
  return s.replace(p, from.size(), to);
}

// 1-based line of the first occurrence of needle.
int line_of(const std::string& text, const std::string& needle) {
  auto p = text.find(needle);
  return 1 + int(std::count(text.begin(), text.begin() + p, '\n'));
}

ParseError parse_error(const std::string& text) {
  try {
    parse_scenario(text, "test.yaml");
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no ParseError";
  return ParseError("");
}

}  // namespace

TEST(Parse, ShippedScenarios) {
  ScenarioFile c = load_scenario(scenario_path("classical.yaml"));
  EXPECT_EQ(c.scenario.T_m, 1000);
  EXPECT_EQ(c.scenario.coeff_model_1.rho.family, Family::power_law_in_eta);
  EXPECT_EQ(c.solver.r0_policy, R0Policy::manual);
  EXPECT_EQ(c.solver.fixed_point.tol, 1e-12);
  EXPECT_FALSE(c.bounds);
  ScenarioFile p = load_scenario(scenario_path("powerlaw.yaml"));
  ASSERT_TRUE(p.bounds);
  EXPECT_EQ(p.bounds->mu, 3);
  EXPECT_EQ(p.solver.r0_policy, R0Policy::certificate);
  ASSERT_TRUE(p.solver.bounds);
  EXPECT_EQ(p.scenario.coeff_model_2.lambda.parameters, (std::vector<double>{0.000025, 3}));
}

TEST(Parse, UnknownKeyReportsLine) {
  std::string text = replace(classical_text(), "T_m: 1000", "T_M: 1000");
  ParseError e = parse_error(text);
  EXPECT_EQ(e.field, "T_M");
  EXPECT_EQ(e.line, line_of(text, "T_M"));
  EXPECT_NE(std::string(e.what()).find("test.yaml"), std::string::npos);
}

TEST(Parse, BadNumberReportsFieldAndLine) {
  std::string text = replace(classical_text(), "l_m: 5000", "l_m: lots");
  ParseError e = parse_error(text);
  EXPECT_EQ(e.field, "l_m");
  EXPECT_EQ(e.line, line_of(text, "l_m"));
}

TEST(Parse, NestedErrors) {
  std::string text = replace(classical_text(), "family: constant, parameters: [1]}\n  gamma",
                             "family: cubic, parameters: [1]}\n  gamma");
  ParseError e = parse_error(text);
  EXPECT_NE(e.field.find("coeff_model_1.c"), std::string::npos) << e.field;
  EXPECT_GT(e.line, 0);
  text = replace(classical_text(), "r0_policy: manual", "r0_policy: sometimes");
  EXPECT_EQ(parse_error(text).field, "solver.r0_policy");
  text = replace(classical_text(), "fixed_point: {tol", "fixed_point: {tolerance");
  EXPECT_NE(parse_error(text).field.find("tolerance"), std::string::npos);
}

TEST(Parse, SemanticErrorsBecomeParseErrors) {
  parse_error(replace(classical_text(), "T_b: 2000", "T_b: 900"));
  parse_error(replace(classical_text(), "r0_policy: manual", "r0_policy: certificate"));
  parse_error(replace(classical_text(), "s0_bracket: [0.1, 1.0]", "s0_bracket: [1.0, 0.1]"));
  parse_error("just a string");
  parse_error("T_m: [1, 2");
  EXPECT_THROW(load_scenario("/nonexistent/scenario.yaml"), ParseError);
}

TEST(Parse, MissingFieldIsNamed) {
  std::string text = replace(classical_text(), "nu: 0.5\n", "");
  EXPECT_EQ(parse_error(text).field, "nu");
}

TEST(Parse, OptionalSections) {
  std::string text = classical_text() +
                     "grid: {n1: 32, n2: 48, stages: 6}\n"
                     "output: {nt: 4, nz: 10, z_extent: 2}\n"
                     "residual_grid: {nt: 5, nz: 7}\n";
  ScenarioFile f = parse_scenario(text);
  EXPECT_EQ(f.grid.n1, 32u);
  EXPECT_EQ(f.grid.stages, 6);
  EXPECT_EQ(f.output.nz, 10);
  EXPECT_EQ(f.output.z_extent, 2);
  EXPECT_EQ(f.residual_grid.nt, 5);
  EXPECT_EQ(make_problem(f).cfg.n2, 48u);
  parse_error(classical_text() + "grid: {stages: 40}\n");
}

TEST(FieldAccess, ByName) {
  PhysicalScenario s;
  scenario_field(s, "T_ion") = 42;
  EXPECT_EQ(s.T_ion, 42);
  EXPECT_THROW(scenario_field(s, "T_nope"), ParseError);
  AssumptionBounds b;
  bound_field(b, "K2t") = 0.5;
  EXPECT_EQ(b.K2t, 0.5);
  EXPECT_THROW(bound_field(b, "K3t"), ParseError);
}

TEST(Json, CanonicalFormatting) {
  ordered_json j = ordered_json::object();
  j["b"] = 0.1;
  j["a"] = std::vector<double>{1, 2.5};
  j["nan"] = std::numeric_limits<double>::quiet_NaN();
  j["s"] = "x\"y\n";
  j["o"] = ordered_json{{"k", true}};
  std::string out = canonical_dump(j);
  EXPECT_EQ(out,
            "{\n"
            "  \"b\": 0.10000000000000001,\n"
            "  \"a\": [1, 2.5],\n"
            "  \"nan\": null,\n"
            "  \"s\": \"x\\\"y\\n\",\n"
            "  \"o\": {\n"
            "    \"k\": true\n"
            "  }\n"
            "}\n");
  // every double survives a round trip
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.2250738585072014e-308}) {
    ordered_json one = ordered_json::object();
    one["v"] = v;
    EXPECT_EQ(ordered_json::parse(canonical_dump(one))["v"].get<double>(), v);
  }
}

TEST(Json, ScenarioRoundTrip) {
  ScenarioFile f = load_scenario(scenario_path("powerlaw.yaml"));
  ScenarioFile g = scenario_from_json(to_json(f), "roundtrip");
  EXPECT_EQ(canonical_dump(to_json(f)), canonical_dump(to_json(g)));
  DimensionlessConstants a = derive_constants(f.scenario), b = derive_constants(g.scenario);
  EXPECT_EQ(a.Q, b.Q);
  EXPECT_EQ(a.M, b.M);
  ASSERT_TRUE(g.bounds);
  EXPECT_EQ(g.bounds->N1M, f.bounds->N1M);
  EXPECT_EQ(g.solver.r0_policy, R0Policy::certificate);
}

TEST(Json, ProfileRoundTrip) {
  SimilarityProblem pb = make_problem(load_scenario(scenario_path("classical.yaml")));
  ProfilePair p = initial_guess(pb, 0.3, 0.5);
  ProfilePair q = profiles_from_json(ordered_json::parse(canonical_dump(to_json(p))), "x");
  EXPECT_EQ(p.s0, q.s0);
  EXPECT_EQ(p.f1, q.f1);
  EXPECT_EQ(p.f2, q.f2);
  EXPECT_THROW(profiles_from_json(ordered_json{{"s0", 1}}, "x"), ParseError);
}

TEST(Csv, QuotingAndLineEnds) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
  EXPECT_EQ(csv_number(0.5), "0.5");
  EXPECT_EQ(csv_number(NAN), "");
  CsvWriter w({"x", "y"});
  w.row({"1", "a,b"});
  EXPECT_EQ(w.str(), "x,y\r\n1,\"a,b\"\r\n");
  std::string fronts = fronts_csv({{1.0, 0.5, 0.75}});
  EXPECT_EQ(fronts, "t,s,r\r\n1,0.5,0.75\r\n");
}
