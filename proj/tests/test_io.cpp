#include <cmath>
#include <limits>
#include <string>

#include <gtest/gtest.h>

#include "fpcs/config.hpp"
#include "fpcs/engine.hpp"
#include "fpcs/io.hpp"

namespace fpcs {
namespace {

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(std::int64_t{1234567890123}), "1234567890123");
  for (double v : {1.0 / 3.0, 2.0 / 7.0 * 1e-300, 6.02214076e23, -0.0, 5e-324}) EXPECT_EQ(parse_double(format_number(v)), v);
}

TEST(Csv, RoundTripIsByteIdentical) {
  const std::string text =
      "# version=fpcs 0.1.0\n"
      "# lambda=0.25\n"
      "q,p_fixed,p_naive\n"
      "1,0.6171875,1\n"
      "2,0.9000000000000001,0.25\n";
  const CsvDocument doc = CsvDocument::parse(text);
  EXPECT_EQ(doc.meta.size(), 2u);
  EXPECT_EQ(*doc.find_meta("lambda"), "0.25");
  EXPECT_EQ(doc.find_meta("delta"), nullptr);
  EXPECT_EQ(doc.column("p_naive"), 2u);
  EXPECT_THROW(doc.column("missing"), IoError);
  EXPECT_EQ(doc.str(), text);
}

TEST(Csv, RejectsMalformedInput) {
  EXPECT_THROW(CsvDocument::parse("# only=meta\n"), IoError);
  EXPECT_THROW(CsvDocument::parse("a,b\n1\n"), IoError);
  EXPECT_THROW(CsvDocument::parse("# novalue\na\n"), IoError);
  CsvDocument bad;
  bad.header = {"a"};
  bad.rows = {{"x,y"}};
  EXPECT_THROW(bad.str(), IoError);
  EXPECT_THROW(parse_double("1.5x"), IoError);
}

TEST(Csv, ToJsonKeepsIntegersIntegral) {
  const Json j = CsvDocument::parse("# k=v\nname,n,x\nabc,3,0.5\n").to_json();
  EXPECT_EQ(j["meta"]["k"], "v");
  EXPECT_EQ(j["columns"][1], "n");
  EXPECT_TRUE(j["rows"][0][0].is_string());
  EXPECT_TRUE(j["rows"][0][1].is_number_integer());
  EXPECT_TRUE(j["rows"][0][2].is_number_float());
  EXPECT_EQ(j.dump(), R"({"meta":{"k":"v"},"columns":["name","n","x"],"rows":[["abc",3,0.5]]})");
}

TEST(Trace, CsvRoundTrip) {
  const Trace t = run_noisy(0.01, 9, 0.1, 0.02);
  const CsvDocument doc = trace_to_csv(t);
  const std::string text = doc.str();
  const Trace back = trace_from_csv(CsvDocument::parse(text));
  EXPECT_EQ(back.lambda, t.lambda);
  EXPECT_EQ(back.delta, t.delta);
  EXPECT_EQ(back.depol, t.depol);
  EXPECT_EQ(back.mode, t.mode);
  ASSERT_EQ(back.points.size(), t.points.size());
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    EXPECT_EQ(back.points[i].q, t.points[i].q);
    EXPECT_EQ(back.points[i].p, t.points[i].p);
  }
  EXPECT_EQ(trace_to_csv(back).str(), text);

  const Trace naive = trace_from_csv(trace_to_csv(run_naive_grover(0.25, 4)));
  EXPECT_FALSE(naive.delta.has_value());
  EXPECT_EQ(naive.mode, TraceMode::naive);
}

TEST(Json, OverlapRoundTrip) {
  OverlapEstimate e{0.0041666, 1.3e-5, 2'000'000, OverlapMethod::monte_carlo, 42};
  const std::string text = dump_json(to_json(e));
  const OverlapEstimate back = overlap_from_json(parse_json(text));
  EXPECT_EQ(back.lambda, e.lambda);
  EXPECT_EQ(back.std_error, e.std_error);
  EXPECT_EQ(back.samples_or_cells, e.samples_or_cells);
  EXPECT_EQ(back.method, e.method);
  EXPECT_EQ(back.seed, e.seed);
  EXPECT_EQ(dump_json(to_json(back)), text);

  const OverlapEstimate grid{0.5, 0.0, 1024, OverlapMethod::grid, std::nullopt};
  EXPECT_FALSE(overlap_from_json(to_json(grid)).seed.has_value());
  EXPECT_THROW(parse_json("{\"lambda\": "), IoError);
}

const char* kIni = R"(
[search]
problem = alpine02
delta = 0.05
samples = 2000000
method = mc

[noise]
depol = 0, 0.01 0.02

[spectral]
terms = 1 2 0; 1 0 2
gate_check = yes

[problem:bowl]
objective = x1^2 + x2^2
box = -1 1; -1 1
constraints = x1 + x2 <= 1; x1 >= -0.5
epsilon = 0.2
)";

TEST(Config, TypedLookup) {
  const Config c = Config::from_string(kIni);
  EXPECT_EQ(*c.get<std::string>("search", "problem"), "alpine02");
  EXPECT_DOUBLE_EQ(*c.get<double>("search", "delta"), 0.05);
  EXPECT_EQ(*c.get<std::int64_t>("search", "samples"), 2'000'000);
  EXPECT_TRUE(*c.get<bool>("spectral", "gate_check"));
  EXPECT_FALSE(c.has("search", "seed"));
  EXPECT_FALSE(c.get<double>("sweep", "lambda").has_value());
  EXPECT_THROW(c.get<int>("search", "problem"), ConfigError);
  EXPECT_THROW(c.get<int>("search", "delta"), ConfigError);
  const auto depol = *c.get_list("noise", "depol");
  ASSERT_EQ(depol.size(), 3u);
  EXPECT_DOUBLE_EQ(depol[2], 0.02);
}

TEST(Config, SemicolonsSurviveInValues) {
  const Config c = Config::from_string(kIni);
  EXPECT_EQ(*c.raw("spectral", "terms"), "1 2 0; 1 0 2");
  const OperatorSpec terms = Config::parse_operator_terms(*c.raw("spectral", "terms"));
  ASSERT_EQ(terms.size(), 2u);
  EXPECT_EQ(terms[0].x_power, 2);
  EXPECT_EQ(terms[1].p_power, 2);
}

TEST(Config, CustomProblemSection) {
  const Config c = Config::from_string(kIni);
  ASSERT_EQ(c.problem_names(), std::vector<std::string>{"bowl"});
  const CustomProblemSpec spec = *c.custom_problem("bowl");
  EXPECT_EQ(spec.dimension, 2);
  EXPECT_EQ(spec.objective, "x1^2 + x2^2");
  ASSERT_EQ(spec.box.size(), 2u);
  EXPECT_DOUBLE_EQ(spec.box[1].lo, -1.0);
  ASSERT_EQ(spec.constraints.size(), 2u);
  EXPECT_EQ(spec.constraints[1], "x1 >= -0.5");
  EXPECT_DOUBLE_EQ(spec.epsilon, 0.2);
  EXPECT_FALSE(c.custom_problem("missing").has_value());
}

TEST(Config, Errors) {
  EXPECT_THROW(Config::from_string("[a\nx=1\n"), ConfigError);
  EXPECT_THROW(Config::from_file("/nonexistent/fpcs.ini"), ConfigError);
  EXPECT_THROW(Config::from_string("[problem:p]\nbox = 0 1\n").custom_problem("p"), ConfigError);
  EXPECT_THROW(Config::from_string("[problem:p]\nobjective = x1\nbox = 0 1 2\n").custom_problem("p"), ConfigError);
  EXPECT_THROW(Config::parse_operator_terms("1 2"), ConfigError);
  EXPECT_THROW(Config::parse_operator_terms("1 2.5 0"), ConfigError);
  EXPECT_THROW(Config::parse_operator_terms(" ; "), ConfigError);
}

}  // namespace
}  // namespace fpcs
