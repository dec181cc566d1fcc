#include <gtest/gtest.h>

#include <cmath>

#include "emhd/config.hpp"
#include "emhd/report.hpp"

using namespace emhd;
using nlohmann::json;

namespace {
std::string pointer_of(const std::string& command, const json& user) {
  try {
    resolve_config(command, user);
  } catch (const ConfigError& e) {
    return e.pointer();
  }
  return "<none>";
}
}  // namespace

TEST(Config, EveryCommandResolvesFromAnEmptyObject) {
  for (const auto& c : command_names()) {
    const json r = resolve_config(c, json::object());
    EXPECT_EQ(r["seed"], 1) << c;
    EXPECT_EQ(r["threads"], 1) << c;
    EXPECT_EQ(r["out"], "out") << c;
  }
  EXPECT_THROW(command_defaults("plot"), ConfigError);
}

TEST(Config, UserValuesOverrideDefaults) {
  const json r = resolve_config("solve", json::parse(R"({"T": 0.5, "grid": {"n": 16}})"));
  EXPECT_EQ(r["T"], 0.5);
  EXPECT_EQ(r["grid"]["n"], 16);
  EXPECT_EQ(r["grid"]["lambda"], 2.0);
  EXPECT_EQ(r["mode"], "linearized");
}

TEST(Config, FieldSpecsResolveByType) {
  const json r = resolve_config("certify", json::parse(R"({"field": {"type": "bump", "delta": 0.01}})"));
  EXPECT_EQ(r["field"]["delta"], 0.01);
  EXPECT_EQ(r["field"]["width"], 1.0);
  EXPECT_EQ(field_id(r["field"]), "bump(delta=0.01)");
  EXPECT_EQ(field_id(resolve_config("trace", json::object())["field"]), "e3");
}

TEST(Config, UnknownKeysReportTheirPointer) {
  EXPECT_EQ(pointer_of("trace", json::parse(R"({"tmax": 3})")), "/tmax");
  EXPECT_EQ(pointer_of("solve", json::parse(R"({"grid": {"n": 16, "L": 2}})")), "/grid/L");
  EXPECT_EQ(pointer_of("certify", json::parse(R"({"field": {"type": "bump", "sigma": 1}})")), "/field/sigma");
  EXPECT_EQ(pointer_of("certify", json::parse(R"({"field": {"type": "torus"}})")), "/field/type");
}

TEST(Config, TypeAndRangeErrorsReportTheirPointer) {
  EXPECT_EQ(pointer_of("solve", json::parse(R"({"T": "long"})")), "/T");
  EXPECT_EQ(pointer_of("solve", json::parse(R"({"grid": {"n": 16.5}})")), "/grid/n");
  EXPECT_EQ(pointer_of("solve", json::parse(R"({"grid": {"n": 24}})")), "/grid/n");
  EXPECT_EQ(pointer_of("solve", json::parse(R"({"T": -1})")), "/T");
  EXPECT_EQ(pointer_of("solve", json::parse(R"({"mode": "implicit"})")), "/mode");
  EXPECT_EQ(pointer_of("smooth", json::parse(R"({"ks": []})")), "/ks");
  EXPECT_EQ(pointer_of("norms", json::parse(R"({"threads": 0})")), "/threads");
  EXPECT_EQ(pointer_of("trace", json::parse(R"({"rays": [{"x": [0, 0]}]})")), "/rays/0/x");
  EXPECT_EQ(pointer_of("trace", json::parse(R"({"T": 1.0, "grid": {"n": 16}})")), "/T");
  EXPECT_EQ(pointer_of("solve", json::parse(R"({"T": 2})")), "<none>");
}

TEST(Config, MalformedJsonIsAConfigError) {
  EXPECT_THROW(parse_config_text("{\"T\": 1,"), ConfigError);
  EXPECT_EQ(parse_config_text("{\"T\": 1}")["T"], 1);
}

TEST(Config, HashIsStableAndSensitive) {
  const json a = resolve_config("solve", json::object());
  const json b = resolve_config("solve", json::parse(R"({"T": 1.0})"));
  const json c = resolve_config("solve", json::parse(R"({"T": 1.5})"));
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_NE(config_hash(a), config_hash(c));
  EXPECT_EQ(config_hash(a).size(), 16u);
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ull);
}

TEST(Config, ProvenanceNamesCommandHashAndVersion) {
  const auto p = provenance("solve", "abc");
  EXPECT_EQ(p["command"], "solve");
  EXPECT_EQ(p["config_hash"], "abc");
  EXPECT_EQ(p["version"], version_string());
  EXPECT_EQ(csv_provenance("solve", "abc"), "# command=solve\n# config_hash=abc\n# version=" + version_string() + "\n");
}

TEST(Config, FieldsAreBuiltOnTheGrid) {
  const Grid3 g = grid_from(json::parse(R"({"n": 8, "lambda": 1.0})"));
  EXPECT_EQ(g.n, 8);
  const json spec = resolve_config("norms", json::parse(R"({"field": {"type": "uniform", "value": [0, 1, 0]}})"))["field"];
  const FieldPtr f = make_field(spec, g);
  EXPECT_EQ(f->eval({0.3, 0.2, 0.1}).B[1], 1.0);
  const SpectralVectorField s = make_spectral(spec, g);
  EXPECT_NEAR(mean(s)[1], 1.0, 1e-14);
}
