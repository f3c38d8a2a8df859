// End-to-end tests of the maxplus-growth executable.

#include <sys/wait.h>

#include <algorithm>
#include <catch_amalgamated.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args, const std::string& env = "") {
  const fs::path dir = fs::temp_directory_path();
  const fs::path out = dir / "maxplus_growth_cli_out.txt";
  const fs::path err = dir / "maxplus_growth_cli_err.txt";
  const std::string cmd = (env.empty() ? "" : "env " + env + " ") + "\"" MAXPLUS_GROWTH_CLI "\" " + args +
                          " > \"" + out.string() + "\" 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);) out.push_back(line);
  return out;
}

std::vector<std::string> data_rows(const std::string& csv) {
  std::vector<std::string> rows;
  for (auto& l : lines(csv))
    if (!l.empty() && l[0] != '#') rows.push_back(l);
  return rows;
}

// Subset of JSON Schema used by docs/schema: type, const, enum, required,
// properties, items, minimum, maximum, exclusiveMinimum and file $ref.
void validate(const json& value, const json& schema, const std::string& path = "$") {
  INFO("at " << path);
  if (schema.contains("$ref")) {
    std::ifstream in(fs::path(MAXPLUS_GROWTH_SCHEMA_DIR) / schema["$ref"].get<std::string>());
    validate(value, json::parse(in), path);
    return;
  }
  if (schema.contains("type")) {
    auto matches = [&](const std::string& t) {
      if (t == "object") return value.is_object();
      if (t == "array") return value.is_array();
      if (t == "string") return value.is_string();
      if (t == "boolean") return value.is_boolean();
      if (t == "null") return value.is_null();
      if (t == "integer") return value.is_number_integer();
      if (t == "number") return value.is_number();
      return false;
    };
    bool ok = false;
    if (schema["type"].is_array()) {
      for (const auto& t : schema["type"]) ok = ok || matches(t.get<std::string>());
    } else {
      ok = matches(schema["type"].get<std::string>());
    }
    REQUIRE(ok);
  }
  if (schema.contains("const")) REQUIRE(value == schema["const"]);
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& e : schema["enum"]) found = found || e == value;
    REQUIRE(found);
  }
  if (schema.contains("minimum")) REQUIRE(value.get<double>() >= schema["minimum"].get<double>());
  if (schema.contains("maximum")) REQUIRE(value.get<double>() <= schema["maximum"].get<double>());
  if (schema.contains("exclusiveMinimum"))
    REQUIRE(value.get<double>() > schema["exclusiveMinimum"].get<double>());
  if (schema.contains("required"))
    for (const auto& key : schema["required"]) REQUIRE(value.contains(key.get<std::string>()));
  if (schema.contains("properties"))
    for (const auto& [key, sub] : schema["properties"].items())
      if (value.contains(key)) validate(value[key], sub, path + "." + key);
  if (schema.contains("items"))
    for (std::size_t i = 0; i < value.size(); ++i)
      validate(value[i], schema["items"], path + "[" + std::to_string(i) + "]");
}

void validate_against(const std::string& output, const std::string& schema_file) {
  std::ifstream in(fs::path(MAXPLUS_GROWTH_SCHEMA_DIR) / schema_file);
  REQUIRE(in.good());
  validate(json::parse(output), json::parse(in));
}

std::string without_timestamp(const std::string& text) {
  json j = json::parse(text);
  j["meta"].erase("timestamp");
  return j.dump();
}

}  // namespace

TEST_CASE("lambda", "[cli]") {
  auto r = run("lambda --mu 1 --nu 1");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "1.250000000000\n");
  r = run("lambda --mu 1 --nu 2");
  CHECK(r.exit_code == 0);
  CHECK(r.out == "1.033333333333\n");
  r = run("lambda --mu 0 --nu 1");
  CHECK(r.exit_code == 2);
  CHECK_THAT(r.err, Catch::Matchers::ContainsSubstring("mu must be > 0"));
  CHECK(run("lambda --mu abc --nu 1").exit_code == 2);
  CHECK(run("lambda --mu 1").exit_code == 2);
  CHECK(run("").exit_code == 2);

  r = run("lambda --mu 2 --nu 2 --json");
  REQUIRE(r.exit_code == 0);
  validate_against(r.out, "lambda.schema.json");
  CHECK(json::parse(r.out)["lambda"].get<double>() == 0.625);
}

TEST_CASE("psi", "[cli]") {
  auto r = run("psi --mu 1 --nu 1 --limit");
  REQUIRE(r.exit_code == 0);
  const auto rows = data_rows(r.out);
  CHECK(rows.front() == "t,psi");
  CHECK(std::find(rows.begin(), rows.end(), "0.000000,0.500000000000") != rows.end());
  CHECK(rows.size() == 1 + 1001);

  r = run("psi --mu 1 --nu 2 --k 2");
  REQUIRE(r.exit_code == 0);
  CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("# c1=0.740740740741\n"));
  CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("# c2=0.259259259259\n"));

  const auto k1 = run("psi --mu 1 --nu 1 --k 1");
  const auto k7 = run("psi --mu 1 --nu 1 --k 7");
  CHECK(data_rows(k1.out) == data_rows(k7.out));

  CHECK(run("psi --mu 1 --nu 1 --k 2 --limit").exit_code == 3);
  CHECK(run("psi --mu 1 --nu 1").exit_code == 2);
  CHECK(run("psi --mu 1 --nu 1 --k 0").exit_code == 2);
  CHECK(run("psi --mu 1 --nu 1 --limit --step -0.1").exit_code == 2);
  CHECK(run("psi --mu 1 --nu 1 --limit --t-min 3 --t-max 1").exit_code == 2);
}

TEST_CASE("psi writes --out and round-trips its values", "[cli]") {
  const fs::path path = fs::temp_directory_path() / "maxplus_growth_psi.csv";
  fs::remove(path);
  const auto r = run("psi --mu 0.7 --nu 1.9 --limit --t-min -2 --t-max 2 --step 0.125 --out \"" +
                     path.string() + "\"");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.empty());
  const auto rows = data_rows(slurp(path));
  REQUIRE(rows.size() == 1 + 33);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto comma = rows[i].find(',');
    const double t = std::stod(rows[i].substr(0, comma));
    const double v = std::stod(rows[i].substr(comma + 1));
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f,%.12f", t, v);
    CHECK(rows[i] == buf);
  }
  const std::string text = slurp(path);
  CHECK(text.find('\r') == std::string::npos);
  CHECK_THAT(text, Catch::Matchers::StartsWith("# tool: maxplus-growth"));
}

TEST_CASE("phi", "[cli]") {
  const auto r = run("phi --mu 1 --nu 1 --t-max 1 --step 0.5");
  REQUIRE(r.exit_code == 0);
  const auto rows = data_rows(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "t,phi_cdf,phi_pdf");
  CHECK(rows[1] == "0.000000,0.000000000000,0.500000000000");
  CHECK(run("phi --mu -1 --nu 1").exit_code == 2);
}

TEST_CASE("simulate", "[cli]") {
  const std::string cmd = "simulate --mu 1 --nu 2 --steps 200 --trials 500 --seed 7 --record-y-at 200 --ks-against psi";
  const auto a = run(cmd, "MAXPLUS_THREADS=1");
  REQUIRE(a.exit_code == 0);
  validate_against(a.out, "simulate.schema.json");
  const json j = json::parse(a.out);
  CHECK(j["n"] == 500);
  CHECK(j["meta"]["seed"] == 7);
  CHECK(j["ks"]["against"] == "psi");
  CHECK(j["ks"]["threshold"].get<double>() == Catch::Approx(1.358 / std::sqrt(500.0)));

  const auto b = run(cmd, "MAXPLUS_THREADS=3");
  REQUIRE(b.exit_code == 0);
  CHECK(without_timestamp(a.out) == without_timestamp(b.out));

  CHECK(run("simulate --mu 1 --nu 2 --steps 10 --trials 5 --ks-against psi").exit_code == 3);
  CHECK(run("simulate --mu 1 --nu 2 --steps 10 --trials 5 --record-y-at 10 --ks-against nope").exit_code == 2);
  CHECK(run("simulate --mu 1 --nu 2 --steps 10 --trials 5 --record-y-at 11").exit_code == 2);
  CHECK(run("simulate --mu 1 --nu 2 --steps 0").exit_code == 2);
  CHECK(run("simulate --mu 1 --nu 2 --steps 10 --trials 5", "MAXPLUS_THREADS=abc").exit_code == 2);

  for (const char* law : {"psik", "phi"}) {
    const auto r = run(std::string("simulate --mu 1 --nu 2 --steps 3 --trials 2000 --seed 1 --record-y-at 3 --ks-against ") + law);
    REQUIRE(r.exit_code == 0);
    validate_against(r.out, "simulate.schema.json");
  }
}

TEST_CASE("verify", "[cli]") {
  auto r = run("verify --mu 1 --nu 1");
  CHECK(r.exit_code == 0);
  CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("6/6 checks passed"));
  CHECK(run("verify --mu 1 --nu 2").exit_code == 0);
  CHECK(run("verify --mu -1 --nu 2").exit_code == 2);

  r = run("verify --mu 1 --nu 2 --grid-tol 1e-12");
  CHECK(r.exit_code == 1);
  CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("FAIL grid_solver_vs_analytic"));

  r = run("verify --mu 0.5 --nu 3 --json");
  REQUIRE(r.exit_code == 0);
  validate_against(r.out, "verify.schema.json");
  CHECK(json::parse(r.out)["checks"].size() == 6);
}
