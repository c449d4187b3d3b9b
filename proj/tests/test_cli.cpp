#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "trion/cli/commands.hpp"
#include "trion/cli/config.hpp"
#include "trion/cli/table.hpp"
#include "trion/error.hpp"

using namespace trion;
using namespace trion::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / ("trion_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const std::string kEmpty = "{}";

}  // namespace

TEST_CASE("presets convert to valid run configurations") {
  for (const std::string& name : preset_names()) {
    CAPTURE(name);
    const RunConfig cfg = to_run_config(layer_config(name, json::object(), {}));
    CHECK_NOTHROW(cfg.model.validate());
    CHECK_NOTHROW(cfg.integrator.validate());
    CHECK(cfg.initial_state.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
  }
  const RunConfig fig3 = to_run_config(layer_config("fig3", json::object(), {}));
  CHECK(fig3.model.u == -20.0);
  CHECK(fig3.model.w_e == 1.7);
  CHECK(fig3.model.w_2e == 1.7);
  CHECK(fig3.model.w_h == 0.6);
  CHECK(fig3.model.phi == 24.6);
  const RunConfig fig6 = to_run_config(layer_config("fig6", json::object(), {}));
  CHECK(fig6.model.phi == 40.7);
  CHECK(std::abs(fig6.initial_state.population(1) - 0.5) <= 1e-15);
  CHECK(std::abs(fig6.initial_state.population(7) - 0.5) <= 1e-15);
  CHECK_THROWS_AS(preset("fig2"), ConfigError);
}

TEST_CASE("layering and overrides") {
  CHECK(override_patch("model.phi=3.5") == json{{"model", {{"phi", 3.5}}}});
  CHECK(override_patch("output.format=json") == json{{"output", {{"format", "json"}}}});
  CHECK(override_patch("sweep.pmin_states=[1,3]") == json{{"sweep", {{"pmin_states", {1, 3}}}}});
  CHECK_THROWS_AS(override_patch("nokey"), ConfigError);
  CHECK_THROWS_AS(override_patch("a..b=1"), ConfigError);

  const json file = {{"model", {{"phi", 7.0}}}, {"workers", 2}};
  const RunConfig cfg = to_run_config(layer_config("fig1", file, {"model.omega=3"}));
  CHECK(cfg.model.phi == 7.0);
  CHECK(cfg.model.omega == 3.0);
  CHECK(cfg.model.u == -1.0);
  CHECK(cfg.workers == 2);

  // The preset can come from the file itself.
  CHECK(to_run_config(layer_config("", json{{"preset", "fig6"}}, {})).model.phi == 40.7);
}

TEST_CASE("config validation") {
  auto bad = [](const json& file) { return to_run_config(layer_config("fig1", file, {})); };
  CHECK_THROWS_AS(bad({{"model", {{"phii", 1.0}}}}), ConfigError);
  CHECK_THROWS_AS(bad({{"model", {{"omega", 0.0}}}}), ConfigError);
  CHECK_THROWS_AS(bad({{"model", {{"phi", "big"}}}}), ConfigError);
  CHECK_THROWS_AS(bad({{"integrator", {{"steps_per_period", 100}, {"sample_stride", 3}}}}), ConfigError);
  CHECK_THROWS_AS(bad({{"output", {{"format", "xml"}}}}), ConfigError);
  CHECK_THROWS_AS(bad({{"entangle", {{"target", "gamma"}}}}), ConfigError);
  CHECK_THROWS_AS(to_run_config(json::object()), ConfigError);
  CHECK_THROWS_AS(bad({{"entangle", {{"filter", {{"zeroed", {1}}, {"mode", "scaled"}}}}}}), ConfigError);
  const RunConfig weighted =
      bad({{"entangle", {{"filter", {{"zeroed", {1, 7}}, {"mode", "paper-literal"}}}}}});
  REQUIRE(weighted.entangle.filter.has_value());
  CHECK(weighted.entangle.filter->mode == FilterMode::group_weighted);

  json st = json::array();
  for (int i = 0; i < 8; ++i) st.push_back({i == 0 ? 2.0 : 0.0, 0.0});
  const RunConfig scaled = to_run_config(layer_config("fig1", json{{"dynamics", {{"initial_state", st}}}}, {}));
  CHECK(scaled.initial_state.population(1) == 1.0);
  CHECK(scaled.warnings.size() == 1);

  const RunConfig defaulted =
      to_run_config(layer_config("", json{{"model", {{"w_e", 0.4}, {"w_h", 0.1}, {"u", -2.0}, {"omega", 1.0}, {"phi", 0.0}}}}, {}));
  CHECK(defaulted.model.w_2e == 0.4);
}

TEST_CASE("table formatting") {
  Table t{"demo", {"a", "b", "label"}, {}};
  t.add_row({1.0 / 3.0, 7LL, std::string("x,\"y\"")});
  CHECK_THROWS_AS(t.add_row({1.0}), std::logic_error);
  std::ostringstream csv;
  write_csv(t, csv);
  CHECK(csv.str() == "a,b,label\n0.33333333333333331,7,\"x,\"\"y\"\"\"\n");
  CHECK(std::strtod(format_real(0.1).c_str(), nullptr) == 0.1);

  std::ostringstream js;
  write_json(t, js);
  const json doc = json::parse(js.str());
  CHECK(doc["command"] == "demo");
  CHECK(doc["rows"][0][0].get<double>() == 1.0 / 3.0);

  Table nan{"demo", {"a"}, {}};
  nan.add_row({std::nan("")});
  std::ostringstream sink;
  CHECK_THROWS_AS(write_csv(nan, sink), NumericalFailure);
}

TEST_CASE("exit codes") {
  const fs::path empty = write_file("empty.json", kEmpty);
  CHECK(run({"evolve", "--config", empty.string(), "--preset", "decoupled", "--override", "dynamics.n_periods=1"}).code == kOk);
  CHECK(run({"evolve", "--config", (scratch_dir() / "missing.json").string()}).code == kIoFailure);
  CHECK(run({"evolve"}).code == kConfigError);
  CHECK(run({"frobnicate", "--config", empty.string()}).code == kConfigError);
  CHECK(run({"evolve", "--config", write_file("bad.json", "{not json").string()}).code == kConfigError);
  CHECK(run({"evolve", "--config", empty.string(), "--preset", "nope"}).code == kConfigError);

  const Run range = run({"spectrum", "--config", empty.string(), "--preset", "fig1", "--override", "sweep.phi_min=5",
                         "--override", "sweep.phi_max=1"});
  CHECK(range.code == kConfigError);

  const Run blowup = run({"spectrum", "--config", empty.string(), "--preset", "fig1", "--override", "sweep.phi_min=1e6",
                          "--override", "sweep.phi_max=2e6", "--override", "sweep.n_points=2", "--override",
                          "integrator.steps_per_period=64", "--override", "integrator.sample_stride=1"});
  CHECK(blowup.code == kNumericalFailure);
  CHECK(blowup.err.find("phi = ") != std::string::npos);

  const Run unwritable = run({"evolve", "--config", empty.string(), "--preset", "decoupled", "--override",
                              "dynamics.n_periods=1", "--out", "/nonexistent-dir/out.csv"});
  CHECK(unwritable.code == kIoFailure);
  CHECK(run({"--help"}).code == kOk);
}

TEST_CASE("spectrum output shape") {
  const fs::path empty = write_file("empty.json", kEmpty);
  const Run r = run({"spectrum", "--config", empty.string(), "--preset", "fig1", "--override", "sweep.n_points=3",
                     "--override", "sweep.phi_max=20", "--override", "sweep.n_periods=2"});
  REQUIRE(r.code == kOk);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 4);
  REQUIRE(rows[0].size() == 1 + 8 + 8 + 2);
  CHECK(rows[0][0] == "phi");
  CHECK(rows[0][1] == "eps_1");
  CHECK(rows[0][9] == "parity_1");
  CHECK(rows[0][17] == "pmin_1");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    for (int k = 1; k <= 8; ++k) {
      const double e = std::stod(rows[i][k]);
      CHECK(e >= -1.0);
      CHECK(e < 1.0);
    }
  }
}

TEST_CASE("evolve output: normalization, JSON/CSV agreement, determinism") {
  const fs::path cfg = write_file("fig6.json", R"({"preset": "fig6", "dynamics": {"n_periods": 2}})");
  const fs::path csv_path = scratch_dir() / "a.csv";
  const fs::path csv_again = scratch_dir() / "b.csv";
  const fs::path json_path = scratch_dir() / "a.json";
  REQUIRE(run({"evolve", "--config", cfg.string(), "--out", csv_path.string()}).code == kOk);
  REQUIRE(run({"evolve", "--config", cfg.string(), "--out", csv_again.string()}).code == kOk);
  REQUIRE(run({"evolve", "--config", cfg.string(), "--out", json_path.string(), "--format", "json"}).code == kOk);
  CHECK(slurp(csv_path) == slurp(csv_again));

  const auto rows = parse_csv(slurp(csv_path));
  const json doc = json::parse(slurp(json_path));
  REQUIRE(doc["rows"].size() + 1 == rows.size());
  CHECK(rows[0][1] == "p1");
  CHECK(rows[0][9] == "re_c1");
  CHECK(rows[0][10] == "im_c1");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    double total = 0.0;
    for (int k = 1; k <= 8; ++k) total += std::stod(rows[i][k]);
    CHECK(std::abs(total - 1.0) <= 1e-6);
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      const double a = std::strtod(rows[i][c].c_str(), nullptr);
      const double b = doc["rows"][i - 1][c].get<double>();
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("decoupled populations stay frozen") {
  const fs::path empty = write_file("empty.json", kEmpty);
  const Run r = run({"evolve", "--config", empty.string(), "--preset", "decoupled", "--override", "dynamics.n_periods=3"});
  REQUIRE(r.code == kOk);
  const auto rows = parse_csv(r.out);
  for (std::size_t i = 1; i < rows.size(); ++i)
    for (int k = 1; k <= 8; ++k) CHECK(std::abs(std::stod(rows[i][k]) - (k == 2 ? 1.0 : 0.0)) <= 1e-9);
}

TEST_CASE("crossings output") {
  const fs::path empty = write_file("empty.json", kEmpty);
  const Run flat = run({"crossings", "--config", empty.string(), "--preset", "decoupled"});
  REQUIRE(flat.code == kOk);
  CHECK(flat.out == "phi_star,track_a,track_b,kind,gap\n");

  const Run r = run({"crossings", "--config", empty.string(), "--preset", "fig1", "--override", "sweep.phi_min=9.5",
                     "--override", "sweep.phi_max=11.5", "--override", "sweep.n_points=21"});
  REQUIRE(r.code == kOk);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() >= 2);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const int a = std::stoi(rows[i][1]), b = std::stoi(rows[i][2]);
    CHECK(a >= 1);
    CHECK(a < b);
    CHECK(b <= 8);
    CHECK((rows[i][3] == "exact" || rows[i][3] == "avoided"));
  }
}

TEST_CASE("entangle output columns") {
  const fs::path empty = write_file("empty.json", kEmpty);
  const Run r = run({"entangle", "--config", empty.string(), "--preset", "fig7", "--override", "dynamics.n_periods=1"});
  REQUIRE(r.code == kOk);
  const auto rows = parse_csv(r.out);
  REQUIRE(!rows.empty());
  CHECK(rows[0] == std::vector<std::string>{"t", "concurrence_full", "concurrence_analytic", "overlap_rho2",
                                            "overlap_envelope_rho2"});
}

TEST_CASE("the executable writes the same bytes as the library entry point") {
  const fs::path empty = write_file("empty.json", kEmpty);
  const fs::path out = scratch_dir() / "exe.csv";
  const std::string cmd = std::string("\"") + TRION_FLOQUET_EXE + "\" evolve --config \"" + empty.string() +
                          "\" --preset decoupled --override dynamics.n_periods=1 --out \"" + out.string() + "\"";
  REQUIRE(std::system(cmd.c_str()) == 0);
  const Run lib = run({"evolve", "--config", empty.string(), "--preset", "decoupled", "--override", "dynamics.n_periods=1"});
  CHECK(slurp(out) == lib.out);

  const std::string fail = std::string("\"") + TRION_FLOQUET_EXE + "\" spectrum --config \"" + empty.string() +
                           "\" --preset fig1 --override sweep.phi_min=5 --override sweep.phi_max=1 2>/dev/null";
  const int status = std::system(fail.c_str());
  CHECK(WEXITSTATUS(status) == kConfigError);
}
