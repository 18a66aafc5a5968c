#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "cimsim/io.hpp"
#include "testutil.hpp"

using namespace cimsim;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  std::string cmd = testutil::cli_path() + " " + args;
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& p) const {
    return (path / p).string();
  }
};

}  // namespace

TEST_CASE("cli round trip: synth, map, allocate, simulate, compare" *
          doctest::skip(testutil::cli_path().empty())) {
  TempDir dir("cimsim_cli_test");
  std::string quiet = " > /dev/null 2>&1";

  // Small custom network.
  std::string layers =
      "'[{\"kind\":\"conv\",\"kh\":3,\"kw\":3,\"cin\":4,\"cout\":8,"
      "\"stride\":1,\"pad\":1,\"h\":6,\"w\":6},"
      "{\"kind\":\"fc\",\"in\":288,\"out\":10}]'";
  REQUIRE(run("synth --layers " + layers + " --densities 0.3,0.1 --images 3"
              " --seed 5 --out " + (dir / "d") + quiet) == 0);
  CHECK(fs::exists(dir / "d/network.json"));
  CHECK(fs::exists(dir / "d/trace.json"));
  CHECK(fs::exists(dir / "d/trace_layer_0.bin"));
  CHECK(fs::exists(dir / "d/trace_layer_1.bin"));

  REQUIRE(run("map --network " + (dir / "d/network.json") + " --out " +
              (dir / "map.json") + quiet) == 0);
  Json m = load_json_file(dir / "map.json");
  // conv 36 rows -> 1 block; fc 288 rows -> 3 blocks
  CHECK(m["totals"]["blocks"].get<int>() == 4);
  CHECK(m.contains("config"));
  CHECK(m["inputs"].contains("network"));

  REQUIRE(run("profile --network " + (dir / "d/network.json") + " --trace " +
              (dir / "d/trace.json") + " --out " + (dir / "profile.csv") +
              quiet) == 0);
  CHECK(fs::exists(dir / "profile.csv"));
  CHECK(fs::exists(dir / "profile.csv.meta.json"));

  REQUIRE(run("allocate --network " + (dir / "d/network.json") + " --trace " +
              (dir / "d/trace.json") +
              " --policy block --pe_count 2 --out " + (dir / "alloc.json") +
              quiet) == 0);
  Json a = load_json_file(dir / "alloc.json");
  CHECK(a["policy"] == "block");
  CHECK(a["arrays_used"].get<int>() <= a["arrays_budget"].get<int>());

  for (std::string pol : {"weight", "block"}) {
    std::string df = pol == "block" ? "blockwise" : "layerwise";
    REQUIRE(run("simulate --network " + (dir / "d/network.json") +
                " --trace " + (dir / "d/trace.json") + " --policy " + pol +
                " --dataflow " + df + " --pe_count 2 --out " +
                (dir / ("rep_" + pol + ".json")) + quiet) == 0);
  }
  REQUIRE(run("compare --reports " + (dir / "rep_weight.json") + " " +
              (dir / "rep_block.json") +
              " --baseline weight --format json --out " + (dir / "cmp.json") +
              quiet) == 0);
  Json c = load_json_file(dir / "cmp.json");
  CHECK(c["rows"].size() == 2);

  REQUIRE(run("utilization --report " + (dir / "rep_weight.json") +
              " --out " + (dir / "util.csv") + quiet) == 0);
  std::ifstream util(dir / "util.csv");
  std::string header;
  std::getline(util, header);
  CHECK(header.rfind("layer,instances,arrays", 0) == 0);
}

TEST_CASE("hidden verify subcommand passes" *
          doctest::skip(testutil::cli_path().empty())) {
  CHECK(run("verify --seed 12 > /dev/null 2>&1") == 0);
}

TEST_CASE("cli exit codes" * doctest::skip(testutil::cli_path().empty())) {
  TempDir dir("cimsim_cli_codes");
  std::string quiet = " > /dev/null 2>&1";

  SUBCASE("usage errors exit 2") {
    CHECK(run("synth --densities 0.5" + quiet) == 2);  // --out missing
    CHECK(run("nonsense" + quiet) == 2);
  }
  SUBCASE("validation errors exit 3 with error json on stderr") {
    std::string err = dir / "err.json";
    CHECK(run("map --network /nonexistent.json 2> " + err + " > /dev/null") ==
          3);
    Json j = load_json_file(err);
    CHECK(j.contains("error"));
    CHECK(j["error"].contains("message"));
  }
  SUBCASE("capacity errors exit 4") {
    REQUIRE(run("synth --preset resnet18-shape --densities 0.2 --images 1"
                " --seed 1 --out " + (dir / "rn") + quiet) == 0);
    CHECK(run("pipeline --network " + (dir / "rn/network.json") + " --trace " +
              (dir / "rn/trace.json") +
              " --policies weight --pes 1 --sim_mode timing --images 1"
              " --out " + (dir / "out") + quiet) == 4);
  }
}

TEST_CASE("pipeline emits the policy x design-size cross product" *
          doctest::skip(testutil::cli_path().empty())) {
  TempDir dir("cimsim_cli_pipeline");
  std::string quiet = " > /dev/null 2>&1";
  std::string layers =
      "'[{\"kind\":\"conv\",\"kh\":3,\"kw\":3,\"cin\":4,\"cout\":8,"
      "\"stride\":1,\"pad\":1,\"h\":6,\"w\":6},"
      "{\"kind\":\"conv\",\"kh\":1,\"kw\":1,\"cin\":8,\"cout\":8,"
      "\"stride\":1,\"pad\":0,\"h\":6,\"w\":6}]'";
  REQUIRE(run("synth --layers " + layers + " --densities 0.4,0.1 --images 4"
              " --seed 6 --out " + (dir / "d") + quiet) == 0);
  REQUIRE(run("pipeline --network " + (dir / "d/network.json") + " --trace " +
              (dir / "d/trace.json") +
              " --policies weight,perf_layer,block --pes 1,2,3"
              " --sim_mode timing --images 4 --warmup 1 --out " +
              (dir / "sweep") + quiet) == 0);
  int reports = 0;
  for (auto& e : fs::directory_iterator(dir / "sweep"))
    if (e.path().filename().string().rfind("report_", 0) == 0) ++reports;
  CHECK(reports == 9);
  CHECK(fs::exists(dir / "sweep/comparison.csv"));
  CHECK(fs::exists(dir / "sweep/comparison.json"));

  // More PEs never slow a policy down.
  Json cmp = load_json_file(dir / "sweep/comparison.json");
  std::map<std::string, std::vector<std::pair<int, uint64_t>>> by_policy;
  for (const auto& row : cmp["rows"])
    by_policy[row["policy"].get<std::string>()].push_back(
        {row["pe_count"].get<int>(), row["makespan"].get<uint64_t>()});
  for (auto& [policy, rows] : by_policy) {
    std::sort(rows.begin(), rows.end());
    for (size_t i = 1; i < rows.size(); ++i)
      CHECK(rows[i].second <= rows[i - 1].second);
  }
}
