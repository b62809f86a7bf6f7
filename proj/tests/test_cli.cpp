#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "biharm/error.hpp"
#include "biharm/report.hpp"
#include "biharm/run_config.hpp"

using namespace biharm;

namespace {

const std::filesystem::path kData = BIHARM_DATA_DIR;

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "biharm_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int code;
  std::string out, err;
};

Run run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("argument round trip") {
  RunConfig c;
  c.command = Command::Converge;
  c.domain_file = "some/where.dom";
  c.refinement = 7;
  c.k_max = 3;
  c.theorem = Theorem::Provenzano;
  c.bc = BoundaryCondition::Neumann;
  c.count = 12;
  c.index = 4;
  c.ladder = {4, 8, 16, 32};
  c.family = FamilyChoice::Symmetric;
  c.seed = {0.25, -1.0 / 3.0};
  c.full_replay = true;
  c.replay = false;
  c.report_path = "r.json";
  c.csv_path = "r.csv";
  c.tol_margin = 1.0 / 7.0;
  c.solver_tolerance = 3e-11;
  c.replay_tolerance = 2e-6;
  c.rank_tolerance = 1e-9;
  c.kernel_tolerance = 5e-10;
  CHECK(parse_args(to_args(c)) == c);
  CHECK(parse_args(to_args(RunConfig{})) == RunConfig{});
}

TEST_CASE("argument errors") {
  auto code = [](std::vector<std::string> a) {
    try {
      parse_args(a);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoFailure;
  };
  CHECK(code({"bogus"}) == ErrorCode::ParseError);
  CHECK(code({}) == ErrorCode::ParseError);
  CHECK(code({"spectrum", "--refine", "0"}) == ErrorCode::ParseError);
  CHECK(code({"spectrum", "--refine", "x"}) == ErrorCode::ParseError);
  CHECK(code({"spectrum", "--colour", "red"}) == ErrorCode::ParseError);
  CHECK(code({"inequality", "--theorem", "thm9"}) == ErrorCode::ParseError);
  CHECK(code({"construct", "--seed", "1,2,3,4"}) == ErrorCode::ParseError);
}

TEST_CASE("help") {
  const auto r = run_cli({"--help"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("--domain") != std::string::npos);
  CHECK(usage().find("inequality") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run_cli({"inequality", "--domain", "/nonexistent.dom"}).code == kExitInputError);
  CHECK(run_cli({"inequality"}).code == kExitInputError);
  CHECK(run_cli({"frobnicate"}).code == kExitInputError);
  CHECK(run_cli({"kernel", "--domain", (kData / "square.dom").string(), "--refine", "16"}).code == kExitOk);
  const auto sym = run_cli({"inequality", "--domain", (kData / "l_shape.dom").string(), "--theorem", "thm2"});
  CHECK(sym.code == kExitInputError);
  CHECK(sym.err.find("SymmetryMissing") != std::string::npos);
  const auto defect =
      run_cli({"kernel", "--domain", (kData / "square.dom").string(), "--refine", "4", "--kernel-tol", "1e-30"});
  CHECK(defect.code == kExitVerdictFailed);
  CHECK(defect.err.find("KernelDefect") != std::string::npos);
  CHECK(run_cli({"spectrum", "--domain", (kData / "square.dom").string(), "--refine", "2", "--count", "500"}).code ==
        kExitInputError);
}

TEST_CASE("spectrum command writes a JSON report") {
  const auto report = scratch("spectrum.json");
  const auto r = run_cli({"spectrum", "--domain", (kData / "square.dom").string(), "--refine", "4", "--bc", "neumann",
                          "--count", "5", "--report", report.string()});
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::json::parse(slurp(report));
  CHECK(j["command"] == "spectrum");
  CHECK(j["spectrum"]["eigenvalues"].size() == 5);
  CHECK(j["spectrum"]["kernel_dimension"] == 3);
  CHECK(parse_args(j["arguments"].get<std::vector<std::string>>()).count == 5);
}

TEST_CASE("construct and converge commands") {
  const auto c = run_cli({"construct", "--domain", (kData / "square_centered.dom").string(), "--refine", "8",
                          "--family", "symmetric"});
  CHECK(c.code == kExitOk);
  CHECK(c.out.find("symmetric-trig") != std::string::npos);
  const auto v = run_cli({"converge", "--domain", (kData / "square.dom").string(), "--ladder", "4,8,16"});
  CHECK(v.code == kExitOk);
  CHECK(v.out.find("monotone from above: yes") != std::string::npos);
}

TEST_CASE("CSV output") {
  InequalityReport empty;
  CHECK(csv_string(empty) == "k,lambda_k,mu_k_plus_shift,margin\n");

  const auto csv = scratch("square.csv");
  const std::vector<std::string> args{"inequality", "--domain", (kData / "square.dom").string(), "--theorem", "thm2",
                                      "--kmax", "10", "--refine", "8", "--no-replay", "--csv", csv.string()};
  REQUIRE(run_cli(args).code == kExitOk);
  const std::string first = slurp(csv);
  CHECK(count_lines(first) == 11);
  CHECK(first.rfind("k,lambda_k,mu_k_plus_shift,margin\n1,", 0) == 0);
  REQUIRE(run_cli(args).code == kExitOk);
  CHECK(slurp(csv) == first);
}

TEST_CASE("inequality JSON report") {
  const auto report = scratch("ineq.json");
  const auto r = run_cli({"inequality", "--domain", (kData / "square_centered.dom").string(), "--theorem", "thm1",
                          "--kmax", "4", "--refine", "8", "--report", report.string()});
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::json::parse(slurp(report));
  CHECK(j["theorem"] == "Thm1_shift_d");
  CHECK(j["shift"] == 2);
  CHECK(j["verdict"] == "pass");
  CHECK(j["rows"].size() == 4);
  CHECK(j["replays"].size() == 3);
  CHECK(j["kernel"]["pass"] == true);
  CHECK(j["caveat"].get<std::string>() == kDiscreteCaveat);
  CHECK(r.out.find(kDiscreteCaveat) != std::string::npos);
}

TEST_CASE("unwritable output") {
  try {
    write_file("/nonexistent/dir/out.csv", "x");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoFailure);
  }
  CHECK(run_cli({"inequality", "--domain", (kData / "square.dom").string(), "--kmax", "2", "--refine", "4",
                 "--no-replay", "--csv", "/nonexistent/dir/out.csv"})
            .code == kExitInputError);
}
