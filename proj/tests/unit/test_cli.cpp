#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "dpbc/cli/app.hpp"
#include "dpbc/error.hpp"
#include "dpbc/model_io.hpp"

namespace fs = std::filesystem;
using dpbc::cli::parse_alpha_list;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "dpbc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = dpbc::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) {
    if (!l.empty() && l[0] != '#') lines.push_back(l);
  }
  return lines;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "dpbc_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("alpha lists") {
  const auto r = parse_alpha_list("0.99:1.01:0.002");
  REQUIRE(r.size() == 11);
  CHECK(r[5] == 1.0);
  CHECK(r.back() == doctest::Approx(1.01));
  CHECK(parse_alpha_list("0.9,1,1.1") == std::vector<double>{0.9, 1.0, 1.1});
  CHECK(parse_alpha_list("1.06") == std::vector<double>{1.06});
  CHECK_THROWS_AS(parse_alpha_list(""), dpbc::ConfigError);
  CHECK_THROWS_AS(parse_alpha_list("1:0.9:0.1"), dpbc::ConfigError);
  CHECK_THROWS_AS(parse_alpha_list("1:2:0"), dpbc::ConfigError);
  CHECK_THROWS_AS(parse_alpha_list("a,b"), dpbc::ConfigError);
}

TEST_CASE("every output starts with the resolved configuration") {
  const Outcome o = run_cli({"mc", "example1", "-N", "500", "--format", "csv"});
  CHECK(o.code == dpbc::cli::kExitPass);
  CHECK(o.out.rfind("# dpbc mc\n", 0) == 0);
  CHECK(o.out.find("# samples = 500") != std::string::npos);
  CHECK(o.out.find("# seed = 7") != std::string::npos);
}

TEST_CASE("configuration errors exit with 2") {
  CHECK(run_cli({"mc", "example1", "-N", "0"}).code == dpbc::cli::kExitConfigError);
  CHECK(run_cli({"mc", "example1", "--bogus"}).code == dpbc::cli::kExitConfigError);
  CHECK(run_cli({"dp", "/nonexistent/model.json"}).code == dpbc::cli::kExitConfigError);
  CHECK(run_cli({"synthesize", "example1", "--kind", "zzz"}).code == dpbc::cli::kExitConfigError);
  CHECK(run_cli({"tables", "V"}).code == dpbc::cli::kExitConfigError);
  CHECK(run_cli({}).code == dpbc::cli::kExitConfigError);
  CHECK(run_cli({"--help"}).code == dpbc::cli::kExitPass);

  // A reach-avoid certificate against a model without a target set.
  const fs::path cert = scratch("rabc_zero.json");
  const dpbc::SystemModel m = dpbc::example1_model();
  dpbc::save_certificate(
      dpbc::BarrierCertificate::make(dpbc::CertificateKind::RABC, dpbc::Polynomial(m.space), 1.0, 0.0, 0.0),
      cert.string());
  const Outcome o = run_cli({"check", "example2", cert.string()});
  CHECK(o.code == dpbc::cli::kExitConfigError);
  CHECK(o.err.find("G") != std::string::npos);
}

TEST_CASE("check exits with 1 on a violated certificate and 0 on a valid one") {
  const dpbc::SystemModel m = dpbc::example1_model();
  const fs::path zero = scratch("dsbc_zero.json");
  dpbc::save_certificate(
      dpbc::BarrierCertificate::make(dpbc::CertificateKind::DSBC, dpbc::Polynomial(m.space), 1.0, 0.0, 0.0),
      zero.string());
  const Outcome bad = run_cli({"check", "example1", zero.string()});
  CHECK(bad.code == dpbc::cli::kExitCheckFailed);
  CHECK(bad.out.find("VIOLATED") != std::string::npos);

  const fs::path good = scratch("dsbc_good.json");
  const Outcome syn = run_cli({"synthesize", "example1", "--kind", "dsbc", "--deg", "6", "--alphas", "1", "-o",
                               good.string()});
  REQUIRE(syn.code == dpbc::cli::kExitPass);
  CHECK(run_cli({"check", "example1", good.string(), "--envelope", "--nodes", "401"}).code == dpbc::cli::kExitPass);
}

TEST_CASE("synthesize: not-applicable sweeps and config files") {
  const Outcome na = run_cli({"synthesize", "example1", "--kind", "msbc", "--alphas", "0.99", "-o",
                              scratch("na.json").string()});
  CHECK(na.code == dpbc::cli::kExitPass);
  CHECK(na.out.find("\\") != std::string::npos);

  const fs::path cfg = scratch("synth.toml");
  std::ofstream(cfg) << "[synthesize]\ndeg = 4\nalphas = \"0.96\"\n";
  const Outcome o = run_cli({"synthesize", "example2", "--kind", "dsbc", "--config", cfg.string(), "--format", "csv",
                             "-o", scratch("cfg.json").string()});
  REQUIRE(o.code == dpbc::cli::kExitPass);
  CHECK(o.out.find("# deg = 4") != std::string::npos);
  const auto rows = data_lines(o.out);
  REQUIRE(rows.size() == 2);
  const auto cells = split(rows[1], ',');
  CHECK(cells[0] == "0.96");
  CHECK(std::stod(cells[3]) == doctest::Approx(0.19).epsilon(0.02).scale(1.0));
  // Flags win over the file.
  const Outcome f = run_cli({"synthesize", "example2", "--kind", "dsbc", "--config", cfg.string(), "--deg", "2",
                             "-o", scratch("cfg2.json").string()});
  CHECK(f.out.find("# deg = 2") != std::string::npos);
}

TEST_CASE("identical seeds give identical output bytes") {
  const std::vector<std::string> args = {"mc", "example2", "-N", "20000", "--seed", "11", "--format", "csv"};
  CHECK(run_cli(args).out == run_cli(args).out);
  const std::vector<std::string> other = {"mc", "example2", "-N", "20000", "--seed", "12", "--format", "csv"};
  CHECK(run_cli(args).out != run_cli(other).out);
}

TEST_CASE("tables write CSVs of the published shape") {
  const fs::path dir = scratch("tables");
  fs::remove_all(dir);
  const Outcome o = run_cli({"tables", "II", "--out-dir", dir.string()});
  REQUIRE(o.code == dpbc::cli::kExitPass);
  for (const char* name : {"table_II.csv", "table_II_reference.csv", "table_II_deviation.csv"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(dir / name));
    const auto lines = data_lines(slurp(dir / name));
    REQUIRE(lines.size() == 4);  // header + DBC, MBC, SBC
    for (const auto& l : lines) CHECK(split(l, ',').size() == 12);
  }
  const auto values = data_lines(slurp(dir / "table_II.csv"));
  CHECK(split(values[2], ',')[1] == "\\");  // MBC at alpha = 0.9
}

TEST_CASE("cross-command soundness: synthesized bound >= dp value") {
  const Outcome dp = run_cli({"dp", "example2", "--format", "csv", "--no-convergence", "--nodes", "1001"});
  REQUIRE(dp.code == dpbc::cli::kExitPass);
  double worst = 0.0;
  const auto dl = data_lines(dp.out);
  for (std::size_t i = 1; i < dl.size(); ++i) worst = std::max(worst, std::stod(split(dl[i], ',')[1]));
  const Outcome syn = run_cli({"synthesize", "example2", "--kind", "dsbc", "--deg", "4", "--alphas", "0.9:1.1:0.05",
                               "--format", "csv", "-o", scratch("sweep.json").string()});
  REQUIRE(syn.code == dpbc::cli::kExitPass);
  const auto sl = data_lines(syn.out);
  REQUIRE(sl.size() == 6);
  for (std::size_t i = 1; i < sl.size(); ++i) {
    const auto cells = split(sl[i], ',');
    REQUIRE(cells[2] == "1");
    CHECK(std::stod(cells[3]) >= worst - 1e-3);
  }
}

TEST_CASE("the installed tool binary runs") {
  const std::string cmd = std::string(DPBC_TOOL_PATH) + " mc example1 -N 100 > /dev/null 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
}
