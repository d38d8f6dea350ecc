#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

// QWALK_CLI_PATH is injected by the build as the path to the qwalk binary.

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

fs::path case_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "qwalk_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args, const fs::path& dir,
              const std::string& env_prefix = "") {
  const fs::path out_file = dir / "stdout.txt";
  const fs::path err_file = dir / "stderr.txt";
  const std::string cmd = env_prefix + "\"" QWALK_CLI_PATH "\" " + args + " > \"" +
                          out_file.string() + "\" 2> \"" + err_file.string() +
                          "\"";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) out.push_back(line);
  return out;
}

std::vector<std::string> data_lines(const fs::path& p) {
  std::vector<std::string> out;
  for (const auto& line : lines_of(slurp(p))) {
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

std::vector<std::string> header_lines(const fs::path& p) {
  std::vector<std::string> out;
  for (const auto& line : lines_of(slurp(p))) {
    if (!line.empty() && line[0] == '#') out.push_back(line);
  }
  return out;
}

std::vector<std::string> fields_of(const std::string& csv_line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = csv_line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(csv_line.substr(start));
      return out;
    }
    out.push_back(csv_line.substr(start, comma - start));
    start = comma + 1;
  }
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

bool any_line_starts_with(const std::vector<std::string>& lines,
                          const std::string& prefix) {
  for (const auto& l : lines) {
    if (l.rfind(prefix, 0) == 0) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("evolve writes a provenance header and the exact two-step profile") {
  const fs::path dir = case_dir("evolve_basic");
  const fs::path csv = dir / "e.csv";
  const RunResult r =
      run("evolve --phi 1/6 --steps 2 --out \"" + csv.string() + "\"", dir);
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "wrote"));
  CHECK(contains(r.out, "(3 rows)"));

  const auto header = header_lines(csv);
  CHECK(any_line_starts_with(header, "# command: evolve"));
  CHECK(any_line_starts_with(header, "# phi: 1/6"));
  CHECK(any_line_starts_with(header, "# version: "));
  CHECK(any_line_starts_with(header, "# timestamp: "));

  const auto data = data_lines(csv);
  REQUIRE(data.size() == 4);  // column header + 3 sites
  CHECK(data[0] == "position,probability");
  CHECK(fields_of(data[1])[0] == "-2");
  CHECK(std::stod(fields_of(data[1])[1]) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(fields_of(data[2])[0] == "0");
  CHECK(std::stod(fields_of(data[2])[1]) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(fields_of(data[3])[0] == "2");
  CHECK(std::stod(fields_of(data[3])[1]) == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("rational and decimal phi spellings produce identical data") {
  const fs::path dir = case_dir("evolve_rational");
  const fs::path a = dir / "a.csv";
  const fs::path b = dir / "b.csv";
  CHECK(run("evolve --phi 1/4 --steps 9 --coin 1,-i --out \"" + a.string() + "\"",
            dir)
            .exit_code == 0);
  CHECK(run("evolve --phi 0.25 --steps 9 --coin 1,-i --out \"" + b.string() + "\"",
            dir)
            .exit_code == 0);
  CHECK(data_lines(a) == data_lines(b));

  // Probabilities sum to 1.
  double sum = 0.0;
  const auto rows = data_lines(a);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    sum += std::stod(fields_of(rows[i])[1]);
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spectrum emits one full row per grid point") {
  const fs::path dir = case_dir("spectrum_row");
  const fs::path csv = dir / "s.csv";
  const RunResult r = run(
      "spectrum --phi-min 0.5 --points 1 --out \"" + csv.string() + "\"", dir);
  CHECK(r.exit_code == 0);
  const auto data = data_lines(csv);
  REQUIRE(data.size() == 2);
  CHECK(data[0] ==
        "phi,abs_x_plus,abs_x_minus,exists_plus,exists_minus,"
        "lambda_plus_re,lambda_plus_im,lambda_minus_re,lambda_minus_im");
  const auto f = fields_of(data[1]);
  REQUIRE(f.size() == 9);
  CHECK(std::stod(f[0]) == doctest::Approx(0.5));
  CHECK(std::stod(f[1]) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(std::stod(f[2]) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(f[3] == "1");
  CHECK(f[4] == "1");
  CHECK(std::stod(f[5]) == doctest::Approx(-0.8).epsilon(1e-12));
  CHECK(std::stod(f[6]) == doctest::Approx(-0.6).epsilon(1e-12));
  CHECK(std::stod(f[7]) == doctest::Approx(-0.8).epsilon(1e-12));
  CHECK(std::stod(f[8]) == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("overlap accepts approximately normalized coins and is additive") {
  const fs::path dir = case_dir("overlap_grid");
  const fs::path csv = dir / "o.csv";
  const RunResult r =
      run("overlap --phi-min 0.3 --phi-max 0.6 --points 4 --coin "
          "0.7071,0.7071i --out \"" +
              csv.string() + "\"",
          dir);
  CHECK(r.exit_code == 0);
  const auto data = data_lines(csv);
  REQUIRE(data.size() == 5);
  CHECK(data[0] == "phi,F_plus,F_minus,F_total");
  for (std::size_t i = 1; i < data.size(); ++i) {
    const auto f = fields_of(data[i]);
    REQUIRE(f.size() == 4);
    const double fp = std::stod(f[1]);
    const double fm = std::stod(f[2]);
    const double ft = std::stod(f[3]);
    CHECK(fp >= 0.0);
    CHECK(fm >= 0.0);
    CHECK(ft <= 1.0 + 1e-12);
    CHECK(ft == doctest::Approx(fp + fm).epsilon(1e-12));
  }
}

TEST_CASE("decohere is reproducible per seed and its p=0 limit matches evolve") {
  const fs::path dir = case_dir("decohere_seeded");
  const fs::path a = dir / "a.csv";
  const fs::path b = dir / "b.csv";
  const std::string common =
      "decohere --phi 0.6 --p 0.4 --steps 15 --trajectories 800 --seed 99 ";
  CHECK(run(common + "--out \"" + a.string() + "\"", dir).exit_code == 0);
  CHECK(run(common + "--out \"" + b.string() + "\"", dir).exit_code == 0);
  // Headers differ (timestamp); the data must be byte-identical.
  CHECK(data_lines(a) == data_lines(b));
  const auto header = header_lines(a);
  CHECK(any_line_starts_with(header, "# seed: 99"));
  CHECK(any_line_starts_with(header, "# p_measure: "));

  const fs::path ev = dir / "ev.csv";
  const fs::path de = dir / "de.csv";
  CHECK(run("evolve --phi 0.5 --steps 12 --out \"" + ev.string() + "\"", dir)
            .exit_code == 0);
  CHECK(run("decohere --phi 0.5 --p 0 --steps 12 --out \"" + de.string() + "\"",
            dir)
            .exit_code == 0);
  const auto ev_rows = data_lines(ev);
  const auto de_rows = data_lines(de);
  REQUIRE(ev_rows.size() == de_rows.size());
  CHECK(de_rows[0] == "position,mean_probability,std_error");
  for (std::size_t i = 1; i < ev_rows.size(); ++i) {
    const auto evf = fields_of(ev_rows[i]);
    const auto def = fields_of(de_rows[i]);
    REQUIRE(def.size() == 3);
    CHECK(def[0] == evf[0]);
    CHECK(def[1] == evf[1]);  // same doubles, same formatter, same text
    CHECK(std::stod(def[2]) == 0.0);
  }
}

TEST_CASE("oracle subcommand reports green on the honest suite") {
  const fs::path dir = case_dir("oracle_green");
  const fs::path json_path = dir / "report.json";
  const RunResult r = run("oracle --out \"" + json_path.string() + "\"", dir);
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "oracle suite PASSED"));
  CHECK(contains(r.out, "[PASS]"));
  CHECK_FALSE(contains(r.out, "[FAIL]"));

  const nlohmann::json rep = nlohmann::json::parse(slurp(json_path));
  CHECK(rep.at("passed").get<bool>());
  CHECK(rep.at("perturb").get<double>() == 0.0);
  CHECK(rep.at("checks").size() >= 14);
  CHECK(rep.at("sign_pairings").size() == 2);
}

TEST_CASE("oracle subcommand goes red under an injected fault") {
  const fs::path dir = case_dir("oracle_red");
  const fs::path json_path = dir / "report.json";
  const RunResult r = run(
      "oracle --perturb 0.01 --target lambda --out \"" + json_path.string() + "\"",
      dir);
  CHECK(r.exit_code == 1);
  CHECK(contains(r.out, "oracle suite FAILED"));
  CHECK(contains(r.out, "[FAIL]"));
  const nlohmann::json rep = nlohmann::json::parse(slurp(json_path));
  CHECK_FALSE(rep.at("passed").get<bool>());
  CHECK(rep.at("perturb").get<double>() == 0.01);
}

TEST_CASE("usage errors exit with code 2") {
  const fs::path dir = case_dir("usage_errors");
  CHECK(run("evolve --phi 1.5 --steps 4", dir).exit_code == 2);   // phi domain
  CHECK(run("evolve --phi 0.5", dir).exit_code == 2);             // missing steps
  CHECK(run("bogus", dir).exit_code == 2);                        // no such command
  CHECK(run("", dir).exit_code == 2);                             // subcommand required
  CHECK(run("evolve --steps 3 --coin 0,0", dir).exit_code == 2);  // zero coin
  CHECK(run("evolve --steps 3 --coin 1,2,3", dir).exit_code == 2);
  CHECK(run("decohere --p 0.5 --steps 300", dir).exit_code == 2);  // step cap
  const RunResult bad_phi = run("evolve --phi 1.5 --steps 4", dir);
  CHECK(contains(bad_phi.err, "error:"));
}

TEST_CASE("help and version exit cleanly") {
  const fs::path dir = case_dir("help_version");
  const RunResult help = run("--help", dir);
  CHECK(help.exit_code == 0);
  CHECK(contains(help.out, "evolve"));
  CHECK(contains(help.out, "decohere"));
  const RunResult ver = run("--version", dir);
  CHECK(ver.exit_code == 0);
  CHECK(contains(ver.out, "0.1.0"));
}

TEST_CASE("QWALK_OUT_DIR supplies the default output directory") {
  const fs::path dir = case_dir("out_dir_env");
  const fs::path outdir = dir / "results";
  const RunResult r =
      run("spectrum --points 1", dir,
          "QWALK_OUT_DIR=\"" + outdir.string() + "\" ");
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(outdir / "spectrum.csv"));
  CHECK(data_lines(outdir / "spectrum.csv").size() == 2);
}
