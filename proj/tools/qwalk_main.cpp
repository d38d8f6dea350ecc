// qwalk: simulate a coined walk on the line with a phase defect at the origin,
// tabulate the defect's bound-state spectrum and overlaps, run the
// verification oracle, and average decohered walks.
//
// Exit codes: 0 success, 1 oracle verification failure, 2 usage or I/O error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qwalk/bound_states.hpp"
#include "qwalk/decoherence.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/manifest.hpp"
#include "qwalk/oracle.hpp"
#include "qwalk/version.hpp"
#include "qwalk/walk.hpp"

namespace {

namespace fs = std::filesystem;
using qwalk::complexd;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double parse_number(const std::string& tok) {
  const auto slash = tok.find('/');
  if (slash != std::string::npos) {
    const std::string num = tok.substr(0, slash);
    const std::string den = tok.substr(slash + 1);
    std::size_t used = 0;
    const double n = std::stod(num, &used);
    if (used != num.size()) throw UsageError("bad numerator in '" + tok + "'");
    const double d = std::stod(den, &used);
    if (used != den.size()) throw UsageError("bad denominator in '" + tok + "'");
    if (d == 0.0) throw UsageError("zero denominator in '" + tok + "'");
    return n / d;
  }
  std::size_t used = 0;
  const double v = std::stod(tok, &used);
  if (used != tok.size()) throw UsageError("bad number '" + tok + "'");
  return v;
}

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// One complex literal: "0.6", "0.8i", "-i", "1/2i", "0.6+0.8i", "1e-3i".
complexd parse_complex(const std::string& raw) {
  const std::string tok = trimmed(raw);
  if (tok.empty()) throw UsageError("empty coin component");
  if (tok == "i" || tok == "+i") return {0.0, 1.0};
  if (tok == "-i") return {0.0, -1.0};
  if (tok.back() != 'i' && tok.back() != 'I') return {parse_number(tok), 0.0};

  const std::string body = tok.substr(0, tok.size() - 1);
  // Split at the last sign that separates real from imaginary (not a leading
  // sign, not an exponent sign).
  std::size_t split = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    const char c = body[k];
    if (c != '+' && c != '-') continue;
    const char prev = body[k - 1];
    if (prev == 'e' || prev == 'E') continue;
    split = k;
    break;
  }
  if (split == std::string::npos) {
    if (body.empty() || body == "+") return {0.0, 1.0};
    if (body == "-") return {0.0, -1.0};
    return {0.0, parse_number(body)};
  }
  const double re = parse_number(body.substr(0, split));
  std::string im = body.substr(split);
  if (im == "+") return {re, 1.0};
  if (im == "-") return {re, -1.0};
  return {re, parse_number(im)};
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    if (comma == std::string::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, comma - start));
    start = comma + 1;
  }
}

// "a,b" with complex literals, or "re0,im0,re1,im1" with plain reals.
// The parsed vector is normalized; approximately normalized input (e.g.
// truncated decimals like 0.7071) is accepted and scaled exactly.
std::pair<complexd, complexd> parse_coin(const std::string& s) {
  const auto parts = split_commas(s);
  complexd a;
  complexd b;
  if (parts.size() == 2) {
    a = parse_complex(parts[0]);
    b = parse_complex(parts[1]);
  } else if (parts.size() == 4) {
    a = complexd{parse_number(trimmed(parts[0])), parse_number(trimmed(parts[1]))};
    b = complexd{parse_number(trimmed(parts[2])), parse_number(trimmed(parts[3]))};
  } else {
    throw UsageError("coin must be 'a,b' (complex literals) or 're0,im0,re1,im1'");
  }
  const double n2 = std::norm(a) + std::norm(b);
  if (!(n2 > 1e-24)) throw UsageError("coin vector must be nonzero");
  const double scale = 1.0 / std::sqrt(n2);
  return {a * scale, b * scale};
}

double parse_phi(const std::string& s) { return parse_number(trimmed(s)); }

qwalk::PhaseDefect defect_from(const std::optional<std::string>& phi_str) {
  if (!phi_str) return qwalk::PhaseDefect::none();
  return qwalk::PhaseDefect::with_phi(parse_phi(*phi_str));
}

fs::path resolve_out(const std::string& out_flag, const char* default_name) {
  if (!out_flag.empty()) return fs::path{out_flag};
  const char* dir = std::getenv("QWALK_OUT_DIR");
  return (dir && *dir) ? fs::path{dir} / default_name : fs::path{default_name};
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);  // best effort
  }
  std::ofstream os(path);
  if (!os) throw UsageError("cannot open '" + path.string() + "' for writing");
  return os;
}

void finish(std::ofstream& os, const fs::path& path, std::size_t rows) {
  os.flush();
  if (!os) throw UsageError("write to '" + path.string() + "' failed");
  std::cout << "wrote " << path.string() << " (" << rows << " rows)\n";
}

struct GridOptions {
  double phi_min = 0.005;
  double phi_max = 0.995;
  int points = 199;

  void validate() const {
    if (!(phi_min > 0.0 && phi_max < 1.0 && phi_min <= phi_max)) {
      throw UsageError("need 0 < phi-min <= phi-max < 1");
    }
    if (points < 1) throw UsageError("points must be >= 1");
  }
  double at(int i) const {
    if (points == 1) return phi_min;
    return phi_min + (phi_max - phi_min) * i / (points - 1);
  }
};

int cmd_evolve(const std::optional<std::string>& phi_str, int steps,
               const std::string& coin_str, const std::string& out_flag) {
  const auto [a, b] = parse_coin(coin_str);
  const qwalk::PhaseDefect defect = defect_from(phi_str);
  const qwalk::WalkState st =
      qwalk::evolve(qwalk::initial_state(a, b), defect, steps);
  const auto dist = qwalk::position_distribution(st);

  const fs::path path = resolve_out(out_flag, "evolve.csv");
  auto os = open_out(path);
  const auto manifest = qwalk::make_manifest(
      "evolve", {{"phi", phi_str ? *phi_str : "none"},
                 {"steps", std::to_string(steps)},
                 {"coin", coin_str}});
  qwalk::write_manifest_header(os, manifest);
  os << "position,probability\n";
  for (const auto& [n, p] : dist) {
    os << n << "," << qwalk::format_double(p) << "\n";
  }
  finish(os, path, dist.size());
  return 0;
}

int cmd_spectrum(const GridOptions& grid, const std::string& out_flag) {
  grid.validate();
  const fs::path path = resolve_out(out_flag, "spectrum.csv");
  auto os = open_out(path);
  const auto manifest = qwalk::make_manifest(
      "spectrum", {{"phi_min", qwalk::format_double(grid.phi_min)},
                   {"phi_max", qwalk::format_double(grid.phi_max)},
                   {"points", std::to_string(grid.points)}});
  qwalk::write_manifest_header(os, manifest);
  os << "phi,abs_x_plus,abs_x_minus,exists_plus,exists_minus,"
        "lambda_plus_re,lambda_plus_im,lambda_minus_re,lambda_minus_im\n";
  using qwalk::Branch;
  for (int i = 0; i < grid.points; ++i) {
    const double phi = grid.at(i);
    const double xp = qwalk::x_pm(Branch::plus, phi);
    const double xm = qwalk::x_pm(Branch::minus, phi);
    const complexd lp = qwalk::lambda_pm(Branch::plus, phi);
    const complexd lm = qwalk::lambda_pm(Branch::minus, phi);
    os << qwalk::format_double(phi) << "," << qwalk::format_double(std::abs(xp))
       << "," << qwalk::format_double(std::abs(xm)) << ","
       << (qwalk::exists(Branch::plus, phi) ? 1 : 0) << ","
       << (qwalk::exists(Branch::minus, phi) ? 1 : 0) << ","
       << qwalk::format_double(lp.real()) << "," << qwalk::format_double(lp.imag())
       << "," << qwalk::format_double(lm.real()) << ","
       << qwalk::format_double(lm.imag()) << "\n";
  }
  finish(os, path, static_cast<std::size_t>(grid.points));
  return 0;
}

int cmd_overlap(const GridOptions& grid, const std::string& coin_str,
                const std::string& out_flag) {
  grid.validate();
  const auto [a, b] = parse_coin(coin_str);
  const fs::path path = resolve_out(out_flag, "overlap.csv");
  auto os = open_out(path);
  const auto manifest = qwalk::make_manifest(
      "overlap", {{"phi_min", qwalk::format_double(grid.phi_min)},
                  {"phi_max", qwalk::format_double(grid.phi_max)},
                  {"points", std::to_string(grid.points)},
                  {"coin", coin_str}});
  qwalk::write_manifest_header(os, manifest);
  os << "phi,F_plus,F_minus,F_total\n";
  for (int i = 0; i < grid.points; ++i) {
    const double phi = grid.at(i);
    const auto ov = qwalk::total_overlap(phi, a, b);
    os << qwalk::format_double(phi) << "," << qwalk::format_double(ov.f_plus)
       << "," << qwalk::format_double(ov.f_minus) << ","
       << qwalk::format_double(ov.total) << "\n";
  }
  finish(os, path, static_cast<std::size_t>(grid.points));
  return 0;
}

int cmd_oracle(double perturb, const std::string& target,
               const std::string& out_flag) {
  qwalk::oracle::SuiteOptions opt;
  opt.perturb = perturb;
  opt.perturb_target = target;
  const auto report = qwalk::oracle::run_full_suite(opt);

  for (const auto& c : report.checks) {
    std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << " (worst "
              << qwalk::format_double(c.worst) << ", tol "
              << qwalk::format_double(c.tolerance) << ")\n";
  }
  for (const auto& p : report.pairings) {
    std::cout << (p.consistent ? "[PASS] " : "[FAIL] ") << "sign-pairing probe phi="
              << qwalk::format_double(p.probe_phi) << ": localizing coin (1,"
              << (p.dynamics_sign > 0 ? "+i" : "-i") << ")/sqrt(2)\n";
  }

  const fs::path path = resolve_out(out_flag, "oracle_report.json");
  auto os = open_out(path);
  os << qwalk::oracle::report_to_json(report) << "\n";
  finish(os, path, report.checks.size());
  std::cout << "oracle suite " << (report.passed ? "PASSED" : "FAILED") << "\n";
  return report.passed ? 0 : 1;
}

int cmd_decohere(const std::optional<std::string>& phi_str, double p_measure,
                 int steps, int trajectories, std::uint64_t seed,
                 const std::string& coin_str, const std::string& out_flag) {
  const auto [a, b] = parse_coin(coin_str);
  const qwalk::PhaseDefect defect = defect_from(phi_str);
  const auto dist = qwalk::evolve_decohered(
      a, b, defect, qwalk::DecoherenceConfig{p_measure}, steps, trajectories, seed);

  const fs::path path = resolve_out(out_flag, "decohere.csv");
  auto os = open_out(path);
  const auto manifest = qwalk::make_manifest(
      "decohere", {{"phi", phi_str ? *phi_str : "none"},
                   {"p_measure", qwalk::format_double(p_measure)},
                   {"steps", std::to_string(steps)},
                   {"trajectories", std::to_string(trajectories)},
                   {"coin", coin_str}},
      seed);
  qwalk::write_manifest_header(os, manifest);
  os << "position,mean_probability,std_error\n";
  for (const auto& site : dist.sites) {
    os << site.position << "," << qwalk::format_double(site.mean_probability)
       << "," << qwalk::format_double(site.std_error) << "\n";
  }
  finish(os, path, dist.sites.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "coined quantum walk on the line with a single phase defect at the "
      "origin: simulation, bound-state analytics, verification oracle, and "
      "decoherence averaging"};
  app.set_version_flag("--version", std::string{qwalk::kVersion});
  app.require_subcommand(1);

  std::optional<std::string> phi_str;
  std::string coin_str = "1,0";
  std::string out_flag;
  int steps = 0;
  GridOptions grid;
  double perturb = 0.0;
  std::string target = "all";
  double p_measure = 0.0;
  int trajectories = 1000;
  std::uint64_t seed = 12345;

  auto* ev = app.add_subcommand("evolve", "evolve a walker and write position,probability");
  ev->add_option("--phi", phi_str,
                 "defect phase in (0,1), decimal or rational like 1/6; omit for "
                 "a defect-free lattice");
  ev->add_option("--steps", steps, "number of steps")->required();
  ev->add_option("--coin", coin_str,
                 "initial coin state, 'a,b' complex literals (e.g. "
                 "'0.7071,-0.7071i') or 're0,im0,re1,im1'; normalized on parse");
  ev->add_option("--out", out_flag, "output CSV path (default $QWALK_OUT_DIR/evolve.csv)");

  auto* sp = app.add_subcommand("spectrum",
                                "tabulate decay ratios, existence flags, and "
                                "eigenvalues over a phi grid");
  sp->add_option("--phi-min", grid.phi_min, "grid start, in (0,1)");
  sp->add_option("--phi-max", grid.phi_max, "grid end, in (0,1)");
  sp->add_option("--points", grid.points, "grid size; 1 emits a single row at phi-min");
  sp->add_option("--out", out_flag, "output CSV path (default $QWALK_OUT_DIR/spectrum.csv)");

  auto* ov = app.add_subcommand("overlap",
                                "tabulate bound-state overlaps F for one coin "
                                "state over a phi grid");
  ov->add_option("--phi-min", grid.phi_min, "grid start, in (0,1)");
  ov->add_option("--phi-max", grid.phi_max, "grid end, in (0,1)");
  ov->add_option("--points", grid.points, "grid size; 1 emits a single row at phi-min");
  ov->add_option("--coin", coin_str, "initial coin state (see evolve)");
  ov->add_option("--out", out_flag, "output CSV path (default $QWALK_OUT_DIR/overlap.csv)");

  auto* orc = app.add_subcommand("oracle",
                                 "run the verification suite and write a JSON "
                                 "report; exits 1 if any check fails");
  orc->add_option("--perturb", perturb,
                  "inject a relative fault of this size into the closed forms; "
                  "a nonzero value must turn the suite red");
  orc->add_option("--target", target,
                  "which form to perturb: all, lambda, x, c_norm, beta0_phase, "
                  "alpha_neg_coeff, beta_pos_coeff");
  orc->add_option("--out", out_flag,
                  "report path (default $QWALK_OUT_DIR/oracle_report.json)");

  auto* de = app.add_subcommand("decohere",
                                "average trajectories with per-step projective "
                                "coin measurement");
  de->add_option("--phi", phi_str, "defect phase (see evolve); omit for none");
  de->add_option("--p", p_measure, "per-step measurement probability in [0,1]")
      ->required();
  de->add_option("--steps", steps, "number of steps (max 200)")->required();
  de->add_option("--trajectories", trajectories, "Monte Carlo sample count");
  de->add_option("--seed", seed, "base RNG seed; results are reproducible per seed");
  de->add_option("--coin", coin_str, "initial coin state (see evolve)");
  de->add_option("--out", out_flag, "output CSV path (default $QWALK_OUT_DIR/decohere.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help/error text
    return code == 0 ? 0 : 2;     // any parse failure is a usage error
  }

  try {
    if (ev->parsed()) return cmd_evolve(phi_str, steps, coin_str, out_flag);
    if (sp->parsed()) return cmd_spectrum(grid, out_flag);
    if (ov->parsed()) return cmd_overlap(grid, coin_str, out_flag);
    if (orc->parsed()) return cmd_oracle(perturb, target, out_flag);
    if (de->parsed()) {
      return cmd_decohere(phi_str, p_measure, steps, trajectories, seed, coin_str,
                          out_flag);
    }
  } catch (const qwalk::ToleranceError& e) {
    // A consistency tripwire firing is a verification failure, not bad usage.
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
