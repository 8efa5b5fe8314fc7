#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lmv/ed_degree.hpp"
#include "lmv/enumerative.hpp"
#include "lmv/reference_rigs.hpp"
#include "lmv/rng.hpp"
#include "lmv/triangulation.hpp"
#include "scene.hpp"

namespace {

using nlohmann::json;
using namespace lmv;

constexpr const char* kVersion = "lmv 0.1.0";
constexpr double kExpectedRealReference = 1.7262312489219035;

constexpr int kExitOk = 0;
constexpr int kExitAssertFailed = 1;
constexpr int kExitParseError = 2;
constexpr int kExitInvariantViolation = 3;

std::map<std::string, double> parse_assertions(const std::string& spec) {
  std::map<std::string, double> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("assertion must look like key=value: " + item);
    out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
  }
  return out;
}

struct Output {
  std::ofstream file;
  bool to_file = false;

  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw std::runtime_error("cannot open output file: " + path);
      to_file = true;
    }
  }
  std::ostream& stream() { return to_file ? file : std::cout; }
};

json header_json(std::uint64_t seed, double rank_tol) {
  return json{{"version", kVersion}, {"seed", seed}, {"rank_tol", rank_tol}};
}

CameraRig builtin_rig(const std::string& name, int m) {
  if (name == "collinear") return collinear_quad_rig();
  if (name == "sensitivity")
    return m == 2 ? fixed_pair_rig() : fixed_triplet_rig();
  throw std::runtime_error("unknown built-in rig: " + name +
                           " (expected 'sensitivity' or 'collinear')");
}

CameraRig gaussian_rig(int m, std::uint64_t seed) {
  Rng rng(splitmix64(seed ^ 0x0ddba11));
  std::vector<Camera> cams;
  cams.reserve(m);
  for (int i = 0; i < m; ++i)
    cams.emplace_back(Matrix34d(rng.gaussian_matrix(3, 4)));
  return CameraRig(std::move(cams));
}

json line_to_json(const PlueckerLine& line) {
  json out;
  if (line.is_real(1e-9)) {
    const Vector6cd& p = line.pluecker();
    int imax = 0;
    p.cwiseAbs().maxCoeff(&imax);
    const Complex phase = std::conj(p[imax]) / std::abs(p[imax]);
    json arr = json::array();
    for (int k = 0; k < 6; ++k) arr.push_back((p[k] * phase).real());
    out["p"] = arr;
  } else {
    json re = json::array(), im = json::array();
    for (int k = 0; k < 6; ++k) {
      re.push_back(line.pluecker()[k].real());
      im.push_back(line.pluecker()[k].imag());
    }
    out["p_re"] = re;
    out["p_im"] = im;
  }
  return out;
}

// ---------------------------------------------------------------------------

int cmd_membership(const std::string& scene_path, const std::string& paper_rig,
                   int m, const std::string& out_path, double rank_tol,
                   std::uint64_t seed) {
  cli::Scene scene;
  if (!scene_path.empty()) scene = cli::load_scene(scene_path);
  if (!paper_rig.empty()) scene.rig = builtin_rig(paper_rig, m);
  if (!scene.rig) throw Error("no cameras: pass --scene or --paper-rig");
  if (scene.tuples.empty()) throw Error("scene has no 'tuples' to classify");

  Output out(out_path);
  out.stream() << json{{"header", header_json(seed, rank_tol)}}.dump() << "\n";
  MembershipConfig config;
  config.rank_tol = rank_tol;
  for (std::size_t i = 0; i < scene.tuples.size(); ++i) {
    const MembershipReport report =
        membership(*scene.rig, scene.tuples[i], config);
    json rec{{"tuple", i},
             {"rank", report.rank},
             {"gap_ratio", report.diagnostics.rank_gap_ratio},
             {"in_variety", report.in_variety},
             {"in_image", report.in_image},
             {"singular", report.singular},
             {"exceptional_ok", report.exceptional_ok}};
    if (report.witness_line)
      rec["witness"] = line_to_json(*report.witness_line);
    else
      rec["witness"] = nullptr;
    out.stream() << rec.dump() << "\n";
  }
  return kExitOk;
}

int cmd_triangulate(const std::string& scene_path, const std::string& paper_rig,
                    int m, const std::string& out_path, double rank_tol,
                    std::uint64_t seed) {
  cli::Scene scene;
  if (!scene_path.empty()) scene = cli::load_scene(scene_path);
  if (!paper_rig.empty()) scene.rig = builtin_rig(paper_rig, m);
  if (!scene.rig) throw Error("no cameras: pass --scene or --paper-rig");
  if (scene.tuples.empty()) throw Error("scene has no 'tuples' to triangulate");

  Output out(out_path);
  out.stream() << json{{"header", header_json(seed, rank_tol)}}.dump() << "\n";
  for (std::size_t i = 0; i < scene.tuples.size(); ++i) {
    const TriangulationResult result =
        triangulate_line(*scene.rig, scene.tuples[i]);
    json rec{{"tuple", i},
             {"objective", result.objective},
             {"converged", result.converged},
             {"iterations", result.iterations},
             {"restarts", result.restarts_used},
             {"line", line_to_json(result.line)}};
    out.stream() << rec.dump() << "\n";
  }
  return kExitOk;
}

int cmd_schubert(const std::string& scene_path, const std::string& out_path,
                 std::uint64_t seed, double rank_tol) {
  const cli::Scene scene = cli::load_scene(scene_path);
  if (scene.lines.size() < 4)
    throw Error("scene needs at least 4 entries in 'lines'");
  const TransversalSolution sol = transversals_of_four(
      scene.lines[0], scene.lines[1], scene.lines[2], scene.lines[3]);
  json rec{{"header", header_json(seed, rank_tol)},
           {"status", sol.status == TransversalStatus::kFinite     ? "finite"
                      : sol.status == TransversalStatus::kInfinite ? "infinite"
                                                                   : "degenerate"},
           {"real_count", sol.real_count},
           {"transversals", json::array()}};
  for (const auto& line : sol.lines) rec["transversals"].push_back(line_to_json(line));
  Output out(out_path);
  out.stream() << rec.dump(2) << "\n";
  return kExitOk;
}

int cmd_multidegree(const std::string& d_spec, int trials, int m,
                    std::uint64_t seed, const std::string& out_path,
                    const std::string& assert_spec) {
  std::vector<int> degrees;
  {
    std::stringstream ss(d_spec);
    std::string item;
    while (std::getline(ss, item, ',')) degrees.push_back(std::stoi(item));
  }
  const CameraRig rig = gaussian_rig(m, seed);
  const MultidegreeOutcome outcome =
      multidegree_check(rig, degrees, trials, seed);

  std::map<int, int> histogram;
  for (int c : outcome.counts) ++histogram[c];
  json hist;
  for (const auto& [count, times] : histogram)
    hist[std::to_string(count)] = times;

  json rec{{"header", header_json(seed, kRankTol)},
           {"d", degrees},
           {"m", m},
           {"trials", trials},
           {"counts", outcome.counts},
           {"histogram", hist},
           {"resamples", outcome.degenerate_resamples}};
  Output out(out_path);
  out.stream() << rec.dump(2) << "\n";

  if (!assert_spec.empty()) {
    const auto assertions = parse_assertions(assert_spec);
    if (auto it = assertions.find("exact"); it != assertions.end()) {
      const int expected = static_cast<int>(it->second);
      for (int c : outcome.counts)
        if (c != expected) return kExitAssertFailed;
    }
  }
  return kExitOk;
}

int cmd_real_count(std::uint64_t samples, std::uint64_t seed, int threads,
                   const std::string& out_path, const std::string& assert_spec) {
  const RealTransversalStats stats =
      expected_real_transversals(samples, seed, threads);
  json rec{{"header", header_json(seed, kRankTol)},
           {"samples", stats.samples},
           {"discarded", stats.discarded},
           {"mean", stats.mean},
           {"std_error", stats.std_error},
           {"reference", kExpectedRealReference}};
  Output out(out_path);
  out.stream() << rec.dump(2) << "\n";

  if (!assert_spec.empty()) {
    const auto assertions = parse_assertions(assert_spec);
    if (auto it = assertions.find("tol"); it != assertions.end())
      if (std::abs(stats.mean - kExpectedRealReference) > it->second)
        return kExitAssertFailed;
  }
  return kExitOk;
}

int cmd_sensitivity(const std::string& kind, int m, const std::string& rig_name,
                    int trials, double eps, std::uint64_t seed, int threads,
                    const std::string& out_path) {
  CameraRig rig = rig_name == "gaussian" ? gaussian_rig(m, seed)
                                         : builtin_rig("sensitivity", m);
  std::vector<SensitivityKind> kinds;
  if (kind == "lines" || kind == "both") kinds.push_back(SensitivityKind::kLines);
  if (kind == "points" || kind == "both")
    kinds.push_back(SensitivityKind::kPoints);
  if (kinds.empty())
    throw std::runtime_error("kind must be lines, points or both");

  Output out(out_path);
  out.stream() << "# " << kVersion << " seed=" << seed << " eps=" << eps
               << " trials=" << trials << " m=" << m << " rig=" << rig_name
               << "\n";
  out.stream() << "trial,kind,e_value,objective,converged,restarts\n";
  char buffer[256];
  for (SensitivityKind k : kinds) {
    const auto records =
        sensitivity_experiment(rig, k, trials, eps, seed, {}, threads);
    for (const auto& rec : records) {
      std::snprintf(buffer, sizeof(buffer), "%d,%s,%.17g,%.17g,%d,%d\n",
                    rec.trial,
                    rec.kind == SensitivityKind::kLines ? "lines" : "points",
                    rec.failed ? std::nan("") : rec.e_value, rec.objective,
                    rec.converged ? 1 : 0, rec.restarts);
      out.stream() << buffer;
    }
  }
  return kExitOk;
}

int cmd_ed_degree(int m, std::uint64_t seed, int threads, int runs,
                  const std::string& out_path, const std::string& assert_spec) {
  const CameraRig rig = gaussian_rig(m, seed);
  Rng data_rng(splitmix64(seed ^ 0xda7a));
  std::vector<Eigen::Vector3d> u(m);
  for (int i = 0; i < m; ++i) u[i] = data_rng.unit_sphere(3);  // equal norms

  json all = json::array();
  std::vector<int> valid_counts;
  for (int run = 0; run < runs; ++run) {
    EdConfig config;
    config.track.seed = sub_seed(seed, run + 1);
    config.track.threads = threads;
    const EDCount count = count_ed_critical(rig, u, config);
    valid_counts.push_back(count.valid_solutions);
    all.push_back(json{{"m", count.m},
                       {"paths", count.total_paths},
                       {"regular", count.regular_solutions},
                       {"valid", count.valid_solutions},
                       {"lower_bound", count.certified_lower_bound},
                       {"runtime_s", count.runtime_s},
                       {"seed", count.seed}});
  }
  json rec = runs == 1 ? all[0] : json{{"runs", all}};
  if (runs > 1) {
    bool stable = true;
    for (int c : valid_counts) stable &= (c == valid_counts[0]);
    rec["stable"] = stable;
  }
  Output out(out_path);
  out.stream() << rec.dump(2) << "\n";

  if (!assert_spec.empty()) {
    const auto assertions = parse_assertions(assert_spec);
    if (auto it = assertions.find("min"); it != assertions.end()) {
      for (const auto& entry : (runs == 1 ? json::array({rec}) : rec["runs"]))
        if (entry["lower_bound"].get<int>() < it->second)
          return kExitAssertFailed;
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kVersion) +
               " - line correspondences under pinhole cameras"};
  app.require_subcommand(1);

  std::string scene_path, out_path, paper_rig, assert_spec;
  std::uint64_t seed = 1;
  std::uint64_t samples = 100000;
  int trials = 100, m = 3, threads = 0, runs = 1;
  double eps = 1e-12, rank_tol = kRankTol;
  std::string d_spec = "2,2", kind = "both", rig_name = "paper";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "master random seed");
    cmd->add_option("--out", out_path, "output file (default stdout)");
    cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
    cmd->add_option("--rank-tol", rank_tol, "numerical rank tolerance");
    cmd->add_option("--assert", assert_spec,
                    "comma-separated key=value acceptance checks");
  };

  CLI::App* membership_cmd =
      app.add_subcommand("membership", "classify tuples against the variety");
  membership_cmd->add_option("--scene", scene_path, "scene JSON file");
  membership_cmd->add_option("--paper-rig", paper_rig,
                             "built-in rig: sensitivity or collinear");
  membership_cmd->add_option("--m", m, "camera count for built-in rigs");
  add_common(membership_cmd);

  CLI::App* triangulate_cmd =
      app.add_subcommand("triangulate", "reconstruct lines from tuples");
  triangulate_cmd->add_option("--scene", scene_path, "scene JSON file");
  triangulate_cmd->add_option("--paper-rig", paper_rig,
                              "built-in rig: sensitivity or collinear");
  triangulate_cmd->add_option("--m", m, "camera count for built-in rigs");
  add_common(triangulate_cmd);

  CLI::App* schubert_cmd = app.add_subcommand(
      "schubert", "common transversals of the first four scene lines");
  schubert_cmd->add_option("--scene", scene_path, "scene JSON file")->required();
  add_common(schubert_cmd);

  CLI::App* multidegree_cmd =
      app.add_subcommand("multidegree", "intersection counts with linear slices");
  multidegree_cmd->add_option("--d", d_spec, "degree vector, e.g. 2,1,1");
  multidegree_cmd->add_option("--trials", trials, "number of trials");
  multidegree_cmd->add_option("--m", m, "rig size (Gaussian rig from seed)");
  add_common(multidegree_cmd);

  CLI::App* real_count_cmd = app.add_subcommand(
      "real-count", "Monte-Carlo expected number of real transversals");
  real_count_cmd->add_option("--samples", samples, "Monte-Carlo samples");
  add_common(real_count_cmd);

  CLI::App* sensitivity_cmd =
      app.add_subcommand("sensitivity", "noise amplification experiments");
  sensitivity_cmd->add_option("--kind", kind, "lines, points or both");
  sensitivity_cmd->add_option("--m", m, "camera count (2 or 3)");
  sensitivity_cmd->add_option("--rig", rig_name, "paper or gaussian");
  sensitivity_cmd->add_option("--trials", trials, "trials per kind");
  sensitivity_cmd->add_option("--eps", eps, "noise radius");
  add_common(sensitivity_cmd);

  CLI::App* ed_cmd = app.add_subcommand(
      "ed-degree", "critical-point enumeration by homotopy continuation");
  ed_cmd->add_option("--m", m, "camera count (3 or 4)");
  ed_cmd->add_option("--runs", runs, "independent gamma draws");
  add_common(ed_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitParseError;
  }

  try {
    if (membership_cmd->parsed())
      return cmd_membership(scene_path, paper_rig, m, out_path, rank_tol, seed);
    if (triangulate_cmd->parsed())
      return cmd_triangulate(scene_path, paper_rig, m, out_path, rank_tol, seed);
    if (schubert_cmd->parsed())
      return cmd_schubert(scene_path, out_path, seed, rank_tol);
    if (multidegree_cmd->parsed())
      return cmd_multidegree(d_spec, trials, m, seed, out_path, assert_spec);
    if (real_count_cmd->parsed())
      return cmd_real_count(samples, seed, threads, out_path, assert_spec);
    if (sensitivity_cmd->parsed())
      return cmd_sensitivity(kind, m, rig_name, trials, eps, seed, threads,
                             out_path);
    if (ed_cmd->parsed())
      return cmd_ed_degree(m, seed, threads, runs, out_path, assert_spec);
  } catch (const nlohmann::json::parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParseError;
  } catch (const lmv::Error& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kExitInvariantViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParseError;
  }
  return kExitOk;
}
