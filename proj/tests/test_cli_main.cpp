// Drives the installed CLI binary end to end: exit codes, schema round
// trips, and byte-identical reruns. Invoked as: lmv_cli_tests <path-to-lmv>.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "lmv/multiview.hpp"
#include "lmv/reference_rigs.hpp"
#include "lmv/rng.hpp"

using nlohmann::json;

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
  if (ok) {
    std::printf("ok   %s\n", what.c_str());
  } else {
    std::printf("FAIL %s\n", what.c_str());
    ++failures;
  }
}

std::string binary;
std::string work_dir;

int run(const std::string& args) {
  const std::string cmd = binary + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string scene_with_tuples() {
  using namespace lmv;
  const CameraRig rig = fixed_triplet_rig();
  json cameras = json::array();
  for (int i = 0; i < rig.size(); ++i) {
    json flat = json::array();
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 4; ++c) flat.push_back(rig.camera(i).matrix()(r, c));
    cameras.push_back(flat);
  }
  Rng rng(555);
  json tuples = json::array();
  // One consistent tuple, one random tuple.
  const LineTuple good = forward_map(
      rig, PlueckerLine::from_points(rng.gaussian_vector(4).cast<Complex>(),
                                     rng.gaussian_vector(4).cast<Complex>()));
  json good_tuple = json::array();
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector3d v = good[i].real_coords();
    good_tuple.push_back(json::array({v[0], v[1], v[2]}));
  }
  tuples.push_back(good_tuple);
  json bad_tuple = json::array();
  for (int i = 0; i < 3; ++i)
    bad_tuple.push_back(
        json::array({rng.gaussian(), rng.gaussian(), rng.gaussian()}));
  tuples.push_back(bad_tuple);

  json lines = json::array();
  for (int k = 0; k < 4; ++k) {
    const PlueckerLine l =
        PlueckerLine::from_points(rng.gaussian_vector(4).cast<Complex>(),
                                  rng.gaussian_vector(4).cast<Complex>());
    int imax = 0;
    l.pluecker().cwiseAbs().maxCoeff(&imax);
    const Complex phase = std::conj(l.pluecker()[imax]) /
                          std::abs(l.pluecker()[imax]);
    json arr = json::array();
    for (int i = 0; i < 6; ++i) arr.push_back((l.pluecker()[i] * phase).real());
    lines.push_back(arr);
  }
  return json{{"cameras", cameras}, {"tuples", tuples}, {"lines", lines}}
      .dump();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: lmv_cli_tests <path-to-lmv-binary>\n");
    return 2;
  }
  binary = argv[1];
  work_dir = "cli_test_tmp";
  std::system(("rm -rf " + work_dir + " && mkdir -p " + work_dir).c_str());

  const std::string scene = work_dir + "/scene.json";
  write_file(scene, scene_with_tuples());

  // Exit code contract.
  const std::string malformed = work_dir + "/broken.json";
  write_file(malformed, "{\"cameras\": [[1,2,3");
  expect(run("membership --scene " + malformed) == 2,
         "malformed JSON exits 2");

  const std::string invalid = work_dir + "/invalid.json";
  write_file(invalid, "{\"cameras\": [[1,2,3]], \"tuples\": []}");
  expect(run("membership --scene " + invalid) == 3,
         "invariant violation exits 3");

  expect(run("bogus-subcommand") == 2, "unknown subcommand exits 2");

  // Membership stream over a consistent and an inconsistent tuple.
  const std::string member_out = work_dir + "/membership.jsonl";
  expect(run("membership --scene " + scene + " --out " + member_out) == 0,
         "membership run exits 0");
  {
    std::ifstream in(member_out);
    std::string line;
    std::getline(in, line);  // header
    expect(json::parse(line).contains("header"), "membership header line");
    std::getline(in, line);
    const json first = json::parse(line);
    expect(first["in_variety"].get<bool>() == true,
           "forward-mapped tuple is in the variety");
    expect(first["rank"].get<int>() == 2, "forward-mapped tuple has rank 2");
    std::getline(in, line);
    const json second = json::parse(line);
    expect(second["in_variety"].get<bool>() == false,
           "random tuple is rejected");
    // Schema round trip: parse + dump is a fixpoint.
    expect(json::parse(line).dump() == line, "membership JSONL round trip");
  }

  // Determinism: identical seed and config give identical bytes.
  const std::string member_out2 = work_dir + "/membership2.jsonl";
  run("membership --scene " + scene + " --out " + member_out2);
  expect(slurp(member_out) == slurp(member_out2),
         "membership output is byte identical");

  // Triangulation of the consistent tuple.
  const std::string tri_out = work_dir + "/triangulate.jsonl";
  expect(run("triangulate --scene " + scene + " --out " + tri_out) == 0,
         "triangulate run exits 0");
  {
    std::ifstream in(tri_out);
    std::string line;
    std::getline(in, line);  // header
    std::getline(in, line);
    const json rec = json::parse(line);
    expect(rec["objective"].get<double>() < 1e-16,
           "exact tuple objective is numerically zero");
    expect(rec["converged"].get<bool>(), "exact tuple converges");
  }

  // Schubert count of four random lines.
  const std::string schubert_out = work_dir + "/schubert.json";
  expect(run("schubert --scene " + scene + " --out " + schubert_out) == 0,
         "schubert run exits 0");
  {
    const json rec = json::parse(slurp(schubert_out));
    expect(rec["status"] == "finite", "schubert status finite");
    expect(rec["transversals"].size() == 2, "schubert finds 2 transversals");
  }

  // Multidegree with assertions.
  expect(run("multidegree --d 2,2 --trials 5 --m 5 --seed 3 --assert exact=1") ==
             0,
         "multidegree 2,2 asserts count 1");
  expect(run("multidegree --d 1,1,1,1 --trials 5 --m 5 --seed 3 "
             "--assert exact=2") == 0,
         "multidegree 1,1,1,1 asserts count 2");
  expect(run("multidegree --d 1,1,1,1 --trials 5 --m 5 --seed 3 "
             "--assert exact=7") == 1,
         "failed assertion exits 1");

  // Monte-Carlo real count with a loose assertion.
  const std::string rc_out = work_dir + "/realcount.json";
  expect(run("real-count --samples 20000 --seed 7 --assert tol=0.05 --out " +
             rc_out) == 0,
         "real-count within 0.05 of the reference");
  {
    const json rec = json::parse(slurp(rc_out));
    expect(std::abs(rec["mean"].get<double>() - 1.7262) < 0.05,
           "real-count mean plausible");
  }
  expect(run("real-count --samples 2000 --seed 7 --assert tol=0.0000001") == 1,
         "unreachable tolerance exits 1");

  // Sensitivity CSV.
  const std::string sens_out = work_dir + "/sensitivity.csv";
  expect(run("sensitivity --kind lines --m 2 --rig paper --trials 20 "
             "--eps 1e-12 --seed 5 --out " + sens_out) == 0,
         "sensitivity run exits 0");
  {
    std::ifstream in(sens_out);
    std::string line;
    std::getline(in, line);
    expect(line.rfind("# lmv", 0) == 0, "sensitivity header present");
    std::getline(in, line);
    expect(line == "trial,kind,e_value,objective,converged,restarts",
           "sensitivity column header");
    int rows = 0;
    while (std::getline(in, line))
      if (!line.empty()) ++rows;
    expect(rows == 20, "sensitivity row count");
  }
  const std::string sens_out2 = work_dir + "/sensitivity2.csv";
  run("sensitivity --kind lines --m 2 --rig paper --trials 20 --eps 1e-12 "
      "--seed 5 --out " + sens_out2);
  expect(slurp(sens_out) == slurp(sens_out2),
         "sensitivity output is byte identical");

  std::printf(failures == 0 ? "all cli checks passed\n"
                            : "%d cli checks FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
