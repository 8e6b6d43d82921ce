#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <numbers>
#include <sstream>

#include "medial/cli.hpp"
#include "medial/errors.hpp"
#include "medial/medial_graph.hpp"
#include "medial/polynomial.hpp"
#include "medial/rigidity.hpp"

using namespace medial;
using std::numbers::pi;

namespace {

const std::string kFixtures = MEDIAL_FIXTURE_DIR;

std::string fixture(const std::string& name) { return kFixtures + "/" + name; }

struct Run {
  int code;
  std::string out, err;
  std::map<std::string, std::string> values;  // machine-format key=value lines

  double number(const std::string& key) const { return std::strtod(values.at(key).c_str(), nullptr); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  std::istringstream lines(r.out);
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) r.values[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return r;
}

Run machine(std::vector<std::string> args) {
  args.insert(args.begin(), {"--format", "machine"});
  return run(std::move(args));
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("medial_cli_" + name)).string();
}

}  // namespace

TEST(ParseReal, Forms) {
  EXPECT_DOUBLE_EQ(parse_real("1.25"), 1.25);
  EXPECT_DOUBLE_EQ(parse_real("3/4"), 0.75);
  EXPECT_DOUBLE_EQ(parse_real("pi"), pi);
  EXPECT_DOUBLE_EQ(parse_real("-pi/2"), -pi / 2);
  EXPECT_DOUBLE_EQ(parse_real("2pi/3"), 2 * pi / 3);
  EXPECT_DOUBLE_EQ(parse_real("5*pi/9"), 5 * pi / 9);
  EXPECT_TRUE(parse_projective("inf").is_infinite());
  EXPECT_THROW(parse_real("abc"), Error);
  EXPECT_THROW(parse_real("1/0"), Error);
}

TEST(ParseReal, RoundedTriplesAreProjected) {
  const auto t = angle_triple_from_input({2.0943951, 1.7453293, 2.4434610});
  EXPECT_NEAR(t[0] + t[1] + t[2], 2 * pi, 1e-15);
  EXPECT_THROW(angle_triple_from_input({2.0, 2.0, 2.0}), Error);
}

TEST(Cli, TripleMatchesLibrary) {
  const auto r = machine({"triple", "2pi/3", "5pi/9", "7pi/9"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto t = triple_cross_ratio(AngleTriple(2 * pi / 3, 5 * pi / 9, 7 * pi / 9));
  for (int j = 0; j < 3; ++j) {
    EXPECT_EQ(r.number("lambda_" + std::to_string(j + 1)), t.lambdas[j]);
    EXPECT_EQ(r.values.at("sector_" + std::to_string(j + 1)), std::to_string(kTripleRowSectors[j]));
  }
  EXPECT_NEAR(r.number("lambda_1"), -1.226681596, 1e-8);
}

TEST(Cli, TripleFromDecimals) {
  // Seven-decimal angles are within 5e-8 of the exact ones; the table values
  // are reproduced to that accuracy.
  const auto r = machine({"triple", "2.0943951", "1.7453293", "2.4434610"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NEAR(r.number("lambda_1"), -1.226681596, 1e-6);
  EXPECT_NEAR(r.number("lambda_2"), -3.411474126, 1e-6);
  EXPECT_NEAR(r.number("lambda_3"), 1.742227197, 1e-6);
}

TEST(Cli, HumanOutputIsAligned) {
  const auto r = run({"triple", "2pi/3", "5pi/9", "7pi/9"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("theta_1   2.094395102 rad (120.000000 deg)"), std::string::npos) << r.out;
}

TEST(Cli, CrossRatioForms) {
  EXPECT_EQ(machine({"cross-ratio", "0", "1", "2", "3"}).number("cross_ratio"), -3.0);
  const auto inf = machine({"cross-ratio", "inf", "2", "5", "7"});
  EXPECT_NEAR(inf.number("cross_ratio"), 3.0 / -2.0, 1e-15);
  const auto slopes = machine({"cross-ratio", "--slopes", "0", "1", "3", "-2"});
  EXPECT_NEAR(slopes.number("cross_ratio"), cross_ratio<double>(0, 1, 3, -2).value(), 1e-12);
  const auto pencil = machine({"cross-ratio", "--pencil", fixture("pencil_3d.json")});
  ASSERT_EQ(pencil.code, kExitOk) << pencil.err;
  EXPECT_NEAR(pencil.number("cross_ratio"), cross_ratio<double>(0, 1, 3, -2).value(), 1e-12);
  EXPECT_EQ(run({"cross-ratio", "1", "1", "2", "3"}).code, kExitError);
}

TEST(Cli, OrbitOfHarmonicValue) {
  const auto r = machine({"orbit", "-1"});
  EXPECT_EQ(r.values.at("size"), "3");
  EXPECT_EQ(r.values.at("orbit"), "-1,0.5,2");
  EXPECT_EQ(run({"orbit", "1"}).code, kExitError);
}

TEST(Cli, YAngles) {
  const auto r = machine({"y-angles", "2pi/3", "5pi/9", "7pi/9"});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_NEAR(r.number("alpha_1"), pi / 3, 1e-15);
  EXPECT_NEAR(r.number("alpha_2"), 4 * pi / 9, 1e-15);
  EXPECT_EQ(run({"y-angles", "2", "2", "2"}).code, kExitError);
}

TEST(Cli, XCheck) {
  const auto ok = machine({"x-check", "1.5707963", "1.5707963", "1.5707963", "1.5707963", "--t", "0.7853982"});
  EXPECT_EQ(ok.code, kExitOk) << ok.err;
  EXPECT_EQ(ok.values.at("compatible"), "true");
  EXPECT_NEAR(ok.number("beta_1"), pi / 4, 1e-6);
  const auto bad = machine({"x-check", "5pi/9", "5pi/9", "5pi/9", "pi/3"});
  EXPECT_EQ(bad.code, kExitObstruction);
  EXPECT_NEAR(bad.number("residual"), 2 * pi / 9, 1e-15);
}

TEST(Cli, CompareSyntheticGraphs) {
  const auto diff = machine({"compare", fixture("y_branch_a.json"), fixture("y_branch_b.json")});
  EXPECT_EQ(diff.code, kExitObstruction) << diff.err;
  EXPECT_GT(diff.number("obstruction"), 0.0);
  EXPECT_EQ(diff.values.at("matched"), "false");

  const auto same = machine({"compare", fixture("y_branch_a.json"), fixture("y_branch_a_rotated.json")});
  EXPECT_EQ(same.code, kExitOk) << same.err << same.out;
  EXPECT_LT(same.number("obstruction"), 1e-9);
}

TEST(Cli, CompareMatchesLibrary) {
  const auto r = machine({"compare", fixture("y_branch_a.json"), fixture("y_branch_b.json")});
  const auto lib = compare_y_branch(AngleTriple(2 * pi / 3, 5 * pi / 9, 7 * pi / 9),
                                    AngleTriple(2 * pi / 3, 11 * pi / 18, 13 * pi / 18), 1e-9);
  EXPECT_NEAR(r.number("obstruction"), lib.obstruction, 1e-9);
}

TEST(Cli, ComparePencilsAndMismatch) {
  EXPECT_EQ(machine({"compare", fixture("pencil_3d.json"), fixture("pencil_3d.json")}).code, kExitOk);
  EXPECT_EQ(machine({"compare", fixture("pencil_3d.json"), fixture("pencil_3d_tilted.json")}).code, kExitObstruction);
  const auto mixed = machine({"compare", fixture("y_branch_a.json"), fixture("pencil_3d.json")});
  EXPECT_EQ(mixed.code, kExitObstruction);
  EXPECT_EQ(mixed.values.at("kind"), "mismatch");
  EXPECT_EQ(run({"compare", fixture("y_branch_a.json"), fixture("missing.json")}).code, kExitError);
}

TEST(Cli, Rank) {
  const auto r = machine({"rank", "2pi/3", "5pi/9", "7pi/9", "--radius", "0.05", "--samples", "100"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.values.at("rank2"), "true");
  EXPECT_EQ(r.values.at("probe_injective"), "true");
  EXPECT_EQ(run({"rank", "pi/2", "3pi/4", "3pi/4"}).code, kExitError);
  const auto scan = machine({"rank", "--scan", "8"});
  EXPECT_EQ(scan.values.at("rank2"), scan.values.at("evaluated"));
}

TEST(Cli, DistortBuiltinCross) {
  const auto r = machine({"distort", "--alpha", "pi/3"});
  EXPECT_EQ(r.code, kExitObstruction);
  EXPECT_EQ(r.values.at("matched_curves"), "3");
  EXPECT_NEAR(r.number("angle_error_4"), pi / 3, 1e-12);
}

TEST(Cli, DistortFiles) {
  const auto r = machine({"distort", fixture("cross_square.json"), fixture("cross_alpha60.json")});
  EXPECT_EQ(r.code, kExitObstruction) << r.err;
  EXPECT_NEAR(r.number("angle_error_4"), pi / 3, 1e-12);
  EXPECT_EQ(machine({"distort", fixture("cross_square.json"), fixture("cross_square.json")}).code, kExitOk);
}

TEST(Cli, ShapeCheck) {
  const auto shear = machine({"shape-check", fixture("strip_patch.json"), fixture("shear_diffeo.json"),
                              fixture("strip_patch.json"), "--u", "0.5"});
  EXPECT_EQ(shear.code, kExitOk) << shear.err;
  EXPECT_EQ(shear.values.at("pass"), "true");

  const auto scale = machine({"shape-check", fixture("parabola_patch.json"), fixture("scale2_diffeo.json"),
                              fixture("parabola_doubled.json"), "--u", "0.3"});
  EXPECT_EQ(scale.code, kExitOk) << scale.err;
  EXPECT_NEAR(scale.number("sigma"), 0.5, 1e-12);

  const auto line = machine({"shape-check", fixture("parabola_patch.json"), fixture("scale2_diffeo.json"),
                             fixture("parabola_doubled.json"), "--radial-line"});
  EXPECT_EQ(line.code, kExitOk) << line.err;
  EXPECT_NEAR(line.number("sigma_tilde"), 0.5, 1e-12);

  const auto rotated = run({"shape-check", fixture("strip_patch.json"), fixture("rotate_radial_diffeo.json"),
                            fixture("strip_patch.json"), "--radial-line"});
  EXPECT_EQ(rotated.code, kExitError);
  EXPECT_NE(rotated.err.find("RadialLineNotPreserved"), std::string::npos);
}

TEST(Cli, ExtractAndRender) {
  const std::string graph_path = temp_path("graph.json");
  const auto ex = machine({"extract", fixture("rectangle_boundary.json"), "--out", graph_path});
  ASSERT_EQ(ex.code, kExitOk) << ex.err;
  EXPECT_EQ(ex.values.at("branch_vertices"), "2");
  const auto g = parse_medial_graph(read_text_file(graph_path));
  EXPECT_EQ(g.vertices.size(), std::stoul(ex.values.at("vertices")));

  const std::string svg_path = temp_path("render.svg");
  EXPECT_EQ(run({"render", graph_path, "--out", svg_path}).code, kExitOk);
  EXPECT_NE(read_text_file(svg_path).find("<polyline"), std::string::npos);
  EXPECT_EQ(run({"render", "--theta", "2pi/3", "5pi/9", "7pi/9", "--out", svg_path}).code, kExitOk);
  EXPECT_EQ(run({"render", "--theta", "pi/2", "pi/2", "pi/2", "pi/2", "--t", "pi/4", "--out", svg_path}).code, kExitOk);
  EXPECT_EQ(run({"render", "--theta", "pi/2", "pi/2", "pi/2", "pi/2", "--out", svg_path}).code, kExitError);
  std::remove(graph_path.c_str());
  std::remove(svg_path.c_str());
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, kExitError);
  EXPECT_EQ(run({"frobnicate"}).code, kExitError);
  EXPECT_EQ(run({"triple", "1", "2"}).code, kExitError);
  EXPECT_EQ(run({"--format", "xml", "orbit", "2"}).code, kExitError);
  const auto help = run({"--help"});
  EXPECT_EQ(help.code, kExitOk);
  EXPECT_NE(help.out.find("triple"), std::string::npos);
}
