#pragma once

// Command-line front end shared by the `medrig` tool and the tests.

#include <array>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "medial/branch_geometry.hpp"
#include "medial/projective.hpp"

namespace medial {

/// Exit codes: 0 success (no obstruction), 2 obstruction found, 1 error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitObstruction = 2;

/// Slack accepted on the angle sum of typed triples and quads (e.g. angles
/// given to 7 decimals); the excess is spread over the angles.
inline constexpr double kAngleInputSlack = 1e-6;

/// Reals written as decimals, fractions or multiples of pi: "1.25", "3/4",
/// "pi", "-pi/2", "2pi/3", "5*pi/9".
double parse_real(std::string_view text);

/// parse_real, plus "inf" / "infinity" for the point at infinity.
ProjectiveScalard parse_projective(std::string_view text);

/// Exact constructor when the sum is 2 pi to within kAngleSumTol,
/// AngleTriple::from_rounded with kAngleInputSlack otherwise.
AngleTriple angle_triple_from_input(const std::array<double, 3>& theta);
AngleQuad angle_quad_from_input(const std::array<double, 4>& theta);

/// Runs one command line (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace medial
