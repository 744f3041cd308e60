#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qbx/curve.hpp"

namespace qbx {

// Lines "j Re x1 Im x1 Re x2 Im x2"; '#' starts a comment.
FourierCurve parse_fourier_curve(std::istream& in);
FourierCurve read_fourier_curve(const std::string& path);

struct Placement {
  double angle = 0.0;
  double scale = 1.0;
  Vec2 shift;
};

// Lines "angle scale tx ty"; one boundary component per line.
std::vector<Placement> parse_placements(std::istream& in);
std::vector<Placement> read_placements(const std::string& path);

std::vector<FourierCurve> place_copies(const FourierCurve& c, const std::vector<Placement>& where);

}  // namespace qbx
