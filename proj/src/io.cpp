#include "qbx/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "qbx/errors.hpp"

namespace qbx {
namespace {

std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path);
  return f;
}

}  // namespace

FourierCurve parse_fourier_curve(std::istream& in) {
  std::map<int, std::pair<cplx, cplx>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(strip_comment(line));
    int j;
    if (!(ss >> j)) continue;
    double a, b, c, d;
    if (!(ss >> a >> b >> c >> d) || j < 0)
      throw ParseError("curve file line " + std::to_string(lineno) + ": expected 'j Re1 Im1 Re2 Im2'");
    if (rows.count(j)) throw ParseError("curve file: duplicate index " + std::to_string(j));
    rows[j] = {cplx(a, b), cplx(c, d)};
  }
  if (rows.empty()) throw ParseError("curve file has no coefficients");
  const int n = rows.rbegin()->first + 1;
  std::vector<cplx> x1(n), x2(n);
  for (const auto& [j, v] : rows) {
    x1[j] = v.first;
    x2[j] = v.second;
  }
  return FourierCurve(std::move(x1), std::move(x2));
}

FourierCurve read_fourier_curve(const std::string& path) {
  auto f = open_or_throw(path);
  return parse_fourier_curve(f);
}

std::vector<Placement> parse_placements(std::istream& in) {
  std::vector<Placement> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(strip_comment(line));
    Placement p;
    if (!(ss >> p.angle)) continue;
    if (!(ss >> p.scale >> p.shift.x >> p.shift.y))
      throw ParseError("placement file line " + std::to_string(lineno) + ": expected 'angle scale tx ty'");
    out.push_back(p);
  }
  if (out.empty()) throw ParseError("placement file is empty");
  return out;
}

std::vector<Placement> read_placements(const std::string& path) {
  auto f = open_or_throw(path);
  return parse_placements(f);
}

std::vector<FourierCurve> place_copies(const FourierCurve& c, const std::vector<Placement>& where) {
  std::vector<FourierCurve> out;
  out.reserve(where.size());
  for (const auto& p : where) out.push_back(c.transformed(p.angle, p.scale, p.shift));
  return out;
}

}  // namespace qbx
