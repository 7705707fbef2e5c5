#include "qha/types.hpp"

#include <cstdio>

namespace qha {

double norm2(const Point& z) {
  double s = 0;
  for (const auto& c : z) s += std::norm(c);
  return s;
}

Point operator+(const Point& a, const Point& b) {
  if (a.size() != b.size()) throw Error("point dimension mismatch");
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Point operator-(const Point& a, const Point& b) {
  if (a.size() != b.size()) throw Error("point dimension mismatch");
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Point operator-(const Point& a) {
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

Point scaled(const Point& a, double s) {
  Point r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

std::string format_point(const Point& z) {
  std::string out = "(";
  char buf[64];
  for (std::size_t i = 0; i < z.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.6g%+.6gi", i ? ", " : "", z[i].real(), z[i].imag());
    out += buf;
  }
  return out + ")";
}

}  // namespace qha
