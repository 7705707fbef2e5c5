#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qha {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// A point of C^n, one complex entry per coordinate.
using Point = std::vector<cplx>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-fatal warnings raised by operations that still return a result.
struct Diagnostics {
  std::vector<std::string> flags;

  void flag(std::string msg) { flags.push_back(std::move(msg)); }
  bool clean() const { return flags.empty(); }
  void merge(const Diagnostics& other) {
    flags.insert(flags.end(), other.flags.begin(), other.flags.end());
  }
};

inline void raise_flag(Diagnostics* d, std::string msg) {
  if (d) d->flag(std::move(msg));
}

double norm2(const Point& z);  // sum |z_i|^2
Point operator+(const Point& a, const Point& b);
Point operator-(const Point& a, const Point& b);
Point operator-(const Point& a);
Point scaled(const Point& a, double s);
std::string format_point(const Point& z);

}  // namespace qha
