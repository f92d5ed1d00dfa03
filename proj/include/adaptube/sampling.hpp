#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace adaptube {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  double center() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

using Box = std::vector<Interval>;

bool box_contains(const Box& box, const Eigen::VectorXd& x);

/// Box scaled about its center by `factor`.
Box shrink(const Box& box, double factor);

/// Radical inverse of `index` in the given prime base.
double radical_inverse(std::uint64_t index, int base);

/// Halton points over a box. Coordinate d uses the d-th prime as base
/// (2, 3, 5, 7, ...). The k-th sample (k = 0, 1, ...) is Halton index
/// seed + k + 1, so a seed shifts the window into the sequence.
std::vector<Eigen::VectorXd> halton_points(const Box& box, int count, std::uint64_t seed = 0);

/// Uniform grid of `count` points over [lo, hi] (endpoints included).
std::vector<double> linspace(double lo, double hi, int count);

}  // namespace adaptube
