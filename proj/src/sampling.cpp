#include "adaptube/sampling.hpp"

#include <stdexcept>

namespace adaptube {

namespace {
constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
}

bool box_contains(const Box& box, const Eigen::VectorXd& x) {
  if (static_cast<int>(box.size()) != x.size()) return false;
  for (std::size_t i = 0; i < box.size(); ++i)
    if (!box[i].contains(x(static_cast<Eigen::Index>(i)))) return false;
  return true;
}

Box shrink(const Box& box, double factor) {
  Box out = box;
  for (auto& iv : out) {
    const double c = iv.center();
    const double h = 0.5 * iv.width() * factor;
    iv = {c - h, c + h};
  }
  return out;
}

double radical_inverse(std::uint64_t index, int base) {
  double inv_base = 1.0 / base;
  double f = inv_base;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv_base;
  }
  return r;
}

std::vector<Eigen::VectorXd> halton_points(const Box& box, int count, std::uint64_t seed) {
  if (box.size() > std::size(kPrimes)) throw std::invalid_argument("halton_points: too many dimensions");
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd x(box.size());
    const std::uint64_t index = seed + static_cast<std::uint64_t>(k) + 1;
    for (std::size_t d = 0; d < box.size(); ++d)
      x(static_cast<Eigen::Index>(d)) = box[d].lo + box[d].width() * radical_inverse(index, kPrimes[d]);
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out;
  if (count == 1) return {0.5 * (lo + hi)};
  for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * i / (count - 1));
  return out;
}

}  // namespace adaptube
