#pragma once

#include <random>
#include <string>

#include "kc/pencil_core.hpp"

namespace kct {

inline kc::Mat mat2(double a, double b, double c, double d) {
  kc::Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

inline kc::Pencil pencil2(const kc::Mat& a, const kc::Mat& k) { return kc::Pencil{kc::SymMatrix(a), kc::SymMatrix(k)}; }

inline kc::Mat random_symmetric(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  kc::Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = nd(rng);
  return 0.5 * (m + m.transpose());
}

inline kc::Mat random_spd(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  kc::Mat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = nd(rng);
  return g * g.transpose() + n * kc::Mat::Identity(n, n);
}

inline std::string source_path(const std::string& rel) { return std::string(KC_SOURCE_DIR) + "/" + rel; }

}  // namespace kct
