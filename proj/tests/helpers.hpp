#pragma once

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "spdgeo/manifold.hpp"

namespace spdgeo::test {

inline double rel_err(const Mat& a, const Mat& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

inline Spd rand_spd(Index d, std::mt19937_64& rng) { return random_spd<double>(d, rng, 0.1, 1e3); }

inline Spd diag(std::initializer_list<double> v) {
  Vec x(static_cast<Index>(v.size()));
  Index i = 0;
  for (double e : v) x(i++) = e;
  return Spd(Mat(x.asDiagonal()));
}

inline Mat from_rows(Index r, Index c, std::initializer_list<double> v) {
  Mat m(r, c);
  auto it = v.begin();
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = *it++;
  return m;
}

/// Fresh directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto p = std::filesystem::temp_directory_path() /
           ("spdgeo_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace spdgeo::test
