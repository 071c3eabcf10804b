#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "stochgm/params.hpp"
#include "stochgm/types.hpp"

namespace stochgm::test {

/// Moderate strong-motion fixture used across the suites.
inline GMParams reference_params(double fc_hz = 0.0, double t_total = 30.0) {
  GMParams p;
  p.log_ai = std::log(0.3);
  p.d595 = 12.0;
  p.t_mid = 8.0;
  p.omega_mid = 2.0 * kPi * 4.0;
  p.omega_rate = -0.2;
  p.zeta_f = 0.3;
  p.fc_hz = fc_hz;
  p.t_total = t_total;
  return p;
}

/// Short, cheap variant for tests that only need a valid process.
inline GMParams short_params(double fc_hz = 0.0) {
  GMParams p;
  p.log_ai = std::log(0.1);
  p.d595 = 5.0;
  p.t_mid = 4.0;
  p.omega_mid = 2.0 * kPi * 3.0;
  p.omega_rate = -0.1;
  p.zeta_f = 0.25;
  p.fc_hz = fc_hz;
  p.t_total = 12.0;
  return p;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() /
           ("stochgm_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace stochgm::test
