#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "blgram/actuator_selection.hpp"
#include "blgram/energy_bounds.hpp"
#include "blgram/gramian.hpp"
#include "blgram/io.hpp"
#include "blgram/network_analysis.hpp"
#include "blgram/system.hpp"

#ifdef BLGRAM_CLI_PATH
#include <cstdio>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>
#endif

namespace testsupport {

using namespace blgram;

inline std::string fixture_path(const std::string& name) {
  return std::string(BLGRAM_FIXTURES_DIR) + "/" + name;
}

/// Deterministic RNG with platform-independent uniform doubles.
struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double unit() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  /// Integer in [lo, hi] inclusive.
  int integer(int lo, int hi) {
    return lo + static_cast<int>(unit() * static_cast<double>(hi - lo + 1));
  }
};

inline Matrix random_matrix(Rng& rng, Index rows, Index cols, double lo = -1.0,
                            double hi = 1.0) {
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) out(i, j) = rng.uniform(lo, hi);
  }
  return out;
}

inline Vector random_vector(Rng& rng, Index size, double lo = -1.0, double hi = 1.0) {
  Vector out(size);
  for (Index i = 0; i < size; ++i) out(i) = rng.uniform(lo, hi);
  return out;
}

inline Matrix scale_to_rho(Matrix a, double target) {
  const double r = spectral_radius(a);
  if (r == 0.0) return a;
  return a * (target / r);
}

/// Random system with rho(A) in [0.2, 0.6] and the modulation matrices scaled
/// until the Gramian existence radius drops to rho_target or below.
inline BilinearSystem random_system(Rng& rng, Index n, Index m, double rho_target) {
  const Matrix a = scale_to_rho(random_matrix(rng, n, n), rng.uniform(0.2, 0.6));
  std::vector<Matrix> f;
  for (Index j = 0; j < m; ++j) f.push_back(random_matrix(rng, n, n));
  const Matrix b = random_matrix(rng, n, m);
  double s = 1.0;
  for (int it = 0; it < 60; ++it) {
    std::vector<Matrix> scaled;
    for (const Matrix& fj : f) scaled.push_back(s * fj);
    const ExistenceCheck ex = gramian_exists(BilinearSystem(a, scaled, b));
    if (ex.rho <= rho_target) break;
    s *= 0.8;
  }
  for (Matrix& fj : f) fj *= s;
  return BilinearSystem(a, f, b);
}

/// Random actuator library with joint existence radius <= 0.85.
inline ActuatorLibrary random_library(Rng& rng, Index n, int n_candidates) {
  const Matrix a = scale_to_rho(random_matrix(rng, n, n), rng.uniform(0.2, 0.55));
  std::vector<ActuatorCandidate> cands;
  for (int i = 0; i < n_candidates; ++i) {
    cands.push_back({random_matrix(rng, n, n), random_vector(rng, n)});
  }
  double s = 0.6;
  for (int it = 0; it < 60; ++it) {
    std::vector<Matrix> f;
    Matrix b(n, n_candidates);
    for (int i = 0; i < n_candidates; ++i) {
      f.push_back(s * cands[static_cast<std::size_t>(i)].F);
      b.col(i) = cands[static_cast<std::size_t>(i)].B;
    }
    const ExistenceCheck ex = gramian_exists(BilinearSystem(a, f, b));
    if (ex.rho <= 0.85) break;
    s *= 0.8;
  }
  for (ActuatorCandidate& c : cands) c.F *= s;
  return ActuatorLibrary(a, cands);
}

inline double rel_frobenius(const Matrix& got, const Matrix& want) {
  const double denom = want.norm();
  return (got - want).norm() / (denom > 0 ? denom : 1.0);
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

/// The fixture Gramian's published display values (four decimals).
inline Matrix bench5_reference_gramian() {
  Matrix w(5, 5);
  w << 0.6505, 0.4572, 0.4741, 0.1945, 0.5342,
       0.4572, 1.2846, -0.4169, -0.1165, -0.3682,
       0.4741, -0.4169, 6.9412, 1.1619, 4.5490,
       0.1945, -0.1165, 1.1619, 0.2708, 0.9262,
       0.5342, -0.3682, 4.5490, 0.9262, 5.2681;
  return w;
}

inline BilinearSystem load_fixture_system(const std::string& name) {
  return io::system_from_json(
      io::parse_json_text(io::read_file(fixture_path(name)), name));
}

inline ActuatorLibrary load_fixture_library(const std::string& name) {
  return io::library_from_json(
      io::parse_json_text(io::read_file(fixture_path(name)), name));
}

#ifdef BLGRAM_CLI_PATH

struct CliResult {
  int exit_code;
  std::string out;
  std::string err;
};

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += '\'';
  return out;
}

/// Runs the CLI binary, capturing stdout/stderr and the exit code.
inline CliResult run_cli(const std::vector<std::string>& args) {
  static int counter = 0;
  const std::string err_file = "/tmp/blgram_test_stderr_" +
                               std::to_string(::getpid()) + "_" +
                               std::to_string(counter++) + ".txt";
  std::string cmd = shell_quote(BLGRAM_CLI_PATH);
  for (const std::string& a : args) cmd += " " + shell_quote(a);
  cmd += " 2> " + shell_quote(err_file);
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    throw std::runtime_error("run_cli: popen failed");
  }
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0) {
    out.append(buf, got);
  }
  const int status = ::pclose(pipe);
  CliResult res;
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  res.out = out;
  std::ifstream err_in(err_file, std::ios::binary);
  std::ostringstream err_os;
  err_os << err_in.rdbuf();
  res.err = err_os.str();
  std::remove(err_file.c_str());
  return res;
}

#endif  // BLGRAM_CLI_PATH

}  // namespace testsupport
