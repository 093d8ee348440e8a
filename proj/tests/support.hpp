#pragma once

// Shared fixtures and independent oracles for the test suites. The oracles
// deliberately avoid the library's own helpers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "placenav/embedding.hpp"
#include "placenav/localization.hpp"
#include "placenav/topo_map.hpp"

namespace placenav::test {

inline std::vector<float> random_floats(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<float> gauss(0.0f, 1.0f);
  std::vector<float> v(dim);
  for (float& x : v) x = gauss(rng);
  return v;
}

inline EmbeddingVector random_vector(std::size_t dim, std::mt19937_64& rng) {
  return EmbeddingVector(random_floats(dim, rng));
}

inline TopologicalMap random_map(std::size_t nodes, std::size_t dim, std::mt19937_64& rng) {
  std::vector<RouteSample> samples;
  for (std::size_t i = 0; i < nodes; ++i) samples.push_back({random_vector(dim, rng), {}, {}, {}});
  return TopologicalMap(std::move(samples));
}

inline TopologicalMap map_from(const std::vector<std::vector<float>>& rows) {
  std::vector<RouteSample> samples;
  for (const auto& r : rows) samples.push_back({EmbeddingVector(r), {}, {}, {}});
  return TopologicalMap(std::move(samples));
}

inline double naive_l2(std::span<const float> a, std::span<const float> b) {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long double d = static_cast<long double>(a[i]) - static_cast<long double>(b[i]);
    acc += d * d;
  }
  return static_cast<double>(std::sqrt(acc));
}

/// Dense (S+1)x(S+1) transition matrix, T[i][j] = p(node i | node j), built
/// by enumerating every offset and clamping its destination.
inline std::vector<std::vector<double>> transition_matrix(std::size_t n, int w_l, int w_u) {
  std::vector<std::vector<double>> t(n, std::vector<double>(n, 0.0));
  const double w = 1.0 / static_cast<double>(w_u - w_l + 1);
  for (std::size_t j = 0; j < n; ++j) {
    for (int o = w_l; o <= w_u; ++o) {
      long dest = static_cast<long>(j) + o;
      dest = std::clamp<long>(dest, 0, static_cast<long>(n) - 1);
      t[static_cast<std::size_t>(dest)][j] += w;
    }
  }
  return t;
}

inline std::vector<double> mat_vec(const std::vector<std::vector<double>>& m, const std::vector<double>& v) {
  std::vector<double> out(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  }
  return out;
}

/// Dense-matrix Bayes step: T * prior, times exp(-lambda d), normalized.
inline std::vector<double> oracle_bayes_step(const std::vector<double>& prior, const EmbeddingVector& obs,
                                             const TopologicalMap& map, int w_l, int w_u, double lambda1) {
  const auto t = transition_matrix(prior.size(), w_l, w_u);
  std::vector<double> post = mat_vec(t, prior);
  double sum = 0.0;
  for (std::size_t i = 0; i < post.size(); ++i) {
    post[i] *= std::exp(-lambda1 * naive_l2(obs.values(), map.store().row(i)));
    sum += post[i];
  }
  for (double& p : post) p /= sum;
  return post;
}

inline std::size_t oracle_argmin(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[best]) best = i;
  }
  return best;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("placenav-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommandResult {
  int exit_code;
  std::string output;
};

/// Runs the CLI binary with `args`, capturing stdout and stderr together.
inline CommandResult run_cli(const std::string& args, const std::filesystem::path& log) {
  const std::string cmd = std::string("\"") + PLACENAV_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  const int code = status == -1 ? -1 : (WIFEXITED(status) ? WEXITSTATUS(status) : -1);
  return {code, read_file(log)};
}

}  // namespace placenav::test
