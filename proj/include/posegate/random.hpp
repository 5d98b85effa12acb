#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace posegate {

// FNV-1a, stable across platforms.
inline std::uint64_t HashImageId(std::string_view id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t MixSeeds(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// mt19937_64 with distributions written out by hand: the standard library
// distributions are not reproducible across implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // [0, 1)
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  std::size_t Index(std::size_t n) {
    const auto i = static_cast<std::size_t>(Uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  bool Bernoulli(double p) { return Uniform() < p; }

  // Box-Muller; always consumes two draws.
  double Normal() {
    const double u1 = 1.0 - Uniform();  // (0, 1]
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Eigen::Vector3d NormalVector() { return {Normal(), Normal(), Normal()}; }

  Eigen::Vector3d UnitVector() {
    const double z = Uniform(-1.0, 1.0);
    const double phi = Uniform(0.0, 2.0 * std::numbers::pi);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
  }

  Eigen::Vector3d InBox(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) {
    return {Uniform(lo[0], hi[0]), Uniform(lo[1], hi[1]), Uniform(lo[2], hi[2])};
  }

  // Uniform over SO(3) (Shoemake).
  Eigen::Quaterniond UniformRotation() {
    const double u1 = Uniform();
    const double u2 = Uniform(0.0, 2.0 * std::numbers::pi);
    const double u3 = Uniform(0.0, 2.0 * std::numbers::pi);
    const double a = std::sqrt(1.0 - u1);
    const double b = std::sqrt(u1);
    return Eigen::Quaterniond(b * std::cos(u3), a * std::sin(u2), a * std::cos(u2), b * std::sin(u3));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace posegate
