// Copyright (c) 2026, the spheroidal authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SPHEROIDAL_CORE_HPP
#define SPHEROIDAL_CORE_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <thread>
#include <vector>

namespace spheroidal {

using complexd = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double four_pi = 4.0 * pi;

struct vec3 {
  double x = 0, y = 0, z = 0;

  friend vec3 operator+(vec3 a, vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend vec3 operator-(vec3 a, vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend vec3 operator*(double s, vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend vec3 operator*(vec3 a, double s) { return s * a; }
  friend vec3 operator/(vec3 a, double s) { return (1.0 / s) * a; }
  vec3 operator-() const { return {-x, -y, -z}; }
  vec3& operator+=(vec3 b) { x += b.x; y += b.y; z += b.z; return *this; }
  vec3& operator-=(vec3 b) { x -= b.x; y -= b.y; z -= b.z; return *this; }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline double dot(vec3 a, vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline vec3 cross(vec3 a, vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(vec3 a) { return std::sqrt(dot(a, a)); }
inline double norm2(vec3 a) { return dot(a, a); }
inline vec3 normalized(vec3 a) { return a / norm(a); }

/// Unit quaternion (w, x, y, z) encoding a rotation.
struct quat {
  double w = 1, x = 0, y = 0, z = 0;

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
  quat conj() const { return {w, -x, -y, -z}; }
  quat normalized() const {
    const double n = norm();
    return {w / n, x / n, y / n, z / n};
  }
  vec3 rotate(vec3 v) const {
    const vec3 u{x, y, z};
    const vec3 t = 2.0 * cross(u, v);
    return v + w * t + cross(u, t);
  }
};

/// Triangular index for tables over 0 <= m <= n.
inline int tri_index(int n, int m) { return n * (n + 1) / 2 + m; }
inline int tri_size(int max_degree) { return (max_degree + 1) * (max_degree + 2) / 2; }

/// Square index for coefficient tables over |m| <= n: entries 0..(p+1)^2-1.
inline int nm_index(int n, int m) { return n * n + n + m; }

/// i^k for integer k (k may be negative).
inline complexd ipow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

/// Deterministic random source. Streams of bits are taken from mt19937_64
/// and mapped to doubles explicitly so that output does not depend on the
/// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() {  // in [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * pi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * pi * u2);
  }

  vec3 in_ball(double radius) {
    for (;;) {
      vec3 v{uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)};
      if (norm2(v) <= 1.0) return radius * v;
    }
  }

  quat unit_quaternion() {
    for (;;) {
      quat q{uniform(-1, 1), uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)};
      const double n = q.norm();
      if (n > 1e-3 && n <= 1.0) return q.normalized();
    }
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0;
};

namespace detail {
inline int& thread_count_ref() {
  static int n = 1;
  return n;
}
}  // namespace detail

inline void set_thread_count(int n) { detail::thread_count_ref() = n < 1 ? 1 : n; }
inline int thread_count() { return detail::thread_count_ref(); }

/// Static-partition parallel loop. Every index is processed by exactly one
/// worker, so results are bitwise independent of the thread count as long
/// as distinct indices write to distinct outputs. The lowest-chunk exception
/// (if any) is rethrown after all workers join.
template <class Fn>
void parallel_for(std::int64_t n, Fn&& fn) {
  const int nt = int(std::min<std::int64_t>(thread_count(), n));
  if (nt <= 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(nt);
  workers.reserve(nt);
  const std::int64_t chunk = (n + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    const std::int64_t lo = t * chunk, hi = std::min<std::int64_t>(n, lo + chunk);
    workers.emplace_back([lo, hi, t, &fn, &errors] {
      try {
        for (std::int64_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace spheroidal

#endif  // SPHEROIDAL_CORE_HPP
