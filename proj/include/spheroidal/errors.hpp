// Copyright (c) 2026, the spheroidal authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SPHEROIDAL_ERRORS_HPP
#define SPHEROIDAL_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spheroidal {

/// Base class for numerical failures raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A point lies on (or too close to) the focal segment/ring of a spheroid,
/// where the inverse coordinate map degenerates.
struct FocalDegeneracyError : Error {
  using Error::Error;
};

/// An iterative geometric routine exceeded its iteration cap.
struct NoConvergenceError : Error {
  using Error::Error;
};

/// A Legendre table entry left the representable range.
struct OverflowError : Error {
  OverflowError(int n_, int m_, const std::string& what) : Error(what), n(n_), m(m_) {}
  int n, m;
};

/// The continued fraction for a Legendre function ratio failed to settle.
struct LentzError : Error {
  LentzError(int order_, long iterations_, const std::string& what)
      : Error(what), order(order_), iterations(iterations_) {}
  int order;
  long iterations;
};

/// The cross-degree Wronskian consistency check failed, signalling that the
/// argument is too close to the cut for the requested degree.
struct WronskianError : Error {
  WronskianError(int n_, int m_, double residual_, const std::string& what)
      : Error(what), n(n_), m(m_), residual(residual_) {}
  int n, m;
  double residual;
};

/// A target point was supplied on the wrong side of an expansion's surface.
struct RegionMismatchError : Error {
  using Error::Error;
};

/// Two or more particles in a suspension overlap.
struct OverlapError : Error {
  OverlapError(std::vector<std::pair<int, int>> pairs_, const std::string& what)
      : Error(what), pairs(std::move(pairs_)) {}
  std::vector<std::pair<int, int>> pairs;
};

/// An evaluation target for an exterior problem lies inside a particle.
struct TargetInsideError : Error {
  TargetInsideError(int particle_, const std::string& what) : Error(what), particle(particle_) {}
  int particle;
};

/// GMRES hit its iteration cap before reaching the requested tolerance.
struct GmresStagnationError : Error {
  GmresStagnationError(std::vector<double> history, const std::string& what)
      : Error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

/// Configuration / input-file problem (CLI layer).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace spheroidal

#endif  // SPHEROIDAL_ERRORS_HPP
