#pragma once

#include <stdexcept>
#include <string>

namespace lipalpha {

// Error taxonomy. The CLI maps these onto exit codes: configuration
// problems exit 1, precondition failures exit 2, and a violated
// analytic invariant exits 4 (see tools/lipalpha.cpp).

struct PointNotInDomain : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PoleHit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TransformSingular : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TailNotCertified : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivergentNorm : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RankDeficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Carries the first annulus index at which the packing failed.
struct InfeasibleSchedule : std::runtime_error {
  int n;
  InfeasibleSchedule(int n_, const std::string& what)
      : std::runtime_error(what), n(n_) {}
};

// Carries the first sequence index violating the cone condition.
struct ApertureViolated : std::runtime_error {
  long index;
  ApertureViolated(long index_, const std::string& what)
      : std::runtime_error(what), index(index_) {}
};

// Carries the first sequence index that left the open set.
struct SequenceLeftDomain : std::runtime_error {
  long index;
  SequenceLeftDomain(long index_, const std::string& what)
      : std::runtime_error(what), index(index_) {}
};

// Raised by config ingestion (schema violation, unknown key, bad value).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lipalpha
