#pragma once

#include <algorithm>
#include <string>

namespace edgesim {

// Absolute tolerance for resource comparisons (MB / MFlops).
inline constexpr double kResourceTol = 1e-9;

// Per-slot resource bundle: storage in MB, compute in MFlops per slot,
// uplink/downlink in MB per slot. Used for server capacities, job
// footprints, and committed-reservation ledgers alike.
struct ResourceVector {
  double storage = 0.0;
  double compute = 0.0;
  double uplink = 0.0;
  double downlink = 0.0;

  ResourceVector& operator+=(const ResourceVector& o) {
    storage += o.storage;
    compute += o.compute;
    uplink += o.uplink;
    downlink += o.downlink;
    return *this;
  }

  ResourceVector& operator-=(const ResourceVector& o) {
    storage -= o.storage;
    compute -= o.compute;
    uplink -= o.uplink;
    downlink -= o.downlink;
    return *this;
  }

  friend ResourceVector operator+(ResourceVector a, const ResourceVector& b) {
    a += b;
    return a;
  }

  friend ResourceVector operator-(ResourceVector a, const ResourceVector& b) {
    a -= b;
    return a;
  }

  ResourceVector scaled(double f) const {
    return {storage * f, compute * f, uplink * f, downlink * f};
  }

  // component-wise <= within tolerance
  bool fits_within(const ResourceVector& o, double tol = kResourceTol) const {
    return storage <= o.storage + tol && compute <= o.compute + tol &&
           uplink <= o.uplink + tol && downlink <= o.downlink + tol;
  }

  ResourceVector floored_at_zero() const {
    return {std::max(0.0, storage), std::max(0.0, compute),
            std::max(0.0, uplink), std::max(0.0, downlink)};
  }

  bool non_negative(double tol = kResourceTol) const {
    return storage >= -tol && compute >= -tol && uplink >= -tol &&
           downlink >= -tol;
  }

  std::string str() const {
    return "(" + std::to_string(storage) + ", " + std::to_string(compute) +
           ", " + std::to_string(uplink) + ", " + std::to_string(downlink) +
           ")";
  }
};

inline bool approx_equal(const ResourceVector& a, const ResourceVector& b,
                         double tol = kResourceTol) {
  return std::abs(a.storage - b.storage) <= tol &&
         std::abs(a.compute - b.compute) <= tol &&
         std::abs(a.uplink - b.uplink) <= tol &&
         std::abs(a.downlink - b.downlink) <= tol;
}

}  // namespace edgesim
