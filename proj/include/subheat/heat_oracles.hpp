#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "subheat/estimate.hpp"
#include "subheat/random_stream.hpp"

namespace subheat {

struct Interval {
  double a;
  double b;
};

/// Disk of radius R in the plane, centred at the origin.
struct Disk {
  double radius;
};

/// Bounded open set on which heat contents are computed. Intervals have exact
/// oracles; disks are handled by path simulation.
class Domain {
 public:
  using Variant = std::variant<Interval, Disk>;

  Domain(Interval i);
  Domain(Disk d);

  const Variant& variant() const noexcept { return variant_; }
  bool is_interval() const noexcept { return std::holds_alternative<Interval>(variant_); }

  double volume() const noexcept;
  double surface() const noexcept;
  /// Radius of the largest inscribed ball.
  double inradius() const noexcept;

  std::string to_string() const;

 private:
  Variant variant_;
};

/// Parses `interval:<a>,<b>` or `disk:<R>`.
Domain parse_domain(std::string_view text);

// All heat contents use the generator Delta, i.e. Brownian motion with
// variance 2u per coordinate at time u.

/// Spectral heat content Q(u) of Brownian motion killed on leaving the interval.
double exact_Q_interval(const Interval& dom, double u);

/// |Omega| - Q(u), computed without cancellation for small u.
double exact_deficit_interval(const Interval& dom, double u);

/// exact_deficit_interval(u) - 4 sqrt(u/pi): the (exponentially small for
/// u << L^2) correction from paths that feel both ends, computed directly.
double deficit_remainder_interval(const Interval& dom, double u);

/// Heat that has left the interval at time u without killing:
/// int_Omega P_x(W_u not in Omega) dx.
double exact_H_interval(const Interval& dom, double u);

/// exact_H_interval(u) - 2 sqrt(u/pi), computed directly.
double H_remainder_interval(const Interval& dom, double u);

struct WalkerOptions {
  /// Euler steps per path; the step length is u / steps.
  int steps = 64;
  /// Multiply survival weights by the bridge non-crossing probability instead
  /// of killing by a Bernoulli draw.
  bool rao_blackwell = true;
  /// Start only in the boundary layer of width min(12 sqrt(u), inradius); the
  /// interior contributes its full volume since it cannot be reached there.
  bool boundary_band = true;
};

/// One unbiased sample of |Omega| - Q(u) from a bridge-corrected Euler walk.
/// `stratum` in [0,1) fixes the starting point's position across the start
/// region (uniform in volume).
double bridge_walk_deficit(const Domain& dom, double u, double stratum, RandomStream& stream,
                           const WalkerOptions& opts = {});

/// Q(u) on a disk by bridge-corrected path simulation with stratified starts.
Estimate mc_Q_disk(const Disk& dom, double u, std::uint64_t n_paths, std::uint64_t seed,
                   unsigned workers, const WalkerOptions& opts = {});

/// The same walker on an interval, for validation against the exact oracle.
Estimate mc_Q_interval(const Interval& dom, double u, std::uint64_t n_paths, std::uint64_t seed,
                       unsigned workers, const WalkerOptions& opts = {});

}  // namespace subheat
