#pragma once

#include <cstdint>
#include <functional>

#include "subheat/estimate.hpp"
#include "subheat/heat_oracles.hpp"
#include "subheat/levy_exponents.hpp"
#include "subheat/samplers.hpp"

namespace subheat {

struct RunOptions {
  std::uint64_t n_paths = 100000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  /// Draw subordinator clocks under the bounded-weight tail mixture.
  bool importance = true;
};

/// Q~(t) = E[Q^W(D_t)] on an interval: the exact interval oracle averaged over
/// subordinator clocks (subordinate killed Brownian motion).
/// Throws UnsupportedConfiguration for a disk.
Estimate estimate_spectral_subordinate(const LaplaceExponent& exp, const Domain& dom, double t,
                                       const RunOptions& run);

/// Q(t) = E[Q^W(E_t)] for the inverse subordinator clock. Because E is
/// continuous, killing before or after the time change gives the same number.
Estimate estimate_spectral_inverse(const TimeChangeSpec& spec, const Domain& dom, double t,
                                   const RunOptions& run);

/// Dispatches on spec.kind.
Estimate estimate_spectral(const TimeChangeSpec& spec, const Domain& dom, double t, const RunOptions& run);

/// H_{Omega,Omega^c}(t) = E[H^W_{Omega,Omega^c}(U_t)] on an interval.
Estimate estimate_regular(const TimeChangeSpec& spec, const Domain& dom, double t, const RunOptions& run);

/// Two-stage estimate on any domain: draw U_t, then one bridge-corrected walk
/// run for time U_t. Used for disks, and with non-default walker options as
/// the naive path-exit reference on intervals.
Estimate estimate_spectral_paths(const TimeChangeSpec& spec, const Domain& dom, double t,
                                 const RunOptions& run, const WalkerOptions& walker = {});

/// estimate_spectral_paths restricted to disks.
Estimate estimate_spectral_disk(const TimeChangeSpec& spec, const Domain& dom, double t,
                                const RunOptions& run, const WalkerOptions& walker = {});

/// Repeats `estimate` with doubling path counts, starting at run.n_paths,
/// until std_error <= rel_target * (|Omega| - value) or max_paths is reached.
/// For regular contents pass `deficit_of` returning the value itself.
Estimate estimate_adaptive(const std::function<Estimate(const RunOptions&)>& estimate,
                           const std::function<double(const Estimate&)>& deficit_of, RunOptions run,
                           double rel_target, std::uint64_t max_paths);

}  // namespace subheat
