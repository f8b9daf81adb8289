#pragma once
#include <cstddef>
#include <vector>

namespace polsim {

enum class TraceChannel { I90, I0, I45m, Replica };

/// Uniformly sampled photocurrent record. Currents in A, nonnegative after
/// APD clipping; immutable once produced.
struct PhotocurrentTrace {
  TraceChannel channel{TraceChannel::I90};
  double t0_ns{0.0};
  double sample_interval_ns{1.0};
  std::vector<double> current_a;

  std::size_t size() const { return current_a.size(); }
  double time_ns(std::size_t k) const { return t0_ns + k * sample_interval_ns; }
};

}  // namespace polsim
