#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lsamarl::train {

struct AdvantageBuffer {
  std::vector<double> deltas;      // TD residuals
  std::vector<double> advantages;  // A_t
  std::vector<double> returns;     // value targets A_t + V_old(o_t)
};

/// GAE over one trajectory of length T. `values` holds V(o_0..o_{T-1}) and
/// `bootstrap` is V(o_T). dones[t] = 1 cuts both the bootstrap and the
/// advantage recursion after step t.
AdvantageBuffer compute_gae(std::span<const double> rewards, std::span<const double> values,
                            std::span<const double> dones, double bootstrap, double gamma, double lambda);

// Throws std::logic_error unless returns - (advantages + values) == 0 for every
// entry. Returns the number of entries checked.
std::size_t verify_return_identity(const AdvantageBuffer& buf, std::span<const double> values);

}  // namespace lsamarl::train
