#include "agobf/rng.hpp"

#include <numeric>

namespace agobf {

std::vector<std::size_t> weighted_sample_without_replacement(std::span<const double> weights, std::size_t count,
                                                             Rng& rng) {
  std::vector<std::size_t> pool(weights.size());
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  std::vector<std::size_t> picked;
  picked.reserve(count);
  while (picked.size() < count && !pool.empty()) {
    double total = 0.0;
    for (std::size_t i : pool) total += weights[i];
    double target = uniform_unit(rng) * total;
    std::size_t slot = pool.size() - 1;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      target -= weights[pool[k]];
      if (target < 0.0) {
        slot = k;
        break;
      }
    }
    picked.push_back(pool[slot]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(slot));
  }
  return picked;
}

}  // namespace agobf
