#include "deskzone/count.hpp"

#include "deskzone/error.hpp"

namespace deskzone {

BigInt factorial(std::size_t k) {
  BigInt f = 1;
  for (std::size_t i = 2; i <= k; ++i) f *= i;
  return f;
}

BigInt count_layouts(std::size_t occupants, std::size_t zones) {
  if (zones == 0) throw InputError("zone count must be positive");
  if (occupants % zones != 0)
    throw InputError(std::to_string(zones) + " zones do not divide " + std::to_string(occupants) + " occupants");
  const std::size_t m = occupants / zones;
  BigInt denom = factorial(zones);
  const BigInt mf = factorial(m);
  for (std::size_t z = 0; z < zones; ++z) denom *= mf;
  return factorial(occupants) / denom;
}

BigInt count_layouts_distinct(std::span<const std::size_t> zone_sizes) {
  std::size_t total = 0;
  BigInt denom = 1;
  for (auto s : zone_sizes) {
    total += s;
    denom *= factorial(s);
  }
  return factorial(total) / denom;
}

}  // namespace deskzone
