#pragma once

#include <cstddef>
#include <span>

#include <boost/multiprecision/cpp_int.hpp>

namespace deskzone {

using BigInt = boost::multiprecision::cpp_int;

BigInt factorial(std::size_t k);

/// Ways to split `occupants` into `zones` interchangeable groups of equal size:
/// I! / ((m!)^n * n!). Throws InputError unless zones divides occupants.
BigInt count_layouts(std::size_t occupants, std::size_t zones);

/// Distinguishable zones with the given sizes: I! / prod(m_z!).
BigInt count_layouts_distinct(std::span<const std::size_t> zone_sizes);

}  // namespace deskzone
