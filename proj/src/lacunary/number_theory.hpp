#pragma once

#include <cstdint>
#include <vector>

namespace trotter::lacunary::detail {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);
bool is_prime(std::uint64_t n);
/// Prime factors of n with multiplicity, ascending.
std::vector<std::uint64_t> factor(std::uint64_t n);
/// Multiplicative order of 2 modulo an odd m >= 1 (1 for m == 1).
std::uint64_t order_of_two(std::uint64_t odd_modulus);

}  // namespace trotter::lacunary::detail
