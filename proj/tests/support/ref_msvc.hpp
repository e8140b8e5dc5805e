#pragma once

#include <cstdint>

// Closed-form oracle for the msvcrt rand() sequence: computes the k-th
// state directly from the affine map x -> a*x + c (mod 2^32) raised to the
// k-th power, an algebraically independent route from limb-by-limb
// iteration.
namespace refmsvc {

// State after k steps from the given seed.
std::uint32_t state_after(std::uint32_t seed, std::uint64_t k);

// k-th rand() output (k >= 1) for the given seed.
int output_at(std::uint32_t seed, std::uint64_t k);

}  // namespace refmsvc
