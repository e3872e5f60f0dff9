#pragma once

#include <cstdint>
#include <random>

#include "tiltcert/symmat.hpp"

namespace tiltcert {

using Rng = std::mt19937_64;

/// Independent sub-seed for (seed, index), so parallel or reordered work stays reproducible.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

Vec random_normal(Rng& rng, int n);
Vec random_unit(Rng& rng, int n);
Mat random_orthogonal(Rng& rng, int n);
SymMatrix random_symmetric(Rng& rng, int n);
double uniform(Rng& rng, double lo, double hi);

}  // namespace tiltcert
