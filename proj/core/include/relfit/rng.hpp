#pragma once

#include "relfit/types.hpp"

#include <cstdint>
#include <random>

namespace relfit {

using Rng = std::mt19937_64;

// SplitMix64 step; also used as the seed mixing function.
std::uint64_t splitmix64_next(std::uint64_t& state);

// Derives an independent stream seed from (base, stream, index).
// Trial i of a run seeded with s draws from derive_seed(s + i, stream).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream = 0, std::uint64_t index = 0);

Rng make_rng(std::uint64_t seed);

// One standard normal draw via a 256-layer ziggurat. Noticeably faster than
// std::normal_distribution; Gibbs sampling spends most of its time here.
double standard_normal(Rng& rng);

double uniform01(Rng& rng);

// Fills an n x d matrix with iid standard normal entries (column-major order).
Matrix standard_normal_matrix(Rng& rng, Index n, Index d);

void fill_standard_normal(Rng& rng, Eigen::Ref<Matrix> out);

}  // namespace relfit
