#pragma once

#include <cstdint>
#include <random>

namespace censadd {

//! Uniform on [0, 1) from the top 53 bits; identical on every platform.
inline double
unit_uniform(std::mt19937_64& rng)
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

//! Engine for stream `stream` of master seed `seed`. Streams are independent
//! of the order in which they are created.
inline std::mt19937_64
stream_engine(std::uint64_t seed, std::uint64_t stream)
{
  std::seed_seq seq{ static_cast<std::uint32_t>(seed),
                     static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(stream),
                     static_cast<std::uint32_t>(stream >> 32) };
  return std::mt19937_64(seq);
}

} // namespace censadd
