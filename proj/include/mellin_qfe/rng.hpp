#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace mellin_qfe {

//! SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z)
{
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum class StreamRole : std::uint64_t
{
  Signal = 1,
  Error = 2
};

//! Counter-based generator: draw i of a stream is mix64(key + i * gamma),
//! so every (seed, n, replicate, role) substream is independent of the order
//! in which replicates are processed. Uniforms and normals are produced
//! without std:: distributions so results are identical across platforms.
class CounterRng
{
public:
  CounterRng(std::uint64_t seed, std::uint64_t n, std::uint64_t replicate,
             StreamRole role)
    : key_(derive_key(seed, n, replicate, role))
  {
  }

  explicit CounterRng(std::uint64_t key)
    : key_(key)
  {
  }

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t n,
                                  std::uint64_t replicate, StreamRole role)
  {
    std::uint64_t k = mix64(seed);
    k = mix64(k ^ n);
    k = mix64(k ^ replicate);
    k = mix64(k ^ static_cast<std::uint64_t>(role));
    return k;
  }

  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64()
  {
    ++counter_;
    return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
  }

  //! Uniform on the open interval (0, 1).
  double uniform()
  {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  //! Standard normal via Box-Muller; the second variate is cached.
  double normal()
  {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace mellin_qfe
