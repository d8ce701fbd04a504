#pragma once

/// \file random.hpp
/// Counter-based Philox4x32-10 generator and normal variates derived from it.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace smolyak {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

  static Key key_from_seed(std::uint64_t seed) {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// A reproducible stream of standard normals addressed by
/// (seed, domain, group, sample). Variate n depends only on these and n.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint32_t domain, std::uint32_t group, std::uint32_t sample)
      : key_(Philox4x32::key_from_seed(seed)), domain_(domain), group_(group), sample_(sample) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const auto r = Philox4x32::block({block_++, sample_, group_, domain_}, key_);
    const double u1 = to_unit(r[0], r[1]);
    const double u2 = to_unit(r[2], r[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  /// 53-bit uniform in (0, 1].
  static double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
  }

 private:
  Philox4x32::Key key_;
  std::uint32_t domain_, group_, sample_;
  std::uint32_t block_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Derives an independent 64-bit seed for replication r of a study.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint32_t replication) {
  const auto r = Philox4x32::block({replication, 0u, 0u, 0xC0FFEEu}, Philox4x32::key_from_seed(master));
  return (std::uint64_t{r[0]} << 32) | r[1];
}

}  // namespace smolyak
