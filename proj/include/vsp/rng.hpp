#pragma once

// Counter-based agent selection. Draw t of stream s under seed k is a pure
// function of (k, s, t), so trajectories are bit-reproducible on any
// platform and independent of how samples are spread over threads.

#include <array>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "vsp/errors.hpp"

namespace vsp {

/// Philox4x32-10 block function (Salmon et al., SC'11), Random123 constants.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t mult0 = 0xD2511F53u;
  static constexpr std::uint32_t mult1 = 0xCD9E8D57u;
  static constexpr std::uint32_t weyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t weyl1 = 0xBB67AE85u;
  static constexpr int rounds = 10;

  static constexpr Counter block(Counter ctr, Key key) {
    for (int r = 0; r < rounds; ++r) {
      if (r > 0) {
        key[0] += weyl0;
        key[1] += weyl1;
      }
      const std::uint64_t p0 = std::uint64_t{mult0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{mult1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }
};

/// Uniform agent in [0, n) for epoch t of (seed, stream). Lemire's
/// multiply-shift with rejection keeps the draw exactly uniform; rejected
/// words fall through to the next word of the block, then to re-keyed
/// blocks.
inline int uniform_agent(std::uint64_t seed, std::uint64_t stream, std::uint64_t epoch, int n) {
  const auto range = static_cast<std::uint32_t>(n);
  const std::uint32_t threshold = static_cast<std::uint32_t>(-range) % range;
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(epoch), static_cast<std::uint32_t>(epoch >> 32),
                                static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  for (std::uint32_t attempt = 0;; ++attempt) {
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed) ^ attempt, static_cast<std::uint32_t>(seed >> 32)};
    for (std::uint32_t word : Philox4x32::block(ctr, key)) {
      const std::uint64_t m = std::uint64_t{word} * range;
      if (static_cast<std::uint32_t>(m) >= threshold) return static_cast<int>(m >> 32);
    }
  }
}

/// Who moves at each epoch: an explicit finite list, or a seeded uniform
/// stream.
class AgentSequence {
 public:
  struct Seeded {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
  };

  static AgentSequence explicit_list(std::vector<int> agents) { return AgentSequence(std::move(agents)); }
  static AgentSequence seeded(std::uint64_t seed, std::uint64_t stream) { return AgentSequence(Seeded{seed, stream}); }

  bool is_explicit() const { return std::holds_alternative<std::vector<int>>(kind_); }
  const std::vector<int>& agents() const { return std::get<std::vector<int>>(kind_); }

  void validate(int n) const {
    if (!is_explicit()) return;
    for (int a : agents())
      if (a < 0 || a >= n) throw ValidationError("agent " + std::to_string(a + 1) + " is outside 1.." + std::to_string(n));
  }

  /// The agent chosen at epoch t; empty once an explicit list runs out.
  std::optional<int> at(long t, int n) const {
    if (auto* list = std::get_if<std::vector<int>>(&kind_)) {
      if (t < 0 || static_cast<std::size_t>(t) >= list->size()) return std::nullopt;
      return (*list)[static_cast<std::size_t>(t)];
    }
    const auto& s = std::get<Seeded>(kind_);
    return uniform_agent(s.seed, s.stream, static_cast<std::uint64_t>(t), n);
  }

 private:
  explicit AgentSequence(std::vector<int> a) : kind_(std::move(a)) {}
  explicit AgentSequence(Seeded s) : kind_(s) {}
  std::variant<std::vector<int>, Seeded> kind_;
};

}  // namespace vsp
