#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace vsp {

/// Maximum population the bitset representation supports.
inline constexpr int max_agents = 64;

/// Subset of {0, ..., n-1}, stored as a bitmask in agent order. Agent 0 is
/// the initially infected agent "1" of the external numbering.
class AgentSet {
 public:
  constexpr AgentSet() = default;
  constexpr explicit AgentSet(std::uint64_t mask) : mask_(mask) {}

  static constexpr AgentSet single(int agent) { return AgentSet(std::uint64_t{1} << agent); }
  static constexpr AgentSet first_n(int n) {
    return AgentSet(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
  }

  constexpr bool contains(int agent) const { return (mask_ >> agent) & 1u; }
  constexpr void insert(int agent) { mask_ |= std::uint64_t{1} << agent; }
  constexpr void erase(int agent) { mask_ &= ~(std::uint64_t{1} << agent); }
  constexpr int size() const { return std::popcount(mask_); }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr std::uint64_t mask() const { return mask_; }

  constexpr bool includes(AgentSet other) const { return (mask_ & other.mask_) == other.mask_; }

  constexpr AgentSet operator|(AgentSet o) const { return AgentSet(mask_ | o.mask_); }
  constexpr AgentSet operator&(AgentSet o) const { return AgentSet(mask_ & o.mask_); }
  constexpr AgentSet operator-(AgentSet o) const { return AgentSet(mask_ & ~o.mask_); }
  constexpr AgentSet& operator|=(AgentSet o) {
    mask_ |= o.mask_;
    return *this;
  }
  constexpr auto operator<=>(const AgentSet&) const = default;

  /// 0-based members in increasing order.
  std::vector<int> members() const {
    std::vector<int> out;
    for (std::uint64_t m = mask_; m != 0; m &= m - 1) out.push_back(std::countr_zero(m));
    return out;
  }

  /// 1-based member list, the external convention.
  std::vector<int> external() const {
    std::vector<int> out = members();
    for (int& a : out) ++a;
    return out;
  }

  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for (int a : external()) {
      if (!first) s += ",";
      s += std::to_string(a);
      first = false;
    }
    return s + "}";
  }

 private:
  std::uint64_t mask_ = 0;
};

}  // namespace vsp
