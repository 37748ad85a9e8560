#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qvir/errors.hpp"
#include "qvir/half_integer.hpp"

namespace qvir::fock {

enum class Sector { NS, R };

inline std::string sector_name(Sector s) { return s == Sector::NS ? "NS" : "R"; }

inline Sector parse_sector(const std::string& s) {
  if (s == "ns" || s == "NS") return Sector::NS;
  if (s == "r" || s == "R") return Sector::R;
  throw config_error("unknown sector '" + s + "'");
}

// Occupation slot i holds mode i+1/2 (NS) or i (R).
inline HalfInteger slot_mode(Sector s, int slot) {
  return s == Sector::NS ? HalfInteger::from_twice(2 * slot + 1) : HalfInteger(slot);
}

inline int mode_slot(Sector s, HalfInteger m) {
  HalfInteger a = m.abs();
  if (s == Sector::NS) {
    if (a.is_integer()) throw parity_error("NS modes are half-odd-integers, got " + m.to_string());
    return (a.twice() - 1) / 2;
  }
  if (!a.is_integer()) throw parity_error("R modes are integers, got " + m.to_string());
  return a.as_int();
}

inline constexpr int kMaxSlots = 64;

// Set of occupied modes, stored as a bitmask over slots.
struct FockState {
  Sector sector = Sector::NS;
  std::uint64_t mask = 0;

  HalfInteger level() const {
    int twice = 0;
    for (std::uint64_t m = mask; m; m &= m - 1) {
      int slot = std::countr_zero(m);
      twice += sector == Sector::NS ? 2 * slot + 1 : 2 * slot;
    }
    return HalfInteger::from_twice(twice);
  }

  // Strictly decreasing.
  std::vector<HalfInteger> occupied() const {
    std::vector<HalfInteger> out;
    for (int slot = kMaxSlots - 1; slot >= 0; --slot)
      if (mask >> slot & 1U) out.push_back(slot_mode(sector, slot));
    return out;
  }

  std::string to_string() const {
    std::string s = "|";
    bool first = true;
    for (auto m : occupied()) {
      if (!first) s += ",";
      s += m.to_string();
      first = false;
    }
    return s + ">" + (sector == Sector::NS ? "_NS" : "_R");
  }

  friend bool operator==(const FockState&, const FockState&) = default;
};

// Lexicographic comparison of the decreasing occupied sequences.
inline bool occupied_less(const FockState& a, const FockState& b) {
  auto oa = a.occupied(), ob = b.occupied();
  return std::lexicographical_compare(oa.begin(), oa.end(), ob.begin(), ob.end());
}

// Result of one fermion mode acting on a basis state.
struct ModeAction {
  std::uint64_t mask = 0;
  int sign = 1;
  bool contraction = false;  // annihilation of a nonzero mode
};

// Wedge action of psi_m. Creation (m<0) inserts |m|, annihilation (m>0)
// removes m, both with sign (-1)^{#occupied > |m|}; annihilation also
// carries the contraction factor. psi_0 toggles the zero mode with the same
// sign rule and factor 1.
inline std::optional<ModeAction> psi_action(Sector sector, HalfInteger m, std::uint64_t mask) {
  const int slot = mode_slot(sector, m);
  if (slot >= kMaxSlots) throw std::out_of_range("mode beyond occupation mask: " + m.to_string());
  const std::uint64_t bit = std::uint64_t{1} << slot;
  const std::uint64_t above = slot + 1 >= kMaxSlots ? 0 : mask >> (slot + 1);
  const int sign = (std::popcount(above) % 2) ? -1 : 1;
  const bool occupied = (mask & bit) != 0;
  if (m.twice() < 0) {
    if (occupied) return std::nullopt;
    return ModeAction{mask | bit, sign, false};
  }
  if (m.twice() > 0) {
    if (!occupied) return std::nullopt;
    return ModeAction{mask & ~bit, sign, true};
  }
  return ModeAction{mask ^ bit, sign, false};
}

// Index set with a level for each basis element; shared by operators.
class GradedBasis {
 public:
  virtual ~GradedBasis() = default;
  std::size_t dim() const { return levels_.size(); }
  HalfInteger level(std::size_t i) const { return levels_[i]; }
  const std::vector<HalfInteger>& levels() const { return levels_; }
  HalfInteger cutoff() const { return cutoff_; }
  virtual std::string describe(std::size_t i) const = 0;
  virtual std::string label() const = 0;

 protected:
  std::vector<HalfInteger> levels_;
  HalfInteger cutoff_;
};

class FockSpace : public GradedBasis {
 public:
  // All occupation sets of level <= cutoff, ordered by level then
  // lexicographically on the occupied modes.
  static std::shared_ptr<const FockSpace> enumerate(Sector sector, HalfInteger cutoff) {
    if (cutoff < HalfInteger(0)) throw config_error("cutoff must be nonnegative");
    auto sp = std::shared_ptr<FockSpace>(new FockSpace());
    sp->sector_ = sector;
    sp->cutoff_ = cutoff;
    std::vector<int> slot_twice;
    for (int slot = 0; slot < kMaxSlots; ++slot) {
      int t = slot_mode(sector, slot).twice();
      if (t > cutoff.twice()) break;
      slot_twice.push_back(t);
    }
    if (!slot_twice.empty() && slot_twice.size() == kMaxSlots) throw config_error("cutoff too large for occupation mask");
    std::vector<FockState> states;
    std::function<void(std::size_t, std::uint64_t, int)> rec = [&](std::size_t i, std::uint64_t mask, int twice) {
      if (i == slot_twice.size()) {
        states.push_back(FockState{sector, mask});
        return;
      }
      rec(i + 1, mask, twice);
      if (twice + slot_twice[i] <= cutoff.twice()) rec(i + 1, mask | (std::uint64_t{1} << i), twice + slot_twice[i]);
    };
    rec(0, 0, 0);
    std::sort(states.begin(), states.end(), [](const FockState& a, const FockState& b) {
      auto la = a.level(), lb = b.level();
      if (la != lb) return la < lb;
      return occupied_less(a, b);
    });
    for (const auto& s : states) {
      sp->index_.emplace(s.mask, static_cast<std::uint32_t>(sp->states_.size()));
      sp->states_.push_back(s);
      sp->levels_.push_back(s.level());
    }
    return sp;
  }

  Sector sector() const { return sector_; }
  const FockState& state(std::size_t i) const { return states_[i]; }
  const std::vector<FockState>& states() const { return states_; }

  std::optional<std::uint32_t> index_of(std::uint64_t mask) const {
    auto it = index_.find(mask);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::string describe(std::size_t i) const override { return states_[i].to_string(); }
  std::string label() const override { return sector_name(sector_) + " Fock space, cutoff " + cutoff_.to_string(); }

  // Modes m of this sector with |m| <= bound.
  std::vector<HalfInteger> modes_up_to(HalfInteger bound) const { return sector_modes(sector_, bound); }

  static std::vector<HalfInteger> sector_modes(Sector sector, HalfInteger bound) {
    std::vector<HalfInteger> out;
    for (int t = -bound.twice(); t <= bound.twice(); ++t) {
      HalfInteger m = HalfInteger::from_twice(t);
      bool ok = sector == Sector::NS ? !m.is_integer() : m.is_integer();
      if (ok) out.push_back(m);
    }
    return out;
  }

 private:
  FockSpace() = default;
  Sector sector_ = Sector::NS;
  std::vector<FockState> states_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
};

}  // namespace qvir::fock
