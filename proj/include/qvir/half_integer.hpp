#pragma once

#include <compare>
#include <cstdlib>
#include <functional>
#include <ostream>
#include <string>

#include <gmpxx.h>

#include "qvir/errors.hpp"

namespace qvir {

// Element of (1/2)Z, stored as twice its value.
class HalfInteger {
 public:
  constexpr HalfInteger() = default;
  constexpr explicit HalfInteger(int n) : twice_(2 * n) {}

  static constexpr HalfInteger from_twice(int t) {
    HalfInteger h;
    h.twice_ = t;
    return h;
  }

  // Accepts "3", "-5/2", "2.5".
  static HalfInteger parse(const std::string& s) {
    auto bad = [&] { return config_error("not a half-integer: '" + s + "'"); };
    if (s.empty()) throw bad();
    std::size_t pos = 0;
    try {
      if (auto slash = s.find('/'); slash != std::string::npos) {
        int num = std::stoi(s.substr(0, slash), &pos);
        if (pos != slash) throw bad();
        if (s.substr(slash + 1) != "2") throw bad();
        return from_twice(num);
      }
      if (auto dot = s.find('.'); dot != std::string::npos) {
        std::string frac = s.substr(dot + 1);
        std::string whole = s.substr(0, dot);
        bool neg = !whole.empty() && whole[0] == '-';
        int w = (whole.empty() || whole == "-") ? 0 : std::stoi(whole, &pos);
        if (frac == "0") return HalfInteger(w);
        if (frac != "5") throw bad();
        return from_twice(2 * w + (neg ? -1 : 1));
      }
      int n = std::stoi(s, &pos);
      if (pos != s.size()) throw bad();
      return HalfInteger(n);
    } catch (const std::logic_error&) {
      throw bad();
    }
  }

  constexpr int twice() const { return twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }
  // Requires is_integer().
  constexpr int as_int() const { return twice_ / 2; }
  // Largest integer <= value.
  constexpr int floor() const { return twice_ >= 0 ? twice_ / 2 : -((-twice_ + 1) / 2); }
  constexpr HalfInteger abs() const { return from_twice(twice_ < 0 ? -twice_ : twice_); }

  mpq_class to_mpq() const {
    mpq_class q(twice_, 2);
    q.canonicalize();
    return q;
  }

  std::string to_string() const {
    if (is_integer()) return std::to_string(twice_ / 2);
    return std::to_string(twice_) + "/2";
  }

  constexpr HalfInteger operator-() const { return from_twice(-twice_); }
  constexpr HalfInteger& operator+=(HalfInteger o) { twice_ += o.twice_; return *this; }
  constexpr HalfInteger& operator-=(HalfInteger o) { twice_ -= o.twice_; return *this; }
  friend constexpr HalfInteger operator+(HalfInteger a, HalfInteger b) { return a += b; }
  friend constexpr HalfInteger operator-(HalfInteger a, HalfInteger b) { return a -= b; }
  friend constexpr HalfInteger operator+(HalfInteger a, int b) { return a + HalfInteger(b); }
  friend constexpr HalfInteger operator-(HalfInteger a, int b) { return a - HalfInteger(b); }
  friend constexpr auto operator<=>(HalfInteger, HalfInteger) = default;
  friend constexpr bool operator==(HalfInteger, HalfInteger) = default;
  friend std::ostream& operator<<(std::ostream& os, HalfInteger h) { return os << h.to_string(); }

 private:
  int twice_ = 0;
};

constexpr HalfInteger max(HalfInteger a, HalfInteger b) { return a < b ? b : a; }
constexpr HalfInteger min(HalfInteger a, HalfInteger b) { return a < b ? a : b; }

}  // namespace qvir

template <>
struct std::hash<qvir::HalfInteger> {
  std::size_t operator()(qvir::HalfInteger h) const noexcept { return std::hash<int>()(h.twice()); }
};
