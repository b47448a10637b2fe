// Copyright (c) 2026 spadfab developers.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "spadfab/errors.hpp"

namespace spadfab {

/// Exact signed rational with 64-bit numerator/denominator.
///
/// Neuron weights and thresholds are rationals so that the threshold
/// comparison sum(w_j x_j) >= theta is decided exactly; only the sign of
/// the difference matters and floating point would blur the boundary.
class Rational {
public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value), den_(1) {}

  Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw InvalidSpec("rational with zero denominator");
    normalize();
  }

  constexpr std::int64_t num() const { return num_; }
  constexpr std::int64_t den() const { return den_; }

  Rational operator+(const Rational& o) const {
    __int128 n = static_cast<__int128>(num_) * o.den_ +
                 static_cast<__int128>(o.num_) * den_;
    __int128 d = static_cast<__int128>(den_) * o.den_;
    return from_wide(n, d);
  }

  Rational operator-(const Rational& o) const {
    __int128 n = static_cast<__int128>(num_) * o.den_ -
                 static_cast<__int128>(o.num_) * den_;
    __int128 d = static_cast<__int128>(den_) * o.den_;
    return from_wide(n, d);
  }

  bool operator>=(const Rational& o) const {
    // den_ > 0 always, so the cross product preserves the comparison
    return static_cast<__int128>(num_) * o.den_ >=
           static_cast<__int128>(o.num_) * den_;
  }

  bool operator==(const Rational& o) const {
    return num_ == o.num_ && den_ == o.den_;
  }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Parse "3", "-2", "3/4", "0.25", "-1.5". Decimal literals convert exactly.
  static Rational parse(const std::string& text) {
    const auto bad = [&] {
      return ParseError("invalid rational '" + text + "'", 0, text);
    };
    if (text.empty()) throw bad();
    auto slash = text.find('/');
    try {
      if (slash != std::string::npos) {
        std::size_t p1 = 0, p2 = 0;
        std::int64_t n = std::stoll(text.substr(0, slash), &p1);
        std::int64_t d = std::stoll(text.substr(slash + 1), &p2);
        if (p1 != slash || p2 != text.size() - slash - 1) throw bad();
        return Rational(n, d);
      }
      auto dot = text.find('.');
      if (dot == std::string::npos) {
        std::size_t p = 0;
        std::int64_t n = std::stoll(text, &p);
        if (p != text.size()) throw bad();
        return Rational(n);
      }
      std::string digits = text.substr(0, dot) + text.substr(dot + 1);
      std::size_t frac_len = text.size() - dot - 1;
      if (frac_len == 0 || frac_len > 18) throw bad();
      std::size_t p = 0;
      std::int64_t n = std::stoll(digits, &p);
      if (p != digits.size()) throw bad();
      std::int64_t d = 1;
      for (std::size_t i = 0; i < frac_len; ++i) d *= 10;
      return Rational(n, d);
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception&) {
      throw bad();
    }
  }

private:
  static Rational from_wide(__int128 n, __int128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 g = gcd_wide(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    constexpr __int128 lo = INT64_MIN, hi = INT64_MAX;
    if (n < lo || n > hi || d > hi)
      throw InvalidSpec("rational arithmetic overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }

  static __int128 gcd_wide(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace spadfab
