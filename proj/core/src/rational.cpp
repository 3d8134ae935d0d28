// Copyright 2026 The Prism Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "prism/rational.hpp"

#include <charconv>
#include <numeric>

#include "prism/error.hpp"

namespace prism {
namespace {

__extension__ typedef __int128 i128;

Rational make(i128 num, i128 den) {
  if (den == 0) throw Error(ErrorCode::kDomainError, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 a = num < 0 ? -num : num;
  i128 b = den;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  constexpr i128 kMax = INT64_MAX;
  if (num > kMax || num < -kMax || den > kMax) {
    throw Error(ErrorCode::kDomainError, "rational overflow");
  }
  return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "bad number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(ErrorCode::kDomainError, "zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  num_ = num;
  den_ = den;
}

std::int64_t Rational::floor_times(std::int64_t n) const {
  i128 p = static_cast<i128>(num_) * n;
  i128 q = p / den_;
  if (p % den_ != 0 && p < 0) --q;
  return static_cast<std::int64_t>(q);
}

std::int64_t Rational::ceil_times(std::int64_t n) const {
  i128 p = static_cast<i128>(num_) * n;
  i128 q = p / den_;
  if (p % den_ != 0 && p > 0) ++q;
  return static_cast<std::int64_t>(q);
}

Rational Rational::operator+(const Rational& o) const {
  return make(static_cast<i128>(num_) * o.den_ + static_cast<i128>(o.num_) * den_,
              static_cast<i128>(den_) * o.den_);
}

Rational Rational::operator-(const Rational& o) const {
  return make(static_cast<i128>(num_) * o.den_ - static_cast<i128>(o.num_) * den_,
              static_cast<i128>(den_) * o.den_);
}

Rational Rational::operator*(const Rational& o) const {
  return make(static_cast<i128>(num_) * o.num_, static_cast<i128>(den_) * o.den_);
}

Rational Rational::operator/(const Rational& o) const {
  return make(static_cast<i128>(num_) * o.den_, static_cast<i128>(den_) * o.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  i128 l = static_cast<i128>(a.num_) * b.den_;
  i128 r = static_cast<i128>(b.num_) * a.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Rational Rational::parse(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    if (frac.size() > 15) throw Error(ErrorCode::kInvalidArgument, "too many decimals");
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    std::int64_t w = whole.empty() ? 0 : parse_int(whole);
    std::int64_t f = frac.empty() ? 0 : parse_int(frac);
    return Rational(w * den + f, den);
  }
  return Rational(parse_int(text), 1);
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

}  // namespace prism
