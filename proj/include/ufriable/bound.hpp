#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace uf {

using BigInt = boost::multiprecision::cpp_int;

// A real argument x >= 0 as consumed by the counting functions: counts are
// step functions of x, so only floor(x) matters there, while the saddle-point
// machinery only needs log x. Both are fixed once at construction.
class CountBound {
 public:
  CountBound() = default;

  // Accepts "2520", "1e6", "2.5e3", "1000000.5", and the log-space literal
  // "e^30" (meaning exp(30)). Parsing is done in 100-digit binary floating
  // point, so floor(e^k) is exact for every k a count can reach.
  static CountBound parse(std::string_view text);
  static CountBound from_integer(const BigInt& n);
  static CountBound from_double(double x);
  static CountBound from_log(double log_x);

  const BigInt& floor() const { return floor_; }
  // Natural log of x; -inf when x == 0.
  double log() const { return log_; }
  double approx() const;
  // Canonical text, round-trips through parse() to the same floor and log.
  const std::string& text() const { return text_; }

  // floor(x / d) and log(x / d) for a positive integer d.
  CountBound divided_by(std::uint64_t d) const;

 private:
  BigInt floor_{0};
  double log_{0.0};
  std::string text_{"0"};
};

}  // namespace uf
