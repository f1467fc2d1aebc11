#include "ufriable/bound.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "ufriable/errors.hpp"

namespace uf {

namespace {

using Float100 = boost::multiprecision::cpp_bin_float_100;

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string shortest(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

BigInt floor_of(const Float100& v) {
  return boost::multiprecision::floor(v).convert_to<BigInt>();
}

}  // namespace

CountBound CountBound::parse(std::string_view raw) {
  const std::string s = trim(raw);
  if (s.empty()) throw InvalidArgument("empty value for x");
  if (s.size() > 2 && s[0] == 'e' && s[1] == '^') {
    double k = 0.0;
    std::size_t used = 0;
    try {
      k = std::stod(s.substr(2), &used);
    } catch (const std::exception&) {
      throw InvalidArgument("malformed log-space literal '" + s + "'");
    }
    if (used != s.size() - 2 || !std::isfinite(k))
      throw InvalidArgument("malformed log-space literal '" + s + "'");
    CountBound b = from_log(k);
    b.text_ = s;
    return b;
  }
  for (char c : s) {
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' || c == 'E' ||
          c == '+' || c == '-'))
      throw InvalidArgument("malformed number '" + s + "'");
  }
  Float100 v;
  try {
    v = Float100(s);
  } catch (const std::exception&) {
    throw InvalidArgument("malformed number '" + s + "'");
  }
  if (v < 0) throw DomainError("x must be nonnegative, got " + s);
  CountBound b;
  b.floor_ = floor_of(v);
  b.log_ = v == 0 ? -std::numeric_limits<double>::infinity()
                  : static_cast<double>(boost::multiprecision::log(v));
  b.text_ = s;
  return b;
}

CountBound CountBound::from_integer(const BigInt& n) {
  if (n < 0) throw DomainError("x must be nonnegative");
  CountBound b;
  b.floor_ = n;
  b.log_ = n == 0 ? -std::numeric_limits<double>::infinity()
                  : static_cast<double>(boost::multiprecision::log(Float100(n)));
  b.text_ = n.str();
  return b;
}

CountBound CountBound::from_double(double x) {
  if (std::isnan(x) || std::isinf(x)) throw InvalidArgument("x must be finite");
  if (x < 0) throw DomainError("x must be nonnegative");
  CountBound b;
  b.floor_ = floor_of(Float100(x));
  b.log_ = std::log(x);
  b.text_ = shortest(x);
  return b;
}

CountBound CountBound::from_log(double log_x) {
  if (!std::isfinite(log_x)) throw InvalidArgument("log x must be finite");
  CountBound b;
  b.floor_ = floor_of(boost::multiprecision::exp(Float100(log_x)));
  b.log_ = log_x;
  b.text_ = "e^" + shortest(log_x);
  return b;
}

double CountBound::approx() const { return std::exp(log_); }

CountBound CountBound::divided_by(std::uint64_t d) const {
  if (d == 0) throw InvalidArgument("division of x by zero");
  CountBound b;
  b.floor_ = floor_ / d;
  b.log_ = log_ - std::log(static_cast<double>(d));
  b.text_ = "(" + text_ + ")/" + std::to_string(d);
  return b;
}

}  // namespace uf
