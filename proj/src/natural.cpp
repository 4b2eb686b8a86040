#include "clarith/natural.hpp"

#include <limits>
#include <stdexcept>

namespace clarith {

Natural parse_constant(std::string_view bits) {
  Natural n = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("not a binary constant: " + std::string(bits));
    n <<= 1;
    if (c == '1') n |= 1;
  }
  return n;
}

std::string to_binary(const Natural& n) {
  if (n == 0) return "0";
  std::string out;
  Natural v = n;
  while (v > 0) {
    out.push_back((v & 1) == 1 ? '1' : '0');
    v >>= 1;
  }
  return std::string(out.rbegin(), out.rend());
}

std::size_t size_of(const Natural& n) {
  if (n == 0) return 1;
  return static_cast<std::size_t>(boost::multiprecision::msb(n)) + 1;
}

bool bit(const Natural& y, const Natural& x) {
  if (y >= Natural(std::numeric_limits<unsigned>::max())) return false;
  return boost::multiprecision::bit_test(x, static_cast<unsigned>(y));
}

bool is_canonical_numer(std::string_view bits) {
  for (char c : bits)
    if (c != '0' && c != '1') return false;
  if (bits.size() <= 1) return true;
  return bits.front() == '1';
}

bool is_numer_prefix(std::string_view s) { return is_canonical_numer(s); }

std::size_t clamp_to_size(const Natural& n) {
  if (n > Natural(std::numeric_limits<std::size_t>::max())) return std::numeric_limits<std::size_t>::max();
  return static_cast<std::size_t>(n);
}

}  // namespace clarith
