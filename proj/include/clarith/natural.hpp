#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <string>
#include <string_view>

namespace clarith {

using Natural = boost::multiprecision::cpp_int;

// Binary constants. The empty string denotes 0; leading zeros are tolerated on input.
Natural parse_constant(std::string_view bits);

// Canonical binary: no leading zeros, "0" for zero.
std::string to_binary(const Natural& n);

// |n|: length of the canonical binary form, so |0| = 1.
std::size_t size_of(const Natural& n);

// Bit y of x, bit 0 least significant.
bool bit(const Natural& y, const Natural& x);

// True for "", "0" and strings of the form 1(0|1)*.
bool is_canonical_numer(std::string_view bits);

// True iff s is a prefix of some canonical numer.
bool is_numer_prefix(std::string_view s);

// Natural -> size_t with saturation, for indices and loop bounds.
std::size_t clamp_to_size(const Natural& n);

}  // namespace clarith
