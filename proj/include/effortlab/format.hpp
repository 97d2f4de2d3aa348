#pragma once

#include <string>

namespace effortlab {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// Fixed-point form with `places` decimals, rounded half away from zero.
std::string format_fixed(double value, int places);

/// Round half away from zero at `places` decimals. Display-side only; the
/// result is never fed back into aggregates.
double round_to(double value, int places);

/// Strict double parse of a whole token. Throws ValidationError on junk.
double parse_double(std::string_view token, std::string_view what);

} // namespace effortlab
