#include "effortlab/format.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <system_error>

#include "effortlab/errors.hpp"

namespace effortlab {

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

double round_to(double value, int places) {
    double scale = std::pow(10.0, places);
    return std::round(value * scale) / scale;
}

std::string format_fixed(double value, int places) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", places, round_to(value, places));
    return std::string(buf);
}

double parse_double(std::string_view token, std::string_view what) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw ValidationError("not a number for " + std::string(what) + ": '" +
                              std::string(token) + "'");
    }
    return value;
}

} // namespace effortlab
