#pragma once

#include <array>
#include <span>
#include <string_view>

namespace testimation::detail {

struct FilterTaps {
    std::string_view name;
    std::span<const double> lowpass;
};

extern const std::array<FilterTaps, 15> k_filter_table;

}  // namespace testimation::detail
