#pragma once

#include <string_view>

namespace injectbench {

inline constexpr std::string_view kHarnessVersion = "0.1.0";

}  // namespace injectbench
