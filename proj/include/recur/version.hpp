#pragma once

namespace recur {

inline constexpr const char* version = "0.1.0";

}
