#pragma once

namespace convwave {

inline constexpr const char* kVersion = "0.1.0";

}
