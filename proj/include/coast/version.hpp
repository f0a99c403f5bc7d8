#pragma once

namespace coast {

inline constexpr const char* kVersion = "0.1.0";

}
