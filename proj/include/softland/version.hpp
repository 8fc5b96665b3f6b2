#pragma once

namespace softland {
inline constexpr const char* kVersion = "0.1.0";
}
