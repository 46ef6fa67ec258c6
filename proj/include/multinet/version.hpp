#pragma once

namespace multinet {
inline constexpr const char* version = "0.1.0";
}
