#pragma once

namespace dperc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dperc
