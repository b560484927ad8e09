#pragma once

namespace beamfe {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace beamfe
