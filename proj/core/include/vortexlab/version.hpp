/// @file version.hpp
/// @brief Library version constants.

#pragma once

namespace vtx {

inline constexpr int kVersionMajor = 1;
inline constexpr int kVersionMinor = 0;
inline constexpr int kVersionPatch = 0;
inline constexpr const char* kVersionString = "1.0.0";

}  // namespace vtx
