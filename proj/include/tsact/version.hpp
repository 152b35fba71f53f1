#pragma once

namespace tsact {

inline constexpr const char* kVersion = "0.1.0";

} // namespace tsact
