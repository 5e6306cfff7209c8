#pragma once

namespace agetrace {

inline constexpr const char* kToolkitVersion = "1.0.0";

} // namespace agetrace
