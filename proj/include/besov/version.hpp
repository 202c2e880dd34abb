#pragma once

namespace besov {

inline constexpr const char* kArtifactVersion = "besov-contract/0.1.0";

}  // namespace besov
