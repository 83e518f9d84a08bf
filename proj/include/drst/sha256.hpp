#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace drst {

// Plain SHA-256, used for payload and schema digests. Self-contained so the
// registry has no crypto-library dependency.
std::string sha256_hex(std::string_view data);

}  // namespace drst
