#pragma once

#include <cstdint>
#include <string>

namespace icmt {

// FIPS 180-4 SHA-256, returned as a 64-char lowercase hex digest.
// Used for prompt cache keys; kept local to avoid a crypto dependency.
std::string sha256_hex(const std::string& data);

}  // namespace icmt
