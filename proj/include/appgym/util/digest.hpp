#pragma once

#include <string>
#include <string_view>

namespace appgym {

// SHA-256 truncated to 128 bits, hex-encoded (32 chars).
std::string digest128_hex(std::string_view data);

}  // namespace appgym
