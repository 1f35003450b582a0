#include "appgym/util/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <stdexcept>

namespace appgym {

std::string digest128_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(),
                 nullptr) != 1 ||
      len < 16) {
    throw std::runtime_error("digest128_hex: EVP_Digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(32, '0');
  for (int i = 0; i < 16; ++i) {
    out[2 * i] = kHex[md[i] >> 4];
    out[2 * i + 1] = kHex[md[i] & 0xf];
  }
  return out;
}

}  // namespace appgym
