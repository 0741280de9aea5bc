#include "blicket/digest.hpp"

#include <array>
#include <cstdio>

#include <openssl/sha.h>

namespace blicket {

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, SHA256_DIGEST_LENGTH> md{};
    SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), md.data());
    std::string out;
    out.reserve(md.size() * 2);
    char buf[3];
    for (unsigned char c : md) {
        std::snprintf(buf, sizeof buf, "%02x", c);
        out += buf;
    }
    return out;
}

}  // namespace blicket
