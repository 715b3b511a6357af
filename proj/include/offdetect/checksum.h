#ifndef OFFDETECT_CHECKSUM_H_
#define OFFDETECT_CHECKSUM_H_

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace offdetect {

// 64-bit FNV-1a. Used for vocabulary fingerprints and model checksums.
inline uint64_t Fnv1a64(std::string_view data,
                        uint64_t hash = 0xcbf29ce484222325ULL) {
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

inline std::string Hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace offdetect

#endif  // OFFDETECT_CHECKSUM_H_
