#ifndef OFFDETECT_UTF8_H_
#define OFFDETECT_UTF8_H_

#include <string>
#include <string_view>

namespace offdetect::utf8 {

constexpr char32_t kReplacement = 0xFFFD;

// Invalid or truncated sequences decode to U+FFFD, one per offending byte.
std::u32string Decode(std::string_view bytes);

std::string Encode(std::u32string_view text);
void Append(char32_t cp, std::string* out);

}  // namespace offdetect::utf8

#endif  // OFFDETECT_UTF8_H_
