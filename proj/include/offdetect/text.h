#ifndef OFFDETECT_TEXT_H_
#define OFFDETECT_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

// Codepoint classes shared by the normalizer and the feature extractor.
namespace offdetect::text {

bool IsWhitespace(char32_t cp);
bool IsAsciiLetter(char32_t cp);
// Base letters of the Arabic block (hamza through yeh plus the extended
// letters), excluding tatweel and combining marks.
bool IsArabicLetter(char32_t cp);
// Tashkeel and Quranic annotation marks.
bool IsArabicMark(char32_t cp);
inline bool IsLetter(char32_t cp) {
  return IsAsciiLetter(cp) || IsArabicLetter(cp);
}
// ASCII, Arabic-Indic and Extended Arabic-Indic digits.
bool IsDigit(char32_t cp);
// Pictographic emoji codepoints (the things that get a description).
bool IsEmojiPictograph(char32_t cp);
// Joiners, variation selectors, keycap, tag and skin-tone modifiers.
bool IsEmojiComponent(char32_t cp);
// Invisible formatting characters: tatweel, zero-width and bidi controls.
bool IsFormatChar(char32_t cp);

// Splits on runs of Unicode whitespace; never yields empty tokens.
std::vector<std::string> Tokenize(std::string_view utf8_text);
std::string Join(const std::vector<std::string>& tokens);

}  // namespace offdetect::text

#endif  // OFFDETECT_TEXT_H_
