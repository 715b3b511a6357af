#include <charconv>
#include <filesystem>
#include <fstream>

#include "offdetect/error.h"
#include "offdetect/normalize.h"
#include "offdetect/text.h"
#include "offdetect/utf8.h"

namespace offdetect {

namespace {

std::string_view Trim(std::string_view s) {
  auto space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && space(s.front())) s.remove_prefix(1);
  while (!s.empty() && space(s.back())) s.remove_suffix(1);
  return s;
}

[[noreturn]] void Bad(const std::string& path, size_t line,
                      const std::string& what) {
  throw Error(ErrorKind::kInvalidResource,
              path + ":" + std::to_string(line) + ": " + what);
}

// Calls fn(line_no, line) for each non-blank line.
template <typename Fn>
void ForEachLine(const std::string& path, Fn fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open resource file " + path);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    fn(line_no, std::string_view(line));
  }
}

template <typename Map>
Map LoadPairs(const std::string& path) {
  Map map;
  ForEachLine(path, [&](size_t n, std::string_view line) {
    const size_t tab = line.find('\t');
    if (tab == std::string_view::npos) Bad(path, n, "expected key<TAB>value");
    const auto key = Trim(line.substr(0, tab));
    const auto value = Trim(line.substr(tab + 1));
    if (key.empty() || value.empty()) Bad(path, n, "empty key or value");
    if (!map.emplace(std::string(key), std::string(value)).second) {
      Bad(path, n, "duplicate key '" + std::string(key) + "'");
    }
  });
  return map;
}

bool AnyOf(std::string_view s, bool (*pred)(char32_t)) {
  for (char32_t cp : utf8::Decode(s)) {
    if (pred(cp)) return true;
  }
  return false;
}

bool AllOf(std::string_view s, bool (*pred)(char32_t)) {
  for (char32_t cp : utf8::Decode(s)) {
    if (!pred(cp)) return false;
  }
  return true;
}

bool IsWordChar(char32_t cp) {
  return text::IsLetter(cp) || text::IsArabicMark(cp);
}

bool IsLetterOrSpace(char32_t cp) {
  return text::IsLetter(cp) || text::IsWhitespace(cp);
}

[[noreturn]] void Invalid(const std::string& what) {
  throw Error(ErrorKind::kInvalidResource, what);
}

}  // namespace

EmojiMap LoadEmojiMap(const std::string& path) {
  EmojiMap map;
  ForEachLine(path, [&](size_t n, std::string_view line) {
    const size_t tab = line.find('\t');
    if (tab == std::string_view::npos) Bad(path, n, "expected hex<TAB>text");
    std::u32string key;
    auto hex = Trim(line.substr(0, tab));
    while (!hex.empty()) {
      const size_t end = std::min(hex.find(' '), hex.size());
      uint32_t cp = 0;
      const auto part = hex.substr(0, end);
      const auto [ptr, ec] =
          std::from_chars(part.data(), part.data() + part.size(), cp, 16);
      if (ec != std::errc() || ptr != part.data() + part.size() ||
          cp > 0x10FFFF) {
        Bad(path, n, "bad codepoint '" + std::string(part) + "'");
      }
      key.push_back(static_cast<char32_t>(cp));
      hex = Trim(hex.substr(end));
    }
    const auto value = Trim(line.substr(tab + 1));
    if (key.empty() || value.empty()) Bad(path, n, "empty key or value");
    if (!map.emplace(std::move(key), std::string(value)).second) {
      Bad(path, n, "duplicate emoji sequence");
    }
  });
  return map;
}

EmoticonMap LoadEmoticonMap(const std::string& path) {
  return LoadPairs<EmoticonMap>(path);
}

DialectLexicon LoadDialectLexicon(const std::string& path) {
  return LoadPairs<DialectLexicon>(path);
}

StopwordSet LoadStopwords(const std::string& path) {
  StopwordSet words;
  ForEachLine(path, [&](size_t, std::string_view line) {
    words.emplace(Trim(line));
  });
  return words;
}

std::vector<std::string> LoadSymbolBlacklist(const std::string& path) {
  std::vector<std::string> symbols;
  ForEachLine(path, [&](size_t n, std::string_view line) {
    const auto sym = std::string(Trim(line));
    if (std::find(symbols.begin(), symbols.end(), sym) != symbols.end()) {
      Bad(path, n, "duplicate symbol '" + sym + "'");
    }
    symbols.push_back(sym);
  });
  return symbols;
}

void NormalizerResources::Validate() const {
  for (const auto& [key, value] : emoji_map) {
    const std::string k = utf8::Encode(key);
    if (key.empty() || value.empty()) Invalid("empty emoji entry");
    for (char32_t cp : key) {
      if (IsLetterOrSpace(cp)) {
        Invalid("emoji key '" + k + "' contains a letter or space");
      }
    }
  }
  for (const auto& [key, value] : emoticon_map) {
    if (key.empty() || value.empty()) Invalid("empty emoticon entry");
    if (AnyOf(key, text::IsWhitespace)) {
      Invalid("emoticon '" + key + "' contains whitespace");
    }
    if (AnyOf(key, text::IsArabicLetter)) {
      Invalid("emoticon '" + key + "' contains Arabic letters");
    }
    // A letters-only emoticon ("XD") could be re-created from normalized
    // output and would break idempotence.
    if (AllOf(key, text::IsLetter)) {
      Invalid("emoticon '" + key + "' needs at least one non-letter");
    }
  }
  for (const auto& [key, value] : dialect_lexicon) {
    if (key.empty() || value.empty() || !AllOf(key, IsWordChar) ||
        !AllOf(value, IsWordChar)) {
      Invalid("dialect entry '" + key + "' -> '" + value +
              "' must map one letter-only token to another");
    }
    for (const auto& sym : symbol_blacklist) {
      if (value.find(sym) != std::string::npos) {
        Invalid("dialect value '" + value + "' contains blacklisted '" + sym +
                "'");
      }
    }
  }
  for (const auto& w : stopwords) {
    if (w.empty() || AnyOf(w, text::IsWhitespace)) {
      Invalid("stopword '" + w + "' is empty or contains whitespace");
    }
  }
  for (const auto& sym : symbol_blacklist) {
    if (sym.empty() || AnyOf(sym, text::IsWhitespace)) {
      Invalid("blacklist symbol '" + sym + "' is empty or has whitespace");
    }
    if (AnyOf(sym, text::IsArabicLetter) || AnyOf(sym, text::IsArabicMark)) {
      Invalid("blacklist symbol '" + sym +
              "' contains Arabic letters; use the stopword list instead");
    }
    const auto cps = utf8::Decode(sym);
    for (size_t i = 1; i < cps.size(); ++i) {
      if (cps[i] == cps[i - 1] && text::IsLetter(cps[i])) {
        Invalid("blacklist symbol '" + sym + "' has a doubled letter");
      }
    }
  }
}

NormalizerResources NormalizerResources::LoadDirectory(const std::string& dir) {
  namespace fs = std::filesystem;
  auto path = [&](std::string_view name) {
    return (fs::path(dir) / std::string(name)).string();
  };
  NormalizerResources res;
  res.emoji_map = LoadEmojiMap(path(kEmojiFile));
  res.emoticon_map = LoadEmoticonMap(path(kEmoticonFile));
  res.dialect_lexicon = LoadDialectLexicon(path(kDialectFile));
  res.stopwords = LoadStopwords(path(kStopwordFile));
  res.symbol_blacklist = LoadSymbolBlacklist(path(kSymbolFile));
  res.Validate();
  return res;
}

}  // namespace offdetect
