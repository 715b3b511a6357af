#include "offdetect/normalize.h"

#include <algorithm>

#include "offdetect/error.h"
#include "offdetect/text.h"
#include "offdetect/utf8.h"

namespace offdetect {

namespace {

bool EndsWithSpace(const std::string& s) {
  return s.empty() || s.back() == ' ' || s.back() == '\t' || s.back() == '\n';
}

// Greedy longest-first split of `token` into emoticon keys.
std::optional<std::vector<std::string_view>> SplitEmoticons(
    std::string_view token, const EmoticonMap& map, size_t max_key) {
  std::vector<std::string_view> parts;
  size_t pos = 0;
  while (pos < token.size()) {
    size_t len = std::min(max_key, token.size() - pos);
    for (; len > 0; --len) {
      if (map.find(token.substr(pos, len)) != map.end()) break;
    }
    if (len == 0) return std::nullopt;
    parts.push_back(token.substr(pos, len));
    pos += len;
  }
  return parts;
}

size_t MatchTransparent(const std::u32string& s, size_t start,
                        const std::u32string& literal) {
  size_t p = start;
  for (size_t k = 0; k < literal.size(); ++k) {
    if (k > 0) {
      while (p < s.size() && text::IsArabicMark(s[p])) ++p;
    }
    if (p >= s.size() || s[p] != literal[k]) return 0;
    ++p;
  }
  return p - start;
}

std::u32string RemoveTags(const std::u32string& s) {
  std::u32string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == U'<') {
      const size_t close = s.find(U'>', i + 1);
      if (close != std::u32string::npos) {
        out.push_back(U' ');
        i = close;
        continue;
      }
    }
    out.push_back(s[i]);
  }
  return out;
}

std::u32string RemoveLiterals(const std::u32string& s,
                              const std::vector<std::u32string>& literals) {
  if (literals.empty()) return s;
  std::u32string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size();) {
    size_t matched = 0;
    if (!text::IsArabicMark(s[i])) {
      for (const auto& lit : literals) {
        matched = MatchTransparent(s, i, lit);
        if (matched > 0) break;
      }
    }
    if (matched > 0) {
      out.push_back(U' ');
      i += matched;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

std::u32string FilterSymbols(const std::u32string& s) {
  std::u32string out;
  out.reserve(s.size());
  for (char32_t cp : s) {
    if (text::IsLetter(cp) || text::IsArabicMark(cp) ||
        text::IsWhitespace(cp)) {
      out.push_back(cp);
    } else if (text::IsDigit(cp) || text::IsFormatChar(cp) ||
               text::IsEmojiComponent(cp)) {
      continue;
    } else {
      out.push_back(U' ');
    }
  }
  return out;
}

std::string CollapseWhitespace(const std::u32string& s) {
  std::string out;
  bool pending = false;
  for (char32_t cp : s) {
    if (text::IsWhitespace(cp)) {
      pending = true;
      continue;
    }
    if (pending && !out.empty()) out.push_back(' ');
    pending = false;
    utf8::Append(cp, &out);
  }
  return out;
}

}  // namespace

std::string_view StepName(Step step) {
  switch (step) {
    case Step::kEmoticons: return "emoticons";
    case Step::kEmojis: return "emojis";
    case Step::kHashtags: return "hashtags";
    case Step::kStripNoise: return "strip";
    case Step::kLetters: return "letters";
    case Step::kDiacritics: return "diacritics";
    case Step::kRepeats: return "repeats";
    case Step::kDialect: return "dialect";
    case Step::kStopwords: return "stopwords";
  }
  return "?";
}

std::optional<Step> ParseStep(std::string_view name) {
  for (Step s : kCanonicalSteps) {
    if (StepName(s) == name) return s;
  }
  return std::nullopt;
}

std::vector<Step> ParseStepList(std::string_view list) {
  std::vector<Step> steps;
  if (list == "all") return {kCanonicalSteps.begin(), kCanonicalSteps.end()};
  if (list == "none" || list.empty()) return steps;
  size_t start = 0;
  while (start <= list.size()) {
    const size_t comma = std::min(list.find(',', start), list.size());
    const auto name = list.substr(start, comma - start);
    const auto step = ParseStep(name);
    if (!step) {
      throw Error(ErrorKind::kInvalidArgument,
                  "unknown normalization step '" + std::string(name) + "'");
    }
    if (std::find(steps.begin(), steps.end(), *step) != steps.end()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "duplicate step '" + std::string(name) + "'");
    }
    steps.push_back(*step);
    start = comma + 1;
  }
  std::sort(steps.begin(), steps.end());
  return steps;
}

void NormalizerConfig::Validate() const {
  size_t next = 0;
  for (Step s : enabled_steps) {
    const auto pos = static_cast<size_t>(s);
    if (pos < next) {
      throw Error(ErrorKind::kInvalidArgument,
                  "step '" + std::string(StepName(s)) +
                      "' is duplicated or out of canonical order");
    }
    next = pos + 1;
  }
  resources.Validate();
}

bool NormalizerConfig::Enabled(Step step) const {
  return std::find(enabled_steps.begin(), enabled_steps.end(), step) !=
         enabled_steps.end();
}

std::string ConvertEmojis(std::string_view text, const EmojiMap& map,
                          bool delete_unmapped) {
  size_t max_key = 0;
  for (const auto& [k, v] : map) max_key = std::max(max_key, k.size());

  const std::u32string in = utf8::Decode(text);
  std::string out;
  out.reserve(text.size());
  bool pending_break = false;
  for (size_t i = 0; i < in.size();) {
    const char32_t cp = in[i];
    if (!text::IsLetter(cp) && !text::IsWhitespace(cp) && max_key > 0) {
      const std::u32string_view rest(in.data() + i, in.size() - i);
      size_t len = std::min(max_key, rest.size());
      EmojiMap::const_iterator hit = map.end();
      for (; len > 0; --len) {
        hit = map.find(rest.substr(0, len));
        if (hit != map.end()) break;
      }
      if (len > 0) {
        if (!EndsWithSpace(out)) out.push_back(' ');
        out += hit->second;
        pending_break = true;
        i += len;
        continue;
      }
    }
    if (text::IsEmojiComponent(cp)) {
      ++i;
      continue;
    }
    if (delete_unmapped && text::IsEmojiPictograph(cp)) {
      pending_break = true;
      ++i;
      continue;
    }
    if (pending_break && !text::IsWhitespace(cp) && !EndsWithSpace(out)) {
      out.push_back(' ');
    }
    pending_break = false;
    utf8::Append(cp, &out);
    ++i;
  }
  return out;
}

std::string ConvertEmoticons(std::string_view text, const EmoticonMap& map) {
  size_t max_key = 0;
  for (const auto& [k, v] : map) max_key = std::max(max_key, k.size());
  if (max_key == 0) return std::string(text);

  // Tokens are delimited by ASCII whitespace.
  auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
           c == '\f';
  };
  std::string out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    if (is_space(text[i])) {
      out.push_back(text[i++]);
      continue;
    }
    size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    const auto token = text.substr(i, j - i);
    if (auto parts = SplitEmoticons(token, map, max_key)) {
      for (size_t k = 0; k < parts->size(); ++k) {
        if (k > 0) out.push_back(' ');
        out += map.find((*parts)[k])->second;
      }
    } else {
      out += token;
    }
    i = j;
  }
  return out;
}

std::vector<std::string> NormalizeDialect(const std::vector<std::string>& tokens,
                                          const DialectLexicon& lexicon) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    const auto it = lexicon.find(t);
    out.push_back(it == lexicon.end() ? t : it->second);
  }
  return out;
}

std::string NormalizeLetters(std::string_view text,
                             const LetterOptions& options) {
  std::u32string s = utf8::Decode(text);
  for (char32_t& cp : s) {
    switch (cp) {
      case U'أ': case U'آ': case U'إ':
        cp = U'ا';
        break;
      case U'ى': case U'ئ': case U'ي':
        cp = options.yeh_target;
        break;
      case U'ة':
        cp = options.teh_marbuta_target;
        break;
      default:
        break;
    }
  }
  return utf8::Encode(s);
}

std::string ReduceRepeats(std::string_view text) {
  const std::u32string s = utf8::Decode(text);
  std::u32string out;
  out.reserve(s.size());
  size_t run = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    run = (i > 0 && s[i] == s[i - 1]) ? run + 1 : 1;
    if (run > 2 && text::IsLetter(s[i])) continue;
    out.push_back(s[i]);
  }
  return utf8::Encode(out);
}

std::string SegmentHashtags(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == '#') continue;
    out.push_back(c == '_' ? ' ' : c);
  }
  return out;
}

std::string StripNoise(std::string_view text,
                       const std::vector<std::string>& blacklist) {
  std::vector<std::u32string> literals;
  for (const auto& b : blacklist) {
    if (!b.empty()) literals.push_back(utf8::Decode(b));
  }
  std::stable_sort(literals.begin(), literals.end(),
                   [](const auto& a, const auto& b) {
                     return a.size() > b.size();
                   });

  // Deleting digits or tatweel can join fragments into a new tag or
  // literal, so the rules run until nothing changes.
  std::u32string s = utf8::Decode(text);
  for (;;) {
    std::u32string next = FilterSymbols(RemoveLiterals(RemoveTags(s), literals));
    if (next == s) break;
    s = std::move(next);
  }
  return CollapseWhitespace(s);
}

std::string RemoveDiacritics(std::string_view text) {
  std::u32string s = utf8::Decode(text);
  std::erase_if(s, [](char32_t cp) { return text::IsArabicMark(cp); });
  return utf8::Encode(s);
}

std::vector<std::string> RemoveStopwords(const std::vector<std::string>& tokens,
                                         const StopwordSet& stopwords) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (stopwords.find(t) == stopwords.end()) out.push_back(t);
  }
  return out;
}

Normalizer::Normalizer(NormalizerConfig config) : config_(std::move(config)) {
  config_.Validate();
  const auto& res = config_.resources;
  if (config_.Enabled(Step::kDialect)) {
    DialectLexicon normalized;
    for (const auto& [k, v] : res.dialect_lexicon) {
      auto key = NormalizeToken(k);
      auto value = NormalizeToken(v);
      if (key.empty() || value.empty() || key == value) continue;
      normalized.emplace(std::move(key), std::move(value));
    }
    // Resolve chains a -> b -> c so that a single lookup reaches a token
    // that is not itself a key.
    for (const auto& [k, v] : normalized) {
      std::string target = v;
      std::set<std::string> seen = {k};
      for (auto it = normalized.find(target); it != normalized.end();
           it = normalized.find(target)) {
        if (!seen.insert(target).second) {
          throw Error(ErrorKind::kInvalidResource,
                      "dialect lexicon has a cycle through '" + k + "'");
        }
        target = it->second;
      }
      if (target != k) lexicon_.emplace(k, std::move(target));
    }
  }
  if (config_.Enabled(Step::kStopwords)) {
    for (const auto& w : res.stopwords) {
      auto t = NormalizeToken(w);
      if (!t.empty()) stopwords_.insert(std::move(t));
    }
  }
}

std::string Normalizer::NormalizeToken(std::string_view token) const {
  std::string s(token);
  if (config_.Enabled(Step::kLetters)) s = NormalizeLetters(s, config_.letters);
  if (config_.Enabled(Step::kDiacritics)) s = RemoveDiacritics(s);
  if (config_.Enabled(Step::kRepeats)) s = ReduceRepeats(s);
  return s;
}

std::string Normalizer::Normalize(std::string_view text) const {
  const auto& res = config_.resources;
  std::string s(text);
  if (config_.Enabled(Step::kEmoticons)) {
    s = ConvertEmoticons(s, res.emoticon_map);
  }
  if (config_.Enabled(Step::kEmojis)) {
    s = ConvertEmojis(s, res.emoji_map, config_.delete_unmapped_emoji);
  }
  if (config_.Enabled(Step::kHashtags)) s = SegmentHashtags(s);
  if (config_.Enabled(Step::kStripNoise)) {
    s = StripNoise(s, res.symbol_blacklist);
  }
  s = NormalizeToken(s);

  auto tokens = text::Tokenize(s);
  if (config_.Enabled(Step::kDialect)) tokens = NormalizeDialect(tokens, lexicon_);
  if (config_.Enabled(Step::kStopwords)) {
    tokens = RemoveStopwords(tokens, stopwords_);
  }
  return text::Join(tokens);
}

std::string Normalize(std::string_view text, const NormalizerConfig& config) {
  return Normalizer(config).Normalize(text);
}

}  // namespace offdetect
