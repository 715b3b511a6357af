#ifndef OFFDETECT_NORMALIZE_H_
#define OFFDETECT_NORMALIZE_H_

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace offdetect {

// Keys are emoji codepoint sequences, values Arabic description phrases.
using EmojiMap = std::map<std::u32string, std::string, std::less<>>;
using EmoticonMap = std::map<std::string, std::string, std::less<>>;
using DialectLexicon = std::map<std::string, std::string, std::less<>>;
using StopwordSet = std::set<std::string, std::less<>>;

// Bundled and user-supplied lookup tables. File formats (UTF-8):
//   emoji.tsv      hex codepoints separated by spaces <TAB> description
//   emoticons.tsv  emoticon <TAB> description
//   dialect.tsv    dialect token <TAB> MSA token
//   stopwords.txt  one token per line
//   symbols.txt    one literal per line
struct NormalizerResources {
  EmojiMap emoji_map;
  EmoticonMap emoticon_map;
  DialectLexicon dialect_lexicon;
  StopwordSet stopwords;
  std::vector<std::string> symbol_blacklist;

  // Throws InvalidResource naming the offending entry.
  void Validate() const;

  static constexpr std::string_view kEmojiFile = "emoji.tsv";
  static constexpr std::string_view kEmoticonFile = "emoticons.tsv";
  static constexpr std::string_view kDialectFile = "dialect.tsv";
  static constexpr std::string_view kStopwordFile = "stopwords.txt";
  static constexpr std::string_view kSymbolFile = "symbols.txt";

  // Loads all five files from `dir` and validates them. A missing file is
  // an IoError naming the path.
  static NormalizerResources LoadDirectory(const std::string& dir);
};

EmojiMap LoadEmojiMap(const std::string& path);
EmoticonMap LoadEmoticonMap(const std::string& path);
DialectLexicon LoadDialectLexicon(const std::string& path);
StopwordSet LoadStopwords(const std::string& path);
std::vector<std::string> LoadSymbolBlacklist(const std::string& path);

// Pipeline steps, declared in canonical execution order. Tokenization and
// the final single-space rejoin always run.
enum class Step {
  kEmoticons,
  kEmojis,
  kHashtags,
  kStripNoise,
  kLetters,
  kDiacritics,
  kRepeats,
  kDialect,
  kStopwords,
};

constexpr std::array<Step, 9> kCanonicalSteps = {
    Step::kEmoticons, Step::kEmojis,  Step::kHashtags,
    Step::kStripNoise, Step::kLetters, Step::kDiacritics,
    Step::kRepeats,   Step::kDialect, Step::kStopwords};

std::string_view StepName(Step step);
std::optional<Step> ParseStep(std::string_view name);
// Comma-separated step names; order in the list is irrelevant, execution
// always follows the canonical order. Throws InvalidArgument.
std::vector<Step> ParseStepList(std::string_view list);

struct LetterOptions {
  char32_t yeh_target = U'ي';          // ى ئ ي  -> ي
  char32_t teh_marbuta_target = U'ه';  // ة -> ه
};

struct NormalizerConfig {
  std::vector<Step> enabled_steps{kCanonicalSteps.begin(),
                                  kCanonicalSteps.end()};
  NormalizerResources resources;
  LetterOptions letters;
  bool delete_unmapped_emoji = true;

  // Steps must be a duplicate-free subsequence of kCanonicalSteps.
  void Validate() const;
  bool Enabled(Step step) const;
};

// Individual steps. All are total functions over arbitrary UTF-8 input.

// Longest match at each position; descriptions are separated from adjacent
// text by single spaces. Unmapped pictographs are dropped (leaving a word
// break) when `delete_unmapped` is set; stray emoji components always are.
std::string ConvertEmojis(std::string_view text, const EmojiMap& map,
                          bool delete_unmapped = true);

// Whitespace-delimited tokens equal to a key are replaced. A token made of
// several adjacent emoticons is split greedily, longest key first; tokens
// that cannot be fully decomposed are left alone.
std::string ConvertEmoticons(std::string_view text, const EmoticonMap& map);

std::vector<std::string> NormalizeDialect(const std::vector<std::string>& tokens,
                                          const DialectLexicon& lexicon);
std::string NormalizeLetters(std::string_view text,
                             const LetterOptions& options = {});
std::string ReduceRepeats(std::string_view text);
std::string SegmentHashtags(std::string_view text);

// Removes HTML tags, blacklist literals and digits, turns any other
// non-letter symbol into a word break, collapses whitespace and trims.
// Tashkeel survives (it is RemoveDiacritics' job) but is transparent when
// matching blacklist literals.
std::string StripNoise(std::string_view text,
                       const std::vector<std::string>& blacklist);
std::string RemoveDiacritics(std::string_view text);
std::vector<std::string> RemoveStopwords(const std::vector<std::string>& tokens,
                                         const StopwordSet& stopwords);

// Applies the enabled steps of a validated config. Lexicon keys, values
// and stopwords are brought into the same letter/diacritic/repeat form as
// the text before lookup, and dialect chains are resolved, so the full
// pipeline is idempotent.
class Normalizer {
 public:
  explicit Normalizer(NormalizerConfig config);

  std::string Normalize(std::string_view text) const;

  const NormalizerConfig& config() const { return config_; }
  const DialectLexicon& prepared_lexicon() const { return lexicon_; }
  const StopwordSet& prepared_stopwords() const { return stopwords_; }

  // Character-level steps (letters, diacritics, repeats) as enabled.
  std::string NormalizeToken(std::string_view token) const;

 private:
  NormalizerConfig config_;
  DialectLexicon lexicon_;
  StopwordSet stopwords_;
};

std::string Normalize(std::string_view text, const NormalizerConfig& config);

}  // namespace offdetect

#endif  // OFFDETECT_NORMALIZE_H_
