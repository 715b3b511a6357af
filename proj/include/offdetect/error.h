#ifndef OFFDETECT_ERROR_H_
#define OFFDETECT_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace offdetect {

enum class ErrorKind {
  kIo,
  kMalformedRow,
  kUnknownLabel,
  kEmptyDataset,
  kClassTooSmall,
  kInvalidArgument,
  kInvalidResource,
  kEmptyCorpus,
  kSingleClass,
  kDimMismatch,
  kAllZero,
  kEmptyEnsemble,
  kUnsupportedVersion,
  kCorruptModel,
  kLengthMismatch,
  kFingerprintMismatch,
};

std::string_view ErrorKindName(ErrorKind kind);

// All library failures surface as this exception; `kind()` lets callers
// (the CLI in particular) map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const { return kind_; }
  // Message without the kind prefix.
  const std::string& detail() const { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace offdetect

#endif  // OFFDETECT_ERROR_H_
