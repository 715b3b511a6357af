#include "offdetect/error.h"

namespace offdetect {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo: return "IoError";
    case ErrorKind::kMalformedRow: return "MalformedRow";
    case ErrorKind::kUnknownLabel: return "UnknownLabel";
    case ErrorKind::kEmptyDataset: return "EmptyDataset";
    case ErrorKind::kClassTooSmall: return "ClassTooSmall";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kInvalidResource: return "InvalidResource";
    case ErrorKind::kEmptyCorpus: return "EmptyCorpus";
    case ErrorKind::kSingleClass: return "SingleClass";
    case ErrorKind::kDimMismatch: return "DimMismatch";
    case ErrorKind::kAllZero: return "AllZero";
    case ErrorKind::kEmptyEnsemble: return "EmptyEnsemble";
    case ErrorKind::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorKind::kCorruptModel: return "CorruptModel";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kFingerprintMismatch: return "FingerprintMismatch";
  }
  return "Error";
}

}  // namespace offdetect
