#pragma once

#include <stdexcept>
#include <string>

namespace veritab {

// Base class for everything this library throws on contract violations.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeMismatch : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct AllMasked : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct NotADistribution : Error { using Error::Error; };
struct NoRecordedForward : Error { using Error::Error; };
struct NonFiniteGradient : Error { using Error::Error; };
struct BudgetExceeded : Error { using Error::Error; };
struct NoEvidence : Error { using Error::Error; };
struct UnknownLabel : Error { using Error::Error; };
struct FileNotFound : Error { using Error::Error; };
struct EmptyDataset : Error { using Error::Error; };
struct ConflictingCell : Error { using Error::Error; };

}  // namespace veritab
