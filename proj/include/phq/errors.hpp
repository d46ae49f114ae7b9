#pragma once

#include <stdexcept>
#include <string>

namespace phq {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Audio decoding
struct DecodeError : Error { using Error::Error; };
struct UnsupportedFormatError : Error { using Error::Error; };
struct EmptyInputError : Error { using Error::Error; };
struct InsufficientAudioError : Error { using Error::Error; };

// Tabular / numeric data
struct FormatError : Error { using Error::Error; };
struct ShapeError : Error { using Error::Error; };
struct DataError : Error { using Error::Error; };
struct InsufficientDataError : Error { using Error::Error; };

// Pipeline
struct ConfigError : Error { using Error::Error; };
struct FoldError : Error { using Error::Error; };
struct LeakageError : Error { using Error::Error; };

struct TrainingError : Error {
    TrainingError(const std::string& msg, int epoch_index)
        : Error(msg), epoch(epoch_index) {}
    int epoch;
};

} // namespace phq
