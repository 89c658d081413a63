#pragma once

#include <stdexcept>
#include <string>

namespace cyclemine {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// core_model
struct DimensionMismatch : Error { using Error::Error; };
struct NonFiniteValue : Error { using Error::Error; };
struct EmptySequence : Error { using Error::Error; };
struct InvalidInterval : Error { using Error::Error; };

// tokenizer
struct TooFewFrames : Error { using Error::Error; };

// period estimation
struct SequenceTooShort : Error { using Error::Error; };
struct NoPeriodicity : Error { using Error::Error; };
struct EmptySegment : Error { using Error::Error; };
struct DegeneratePartition : Error { using Error::Error; };

// alignment
struct EmptyTranscript : Error { using Error::Error; };
struct TooManySequences : Error { using Error::Error; };
struct MatrixTooLarge : Error { using Error::Error; };

// mining
struct WindowTooLarge : Error { using Error::Error; };
struct DegenerateAlignment : Error { using Error::Error; };

// streaming tasks
struct NoOpenPeriod : Error { using Error::Error; };

// metrics
struct LengthMismatch : Error { using Error::Error; };
struct InvalidGroundTruth : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };

// data generation
struct CentroidRejectionExhausted : Error { using Error::Error; };

// io
struct ParseError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

} // namespace cyclemine
