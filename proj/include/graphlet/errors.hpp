#ifndef GRAPHLET_ERRORS_HPP
#define GRAPHLET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace graphlet {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad inputs: wrong shapes, invalid parameters, malformed files.
// The CLI maps these to exit code 2.
struct InvalidInput : Error {
  using Error::Error;
};

// Failures that happen while computing on valid inputs.
// The CLI maps these to exit code 3.
struct RuntimeFailure : Error {
  using Error::Error;
};

struct AsymmetricInput : InvalidInput {
  using InvalidInput::InvalidInput;
};
struct IsolatedNode : InvalidInput {
  using InvalidInput::InvalidInput;
};
struct DimensionMismatch : InvalidInput {
  using InvalidInput::InvalidInput;
};
struct NegativeArgument : InvalidInput {
  using InvalidInput::InvalidInput;
};
struct DegenerateSpectrum : InvalidInput {
  using InvalidInput::InvalidInput;
};
struct DegenerateSeries : InvalidInput {
  using InvalidInput::InvalidInput;
};
struct InadmissibleCoefficients : InvalidInput {
  using InvalidInput::InvalidInput;
};
struct TooFewTranslates : InvalidInput {
  using InvalidInput::InvalidInput;
};
struct NonpositiveLambdaMax : InvalidInput {
  using InvalidInput::InvalidInput;
};
struct EmptyEvalPoints : InvalidInput {
  using InvalidInput::InvalidInput;
};
struct SpectrumExceedsCalibration : InvalidInput {
  using InvalidInput::InvalidInput;
};
struct KTooLarge : InvalidInput {
  using InvalidInput::InvalidInput;
};
struct KOutOfRange : InvalidInput {
  using InvalidInput::InvalidInput;
};
struct TooManyComponents : InvalidInput {
  using InvalidInput::InvalidInput;
};
struct FoldTooSmall : InvalidInput {
  using InvalidInput::InvalidInput;
};
struct CsvParseError : InvalidInput {
  using InvalidInput::InvalidInput;
};
struct FileError : InvalidInput {
  using InvalidInput::InvalidInput;
};
struct ConfigError : InvalidInput {
  using InvalidInput::InvalidInput;
};
struct DisconnectedAtAnyThreshold : InvalidInput {
  using InvalidInput::InvalidInput;
};

struct ConvergenceFailure : RuntimeFailure {
  using RuntimeFailure::RuntimeFailure;
};
struct ConnectivityFailure : RuntimeFailure {
  using RuntimeFailure::RuntimeFailure;
};
struct NotTight : RuntimeFailure {
  using RuntimeFailure::RuntimeFailure;
};

}  // namespace graphlet

#endif  // GRAPHLET_ERRORS_HPP
