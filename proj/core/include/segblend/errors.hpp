#pragma once

#include <stdexcept>
#include <string>

namespace segblend {

// Root of every error the library throws. Callers that only need a
// diagnostic can catch this; the subclasses let tests and the CLI tell
// failure kinds apart.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Level or container text with the wrong shape (ragged rows, empty input,
// truncated records).
class FormatError : public Error {
 public:
  using Error::Error;
};

// A tile character outside the bound game's vocabulary.
class VocabularyError : public Error {
 public:
  using Error::Error;
};

class ExtractionError : public Error {
 public:
  using Error::Error;
};

// Malformed label or annotation records.
class AnnotationError : public Error {
 public:
  using Error::Error;
};

// Segment shapes, label widths or tensor dimensions that do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace segblend
