// Error types shared by all afb modules.
#pragma once

#include <stdexcept>
#include <string>

namespace afb {

/// Invalid configuration value (bad parameter, mismatched sample rates).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument to an operation (out-of-range probe, empty collection).
class ArgumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed file in an unsupported encoding (wrong rate/channels/bits).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Corrupt or truncated file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Corpus problem: missing word directory or too few files for a quota.
class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss; carries the offending epoch.
class TrainingDivergedError : public std::runtime_error {
 public:
  TrainingDivergedError(const std::string& msg, int epoch)
      : std::runtime_error(msg), epoch_(epoch) {}
  int epoch() const { return epoch_; }

 private:
  int epoch_;
};

}  // namespace afb
