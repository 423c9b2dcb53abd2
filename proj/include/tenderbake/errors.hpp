#pragma once

#include <stdexcept>
#include <string>

namespace tenderbake {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

class InsufficientChain : public Error {
 public:
  using Error::Error;
};

class LevelMismatch : public Error {
 public:
  using Error::Error;
};

class HashMismatch : public Error {
 public:
  using Error::Error;
};

class ClockBeforeLevelStart : public Error {
 public:
  using Error::Error;
};

class MalformedPoc : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Raised when an adversary strategy tries to emit a signature it cannot own.
class HarnessBug : public Error {
 public:
  using Error::Error;
};

}  // namespace tenderbake
