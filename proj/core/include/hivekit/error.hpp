#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hivekit {

/// Base class for every error raised by the framework.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration text. Carries the 1-based line number.
class ConfigSyntaxError : public Error {
 public:
  ConfigSyntaxError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A value violates a documented invariant (config, command, model, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class RegistryError : public Error {
 public:
  using Error::Error;
};

/// Raised by an environment whose episode is over, or was never started.
class EpisodeError : public Error {
 public:
  using Error::Error;
};

class ConnectionError : public Error {
 public:
  using Error::Error;
};

class TimeoutError : public ConnectionError {
 public:
  using ConnectionError::ConnectionError;
};

/// Peer sent something that does not follow the wire/console protocol.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// The remote side answered with an ERROR frame.
class RemoteError : public Error {
 public:
  RemoteError(std::uint16_t code, const std::string& what)
      : Error(what), code_(code) {}
  std::uint16_t code() const noexcept { return code_; }

 private:
  std::uint16_t code_;
};

class DatasetError : public Error {
 public:
  using Error::Error;
};

}  // namespace hivekit
