#ifndef RETINT_ERROR_HPP
#define RETINT_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace retint {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A value lies outside the domain of an operation (e.g. a non-positive price).
class DomainError : public Error {
public:
  DomainError(const std::string &what, std::size_t index)
      : Error(what + " (index " + std::to_string(index) + ")"), index_(index) {}

  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

/// The series carries no variation to normalize by.
class DegenerateSeriesError : public Error {
public:
  using Error::Error;
};

class InsufficientEventsError : public Error {
public:
  InsufficientEventsError(double q, std::size_t event_count)
      : Error("threshold q=" + std::to_string(q) + " yields " +
              std::to_string(event_count) +
              " event(s); at least 2 are required"),
        q_(q), event_count_(event_count) {}

  double q() const noexcept { return q_; }
  std::size_t event_count() const noexcept { return event_count_; }

private:
  double q_;
  std::size_t event_count_;
};

class InsufficientSessionsError : public Error {
public:
  explicit InsufficientSessionsError(std::size_t sessions)
      : Error("intraday pattern needs at least 2 sessions, got " +
              std::to_string(sessions)),
        sessions_(sessions) {}

  std::size_t sessions() const noexcept { return sessions_; }

private:
  std::size_t sessions_;
};

class DetrendError : public Error {
public:
  DetrendError(const std::string &what, std::size_t slot)
      : Error(what + " (slot " + std::to_string(slot) + ")"), slot_(slot) {}

  std::size_t slot() const noexcept { return slot_; }

private:
  std::size_t slot_;
};

/// A conditioning subset has no successor interval to condition on.
class InsufficientPairsError : public Error {
public:
  using Error::Error;
};

class ParameterError : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(const std::string &what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

/// A file could not be opened, written or moved into place.
class IoError : public Error {
public:
  using Error::Error;
};

} // namespace retint

#endif // RETINT_ERROR_HPP
