#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cascade {

// Base of every error the library raises. Programming errors (out-of-range
// node ids and the like) are asserts, not exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed binary input. `offset` is the byte position where decoding failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

// Malformed text input. `line` is 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::uint64_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::uint64_t line() const noexcept { return line_; }

 private:
  std::uint64_t line_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A well-formed request with no meaningful answer: empty histogram, a grid in
// which every point diverged, a count that overflowed.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace cascade
