#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace clickgraph {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Read or write failure; byte_offset is the position in the (decompressed)
// stream where it happened.
class IoError : public Error {
 public:
  IoError(const std::string& msg, std::uint64_t byte_offset = 0)
      : Error(msg + " (at byte " + std::to_string(byte_offset) + ")"), byte_offset_(byte_offset) {}
  std::uint64_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::uint64_t byte_offset_;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DuplicateEdge : public Error {
 public:
  using Error::Error;
};

class DegenerateFit : public Error {
 public:
  using Error::Error;
};

class ZeroVector : public Error {
 public:
  using Error::Error;
};

class UnknownQuery : public Error {
 public:
  using Error::Error;
};

class MissingCategory : public Error {
 public:
  using Error::Error;
};

class EmptySample : public Error {
 public:
  using Error::Error;
};

}  // namespace clickgraph
