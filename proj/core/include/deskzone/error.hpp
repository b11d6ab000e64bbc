#pragma once

#include <stdexcept>
#include <string>

namespace deskzone {

/// Raised for bad user input: malformed files, violated preconditions on
/// arguments, inconsistent identifiers. The CLI maps it to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input error tied to a specific file (and optionally a line).
class FileError : public InputError {
 public:
  FileError(const std::string& path, const std::string& what, long line = -1)
      : InputError(path + (line >= 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
        path_(path),
        line_(line) {}

  const std::string& path() const noexcept { return path_; }
  long line() const noexcept { return line_; }

 private:
  std::string path_;
  long line_;
};

}  // namespace deskzone
