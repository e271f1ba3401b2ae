#pragma once
#include <stdexcept>
#include <string>

namespace fdsec {

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Channel geometry that makes a zero-forcing design impossible.
struct DegenerateChannelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fdsec
