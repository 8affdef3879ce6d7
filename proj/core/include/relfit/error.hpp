#pragma once

#include <stdexcept>
#include <string>

namespace relfit {

// Invalid arguments: shape mismatches, non-finite or out-of-range parameters.
class input_error : public std::invalid_argument {
  public:
    explicit input_error(const std::string& what) : std::invalid_argument(what) {}
};

// Sample so degenerate that a quantity is undefined (e.g. all pairwise
// distances are zero in the median heuristic).
class degenerate_sample_error : public std::runtime_error {
  public:
    explicit degenerate_sample_error(const std::string& what) : std::runtime_error(what) {}
};

// File format/IO failures.
class io_error : public std::runtime_error {
  public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace relfit
