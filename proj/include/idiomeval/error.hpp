#pragma once

#include <stdexcept>
#include <string>

namespace idiomeval {

/// Bad files, malformed records, out-of-range arguments. The CLI maps this
/// to exit code 2; internal invariant violations surface as std::logic_error
/// and map to exit code 3.
class input_error : public std::runtime_error {
  public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace idiomeval
