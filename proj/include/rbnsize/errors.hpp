#pragma once

#include <stdexcept>

namespace rbnsize {

/// File could not be opened or read.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rbnsize
