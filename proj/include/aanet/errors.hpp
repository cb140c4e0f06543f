#pragma once

#include <stdexcept>
#include <string>

namespace aanet {

// Invalid user-supplied configuration (bad flag values, dimension mismatches).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (files, records, schemas).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace aanet
