#pragma once

#include <stdexcept>
#include <string>

namespace nkcert {

/// Raised on contract violations and numerical breakdown anywhere in the toolkit.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define NKCERT_REQUIRE(cond, msg)                                   \
    do {                                                            \
        if (!(cond)) throw ::nkcert::Error(std::string(msg));       \
    } while (false)

}  // namespace nkcert
