#include "nanocav/errors.hpp"

namespace nanocav {

ParseError::ParseError(const std::string& what, std::size_t line)
    : ConfigError("line " + std::to_string(line) + ": " + what), line_(line) {}

}  // namespace nanocav
