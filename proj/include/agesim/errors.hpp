#pragma once

#include <stdexcept>
#include <string>

namespace agesim {

// All recoverable failures surface as agesim::Error; the CLI turns them
// into machine-readable JSON on stderr.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] inline void fail(const std::string& what) { throw Error(what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(what);
}

}  // namespace agesim
