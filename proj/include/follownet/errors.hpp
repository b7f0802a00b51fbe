#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace follownet {

// Error hierarchy shared across the library. `category()` is the stable
// machine-readable tag the CLI prints on failure.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& msg)
      : std::runtime_error(msg), category_(std::move(category)) {}
  const std::string& category() const { return category_; }

 private:
  std::string category_;
};

#define FOLLOWNET_DEFINE_ERROR(Name, tag)                      \
  class Name : public Error {                                  \
   public:                                                     \
    explicit Name(const std::string& msg) : Error(tag, msg) {} \
  }

FOLLOWNET_DEFINE_ERROR(ConfigError, "config");
FOLLOWNET_DEFINE_ERROR(ParseError, "parse");
FOLLOWNET_DEFINE_ERROR(ValidationError, "validation");
FOLLOWNET_DEFINE_ERROR(GenerationError, "generation");
FOLLOWNET_DEFINE_ERROR(SplitError, "split");
FOLLOWNET_DEFINE_ERROR(UsageError, "usage");
FOLLOWNET_DEFINE_ERROR(IoError, "io");
FOLLOWNET_DEFINE_ERROR(InternalError, "internal");
FOLLOWNET_DEFINE_ERROR(UnsupportedError, "unsupported");
FOLLOWNET_DEFINE_ERROR(NotReadyError, "not-ready");

#undef FOLLOWNET_DEFINE_ERROR

}  // namespace follownet
