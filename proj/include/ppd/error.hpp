#ifndef PPD_ERROR_HPP
#define PPD_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ppd {

enum class ErrorKind {
  kInvalidInput,
  kInfeasibleSpace,
  kInvalidPrior,
  kSingularMaster,
  kInfeasibleMaster,
  kInvalidStart,
  kStuckState,
  kExplicitPriorRequired,
  kNumerical,
  kConfig,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ppd

#endif  // PPD_ERROR_HPP
