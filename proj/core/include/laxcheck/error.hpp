#pragma once

#include <stdexcept>
#include <string>

namespace laxcheck {

enum class Errc {
  UndeclaredAtom,
  NonInvertibleDenominator,
  DegreeMismatch,
  DegreeError,
  MissingImage,
  SingularLimit,
  UndefinedTensorNumber,
  TensorMismatch,
  RuleMismatch,
  UnknownTheory,
  UnknownPackage,
  UnknownCheck,
  UnresolvedReference,
  UndeclaredField,
  SyntaxError,
  NonEliminable,
  SampleRejected,
  Internal,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  Errc code() const { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc c, const std::string& msg) { throw Error(c, msg); }

} // namespace laxcheck
