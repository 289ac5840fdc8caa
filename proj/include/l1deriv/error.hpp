#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace l1d {

using Complex = std::complex<double>;
using Index = std::uint64_t;

/// Upper limit for any index produced by a search (scans, witnesses).
inline constexpr Index kIndexCap = Index{1} << 62;

enum class ErrorCode {
  InvalidArgument = 1,
  Syntax,
  Evaluation,
  DegreeOverflow,
  UnboundedDerivation,
  TailUnknown,
  NoAdmissibleIndex,
  IndexOverflow,
  InvalidAlgebra,
  InvalidModule,
  NotOutsideSquare,
  NotSymmetric,
  SquareDeficient,
  NoSuchElement,
  ConstructionFailed,
  OnBoundary,
  PoleInX,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Rule-language parse failure; `position` is 1-based.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, std::vector<std::string> expected);

  std::size_t position() const noexcept { return position_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::vector<std::string> expected_;
};

}  // namespace l1d
