#pragma once

#include <stdexcept>
#include <string>

namespace affsym {

/* every failure the library reports deliberately derives from ToolError so
   callers (and the CLI) can distinguish "bad input / ambiguous data" from a
   programming error escaping as std::logic_error */
struct ToolError : std::runtime_error {
  explicit ToolError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotAnIsometry : ToolError {
  explicit NotAnIsometry(const std::string& msg) : ToolError(msg) {}
};

struct NumericallyAmbiguous : ToolError {
  explicit NumericallyAmbiguous(const std::string& msg) : ToolError(msg) {}
};

struct IllegalParameter : ToolError {
  explicit IllegalParameter(const std::string& msg) : ToolError(msg) {}
};

struct WrongFrameKind : ToolError {
  explicit WrongFrameKind(const std::string& msg) : ToolError(msg) {}
};

/* coefficient vector cannot represent the given tensor (trace conditions violated) */
struct NotAdmissible : ToolError {
  explicit NotAdmissible(const std::string& msg) : ToolError(msg) {}
};

struct DegenerateInput : ToolError {
  explicit DegenerateInput(const std::string& msg) : ToolError(msg) {}
};

struct OutOfDomain : ToolError {
  explicit OutOfDomain(const std::string& msg) : ToolError(msg) {}
};

/* metric determinant below cutoff: no Blaschke data at this point */
struct DegenerateHypersurface : ToolError {
  explicit DegenerateHypersurface(const std::string& msg) : ToolError(msg) {}
};

/* affine metric came out positive (or negative) definite where Lorentzian
   signature was required */
struct DefiniteMetric : ToolError {
  explicit DefiniteMetric(const std::string& msg) : ToolError(msg) {}
};

struct NotAHypersphere : ToolError {
  explicit NotAHypersphere(const std::string& msg) : ToolError(msg) {}
};

struct IllegalCurve : ToolError {
  explicit IllegalCurve(const std::string& msg) : ToolError(msg) {}
};

/* closed-form coefficient evaluated where its denominator vanishes */
struct SingularPoint : ToolError {
  explicit SingularPoint(const std::string& msg) : ToolError(msg) {}
};

struct DidNotConverge : ToolError {
  DidNotConverge(const std::string& msg, int iterations_, double residual_)
      : ToolError(msg), iterations(iterations_), residual(residual_) {}
  int iterations;
  double residual;
};

}  // namespace affsym
