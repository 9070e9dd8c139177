#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace genalg {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two nets or grid functions that must share an ε-grid or a mesh do not.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// A viscosity net is outside the admissible set; `clause` names the failed
/// condition: "range", "limit" or "reciprocal".
class NotInVAPlus : public Error {
 public:
  NotInVAPlus(std::string clause, const std::string& what)
      : Error("viscosity net rejected (" + clause + "): " + what),
        clause_(std::move(clause)) {}
  const std::string& clause() const noexcept { return clause_; }

 private:
  std::string clause_;
};

class LinearSolverFailure : public Error {
 public:
  LinearSolverFailure(const std::string& what, long iterations)
      : Error(what), iterations_(iterations) {}
  long iterations() const noexcept { return iterations_; }

 private:
  long iterations_;
};

class PicardStalled : public Error {
 public:
  PicardStalled(const std::string& what, std::vector<double> last_residuals)
      : Error(what), residuals_(std::move(last_residuals)) {}
  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

class MaxPrincipleViolation : public Error {
 public:
  MaxPrincipleViolation(const std::string& what, double margin)
      : Error(what), margin_(margin) {}
  double margin() const noexcept { return margin_; }

 private:
  double margin_;
};

/// The weak-solution hypothesis r_ε·max(‖g_ε‖, ‖f_ε‖) → 0 does not hold.
class NotWeaklySolvable : public Error {
 public:
  NotWeaklySolvable(const std::string& what, std::vector<double> net)
      : Error(what), net_(std::move(net)) {}
  const std::vector<double>& net() const noexcept { return net_; }

 private:
  std::vector<double> net_;
};

/// An operation was called on inputs that violate its stated precondition.
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

/// A member solve inside a generalized solve failed.
class MemberSolveFailure : public Error {
 public:
  MemberSolveFailure(const std::string& what, double epsilon)
      : Error(what), epsilon_(epsilon) {}
  double epsilon() const noexcept { return epsilon_; }

 private:
  double epsilon_;
};

}  // namespace genalg
