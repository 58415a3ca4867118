#pragma once

#include <stdexcept>
#include <string>

namespace qfric {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid user input: nonpositive parameters, superluminal velocity, bad config.
class ValidationError : public Error
{
  public:
    using Error::Error;
};

/// Argument outside the domain of a closed-form expression (poles, zero frequency).
class DomainError : public Error
{
  public:
    using Error::Error;
};

/// Dressed polarizability hit a (near-)singular matrix.
class SingularityError : public Error
{
  public:
    SingularityError(std::string const& what, double condition)
        : Error(what), condition_(condition)
    {
    }
    double condition() const noexcept { return condition_; }

  private:
    double condition_;
};

/// Adaptive integration gave up. Carries the best estimate it reached.
class ConvergenceError : public Error
{
  public:
    ConvergenceError(std::string const& what, double estimate, double error_bound)
        : Error(what), estimate_(estimate), error_bound_(error_bound)
    {
    }
    double estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return error_bound_; }

  private:
    double estimate_;
    double error_bound_;
};

/// A kernel or spectrum that must be positive semidefinite is not.
class InvariantError : public Error
{
  public:
    using Error::Error;
};

}  // namespace qfric
