#pragma once

#include <stdexcept>
#include <string>

namespace lcs {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments: mismatched lengths, bad step sizes, invalid configs.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class UnknownChartError : public Error {
 public:
  explicit UnknownChartError(int chart)
      : Error("unknown chart id " + std::to_string(chart)), chart_(chart) {}
  int chart() const noexcept { return chart_; }

 private:
  int chart_;
};

/// A point left the domain of the chart it is expressed in.
class DomainError : public Error {
 public:
  DomainError(int chart, int coordinate, double value)
      : Error("point outside domain of chart " + std::to_string(chart) +
              " (coordinate " + std::to_string(coordinate) +
              " = " + std::to_string(value) + ")"),
        chart_(chart),
        coordinate_(coordinate) {}
  int chart() const noexcept { return chart_; }
  int coordinate() const noexcept { return coordinate_; }

 private:
  int chart_;
  int coordinate_;
};

/// Base of failures of numerical procedures (non-convergence, singularity).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : NumericalError(what + " (residual " + std::to_string(residual) +
                       " after " + std::to_string(iterations) + " iterations)"),
        residual_(residual),
        iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

class SingularMatrixError : public NumericalError {
 public:
  SingularMatrixError(const std::string& what, double condition)
      : NumericalError(what + " (condition estimate " +
                       std::to_string(condition) + ")"),
        condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

/// Velocity Hessian or mixed discrete Hessian not invertible.
class RegularityError : public SingularMatrixError {
 public:
  using SingularMatrixError::SingularMatrixError;
};

/// The implicit inversion behind a discrete Hamiltonian crossed a fold.
class BranchError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Momenta along a sequence disagree: the sequence does not solve the
/// discrete equations it was claimed to solve.
class ConsistencyError : public NumericalError {
 public:
  ConsistencyError(int index, double deviation)
      : NumericalError("momentum consistency violated at k=" +
                       std::to_string(index) + " (deviation " +
                       std::to_string(deviation) + ")"),
        index_(index),
        deviation_(deviation) {}
  int index() const noexcept { return index_; }
  double deviation() const noexcept { return deviation_; }

 private:
  int index_;
  double deviation_;
};

}  // namespace lcs
