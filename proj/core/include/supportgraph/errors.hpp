#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace supportgraph {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatch, non-finite entries, bad indices.
class InputError : public Error {
 public:
  using Error::Error;
};

class SingularBlock : public Error {
 public:
  using Error::Error;
};

class CapacityExceeded : public Error {
 public:
  using Error::Error;
};

class Disconnected : public Error {
 public:
  explicit Disconnected(std::size_t components)
      : Error("graph is disconnected (" + std::to_string(components) +
              " components)"),
        components_(components) {}
  std::size_t components() const noexcept { return components_; }

 private:
  std::size_t components_;
};

/// A pivot block (or a matrix that must be SPD) failed the definiteness test.
/// `index` is the offending block row in the caller's numbering.
class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(std::size_t index, const std::string& what = "")
      : Error("block " + std::to_string(index) + " is not positive definite" +
              (what.empty() ? "" : ": " + what)),
        index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class NotDefinite : public Error {
 public:
  NotDefinite(std::size_t i, std::size_t j)
      : Error("off-diagonal block (" + std::to_string(i) + ", " +
              std::to_string(j) + ") is neither positive nor negative definite"),
        i_(i),
        j_(j) {}
  std::size_t row() const noexcept { return i_; }
  std::size_t col() const noexcept { return j_; }

 private:
  std::size_t i_, j_;
};

class NotDominant : public Error {
 public:
  explicit NotDominant(std::size_t i)
      : Error("block row " + std::to_string(i) + " is not block diagonally dominant"),
        i_(i) {}
  std::size_t row() const noexcept { return i_; }

 private:
  std::size_t i_;
};

class NotPositiveDefiniteOperator : public Error {
 public:
  explicit NotPositiveDefiniteOperator(std::size_t iteration)
      : Error("p^T A p <= 0 at iteration " + std::to_string(iteration)),
        iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

class NumericalBreakdown : public Error {
 public:
  explicit NumericalBreakdown(std::size_t iteration)
      : Error("non-finite value in CG recurrence at iteration " +
              std::to_string(iteration)),
        iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

class PackingInfeasible : public Error {
 public:
  PackingInfeasible(std::size_t achieved, std::size_t requested)
      : Error("packing infeasible: placed " + std::to_string(achieved) + " of " +
              std::to_string(requested) + " cells"),
        achieved_(achieved) {}
  std::size_t achieved() const noexcept { return achieved_; }

 private:
  std::size_t achieved_;
};

class DegenerateContact : public Error {
 public:
  DegenerateContact(std::size_t i, std::size_t j)
      : Error("cells " + std::to_string(i) + " and " + std::to_string(j) +
              " have coincident centers"),
        i_(i),
        j_(j) {}
  std::size_t first() const noexcept { return i_; }
  std::size_t second() const noexcept { return j_; }

 private:
  std::size_t i_, j_;
};

}  // namespace supportgraph
