#pragma once

#include <stdexcept>
#include <string>

namespace rsbm {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Grid too coarse for the requested object.
struct ResolutionError : Error {
  using Error::Error;
};

// Fields on different grids, or wrong sizes.
struct ShapeError : Error {
  using Error::Error;
};

// Region, time or parameter outside what the grid or operation supports.
struct DomainError : Error {
  using Error::Error;
};

struct ConstructionError : Error {
  using Error::Error;
};

struct DivergenceError : Error {
  DivergenceError(const std::string& what, double time) : Error(what), time(time) {}
  double time;
};

struct NonContractionError : Error {
  using Error::Error;
};

struct InvalidInputError : Error {
  using Error::Error;
};

struct UsageError : Error {
  using Error::Error;
};

}  // namespace rsbm
