#pragma once

#include <stdexcept>
#include <string>

namespace qaesim {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a requested register does not fit the simulator memory budget.
struct CapacityError : Error {
  CapacityError(int required, int budget)
      : Error("state of " + std::to_string(required) +
              " qubits exceeds the memory budget of " + std::to_string(budget) +
              " qubits (shortfall " + std::to_string(required - budget) + ")"),
        required_qubits(required),
        budget_qubits(budget) {}

  int required_qubits;
  int budget_qubits;
};

struct CircuitError : Error {
  using Error::Error;
};

struct LayoutError : Error {
  using Error::Error;
};

struct CalibrationError : Error {
  using Error::Error;
};

}  // namespace qaesim
