#pragma once

#include <stdexcept>

namespace relaxhmc {

// theta outside the target's box support; callers treat the density as -inf.
struct OutOfSupportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Singular Gram matrix of constraint gradients (transversality failure).
struct DegenerateJacobianError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested oracle has no implementation for this model/dimension.
struct UnsupportedOracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// HMC started from a point with non-finite density.
struct InvalidStartError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Warmup ended with essentially no accepted proposals.
struct AdaptationFailureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite intermediate value where finiteness is part of the contract.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Too few usable points for a fit.
struct InsufficientDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace relaxhmc
