/*
 * Exception types shared by all kemfault modules
 */

#ifndef KEMFAULT_ERROR_HPP_
#define KEMFAULT_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace kemfault {

class Error : public std::runtime_error {
   public:
      using std::runtime_error::runtime_error;
};

/// A precondition on sizes, moduli, bit widths or ranges was violated.
class ParameterError : public Error {
   public:
      using Error::Error;
};

/// An object was used in a state that does not allow the operation.
class StateError : public Error {
   public:
      using Error::Error;
};

/// The plaintext-checking oracle found no candidate matching the observed output.
class OracleMiss : public Error {
   public:
      using Error::Error;
};

/// No probe constant splits a candidate secret set.
class NoProbeError : public Error {
   public:
      using Error::Error;
};

/// The attack finished with coefficients that were never resolved.
class IncompleteRecovery : public Error {
   public:
      using Error::Error;
};

/// The victim flag cannot be aligned with any templated vulnerable cell.
class PlacementImpossible : public Error {
   public:
      using Error::Error;
};

}  // namespace kemfault

#endif
