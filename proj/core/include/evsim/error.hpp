#pragma once

#include <stdexcept>
#include <string>

namespace evsim {

// Base for every error the library throws. Callers that only care about
// "something in the simulator rejected this" catch Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside an operation's domain (negative resistance, duty > 100, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// Value representable in principle but outside the mapped segment.
class RangeError : public Error {
 public:
  using Error::Error;
};

class UndefinedDeviationError : public Error {
 public:
  using Error::Error;
};

class ChecksumError : public Error {
 public:
  using Error::Error;
};

class MalformedBurstError : public Error {
 public:
  using Error::Error;
};

// Requested resistance above the potentiometer ceiling.
class UnreachableError : public Error {
 public:
  using Error::Error;
};

// Event-loop misuse: events out of order, inconsistent wiring.
class HarnessError : public Error {
 public:
  using Error::Error;
};

// Scenario/profile/signature documents that fail to parse or validate.
class MalformedInputError : public Error {
 public:
  using Error::Error;
};

class UnknownScenarioError : public Error {
 public:
  using Error::Error;
};

}  // namespace evsim
