#pragma once

#include <stdexcept>
#include <string>

namespace relayabc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotStronglyConnected : public Error {
 public:
  using Error::Error;
};

/// An enumeration would exceed its configured cap; use sampled mode instead.
class TooLarge : public Error {
 public:
  using Error::Error;
};

/// A reduced graph without a source component. Never raised for valid input.
class NoSource : public Error {
 public:
  using Error::Error;
};

/// Trimmed mean requested with m <= 2b.
class BadCardinality : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

/// A trace contradicts the protocol (e.g. a faulty survivor outside its honest brackets).
class InconsistentTrace : public Error {
 public:
  using Error::Error;
};

class PhaseTooEarly : public Error {
 public:
  using Error::Error;
};

/// A persisted trace could not be parsed or is truncated.
class TraceCorrupt : public Error {
 public:
  using Error::Error;
};

class IoFailure : public Error {
 public:
  using Error::Error;
};

/// Which scenario precondition was violated.
enum class Assumption {
  ByzantineFraction,   // b < m/3
  HonestConnectivity,  // honest subgraph strongly connected
  DiameterBound,       // D >= honest diameter
  Horizon,             // T >= D
  Malformed,           // document does not describe a scenario
};

const char* assumption_name(Assumption a);

class ConfigInvalid : public Error {
 public:
  ConfigInvalid(Assumption violated, const std::string& detail)
      : Error(std::string(assumption_name(violated)) + ": " + detail), violated_(violated) {}

  Assumption violated() const noexcept { return violated_; }

 private:
  Assumption violated_;
};

inline const char* assumption_name(Assumption a) {
  switch (a) {
    case Assumption::ByzantineFraction:
      return "byzantine_fraction (b must be strictly less than m/3)";
    case Assumption::HonestConnectivity:
      return "honest_connectivity (honest subgraph must be strongly connected)";
    case Assumption::DiameterBound:
      return "diameter_bound (D must be at least the honest-subgraph diameter)";
    case Assumption::Horizon:
      return "horizon (T must be at least D)";
    case Assumption::Malformed:
      return "malformed";
  }
  return "unknown";
}

}  // namespace relayabc
