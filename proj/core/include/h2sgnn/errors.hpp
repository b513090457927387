#pragma once

#include <stdexcept>
#include <string>

namespace h2sgnn {

// Common base so callers can catch all library errors at once. The CLI maps
// these onto exit codes (usage problems -> 2, everything else -> 1).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dimension mismatches and malformed CSR structure.
struct ShapeError : Error {
  using Error::Error;
};

// Input values outside the mathematical domain of an operation
// (negative adjacency weights, eigenvalue samples outside [0,2], ...).
struct DomainError : Error {
  using Error::Error;
};

// Bad call arguments: empty lists, unknown enum names, empty masks.
struct ArgumentError : Error {
  using Error::Error;
};

// Unknown relation names and non-composable meta-path sequences.
struct SchemaError : Error {
  using Error::Error;
};

// Dataset content that violates the on-disk contract (edge endpoints out of
// range, overlapping splits, labels outside [0, num_classes)).
struct ValidationError : Error {
  using Error::Error;
};

// Experiment configuration problems: unknown keys, type mismatches.
struct ConfigError : Error {
  using Error::Error;
};

// Missing or unreadable files.
struct IoError : Error {
  using Error::Error;
};

// Corrupt or version-incompatible serialized artifacts (checkpoints,
// feature blobs).
struct FormatError : Error {
  using Error::Error;
};

// API misuse detected at runtime, e.g. backward() on a trace that was
// produced without caches.
struct StateError : Error {
  using Error::Error;
};

}  // namespace h2sgnn
