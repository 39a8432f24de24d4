#pragma once

#include <stdexcept>
#include <string>

namespace hafsim {

/// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A parameter or matrix violates a mathematical precondition.
struct DomainError : Error {
    using Error::Error;
};

/// Supplied data arrays are inconsistent (lengths, normalization, schema).
struct IngestionError : Error {
    using Error::Error;
};

/// Block dimensions do not fit the requested mode layout.
struct AssemblyError : Error {
    using Error::Error;
};

/// The quadratic form is not thermodynamically stable: the Bogoliubov
/// spectrum is complex, touches zero, or carries a negative-norm mode.
struct InstabilityError : Error {
    using Error::Error;
};

/// A problem size exceeds the documented desk-scale budget.
struct SizeError : Error {
    using Error::Error;
};

/// A computed quantity fails its own consistency check (imaginary residue,
/// negative probability, deficit too large).
struct NumericalError : Error {
    using Error::Error;
};

/// Fock-space truncation could not reach the requested accuracy.
struct TruncationError : Error {
    using Error::Error;
};

} // namespace hafsim
