// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace baire {

/* Error taxonomy for the whole library.  Everything derives from Error so the
 * CLI can map library failures to a single exit code; the concrete types stay
 * distinct because tests and callers branch on them. */
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Arithmetic left the representable int64 range after reduction.
struct OverflowError : Error {
    using Error::Error;
};

// Evaluation outside a function's mathematical domain (x/0, 0^-1, ...).
struct DomainError : Error {
    using Error::Error;
};

struct LexError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

// A set operation whose result leaves the interval+enumeration algebra.
struct UnrepresentableResult : Error {
    using Error::Error;
};

// A family offered as discrete has pairwise infimum distance zero.
struct NotDiscrete : Error {
    using Error::Error;
};

// Cover refinement could not separate pieces / cover the sample lattice.
struct RefinementFailure : Error {
    using Error::Error;
};

// A point fell outside every level of a truncated cover.
struct NotCovered : Error {
    using Error::Error;
};

// Evaluation of a piecewise function at a point no piece domain contains.
struct OutsideCover : Error {
    using Error::Error;
};

// A preimage piece is neither constant, affine, nor bisection-certifiable.
struct Unresolvable : Error {
    using Error::Error;
};

// A sublevel set {delta > t} could not be certified exactly or by bisection.
struct ThresholdUnresolvable : Error {
    using Error::Error;
};

// Demo inputs that do not witness what they claim (e.g. f continuous at x0).
struct BadWitness : Error {
    using Error::Error;
};

// A sample point escaped both extension carriers and the default branch.
struct CarrierGap : Error {
    using Error::Error;
};

// Malformed user input (CLI arguments, config files, DSL sources).
struct InputError : Error {
    using Error::Error;
};

} // namespace baire
