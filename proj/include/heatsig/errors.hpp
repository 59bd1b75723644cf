#pragma once

#include <stdexcept>
#include <string>

namespace heatsig {

// Base class for all recoverable errors raised by this library.
// Programming errors (size mismatches, bad arguments) use std::invalid_argument.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// domain: aligned overlap shorter than the reporting floor
class OverlapTooShort : public Error {
public:
    using Error::Error;
};

// domain/io: a daily series has a hole in its date range
class GapInSeries : public Error {
public:
    using Error::Error;
};

// io: malformed cell or row (carries 1-based line number in the message)
class ParseError : public Error {
public:
    using Error::Error;
};

// io: header mismatch or wrong column count
class SchemaError : public Error {
public:
    using Error::Error;
};

// io: dates out of order or duplicated
class OrderError : public Error {
public:
    using Error::Error;
};

// io: value outside its physical range (negative energy, wind, irradiance)
class RangeError : public Error {
public:
    using Error::Error;
};

// models: |rho1| >= 1, the AR recursion has no stable long-term form
class UnstableAR : public Error {
public:
    using Error::Error;
};

// inference: a parameter has no prior assigned
class MissingPrior : public Error {
public:
    using Error::Error;
};

// inference: no finite-density starting point found from the prior
class NonFiniteStart : public Error {
public:
    using Error::Error;
};

// inference: an adaptation window passed without a single accepted proposal
class AllProposalsRejected : public Error {
public:
    using Error::Error;
};

// synth: too many simulated demand values were clamped at zero
class ExcessiveClamping : public Error {
public:
    using Error::Error;
};

} // namespace heatsig
