#pragma once

#include <stdexcept>
#include <string>

namespace limeout {

// Error hierarchy. Operational failures surface as exceptions; the CLI maps
// them to nonzero exit codes.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input data (bad CSV row, unparseable numeral).
struct ParseError : Error {
    using Error::Error;
};

// Input violates a schema contract (non-binary target, unknown feature).
struct SchemaError : Error {
    using Error::Error;
};

// Invalid argument to an operation (fraction out of range, empty pool).
struct ArgumentError : Error {
    using Error::Error;
};

// Class-balance preconditions (single-class input to oversampling).
struct BalanceError : Error {
    using Error::Error;
};

// Invalid audit configuration; message names the offending key.
struct ConfigError : Error {
    using Error::Error;
};

// Reports that cannot be compared (different datasets/schemas).
struct ComparisonError : Error {
    using Error::Error;
};

}  // namespace limeout
