#pragma once

#include <stdexcept>
#include <string>

namespace ctsconf {

/// Malformed or invalid input data (CSV ingestion, panel construction).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A method cannot be applied to the data it was given (too short, empty
/// calibration column, missing cohort, ...). Benchmark runs record these as
/// skip reasons instead of aborting.
class MethodError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ctsconf
