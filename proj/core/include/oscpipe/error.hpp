#pragma once

#include <stdexcept>
#include <string>

namespace osc {

/// Base error for everything the pipeline can reject: malformed files,
/// violated invariants, unmet stage dependencies, bad arguments.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an input file or in-memory structure violates the data-model
/// invariants. The message always carries the location coordinates
/// (file / clip / track / frame) known at the point of failure.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Raised by run_pipeline when a stage's input artifact is missing.
class DependencyError : public Error {
public:
    using Error::Error;
};

namespace detail {

// Builds "clip 'x': track 't': frame 7: message" from whichever coordinates
// are known; empty strings / negative frames are skipped.
std::string locate(const std::string& file, const std::string& clip,
                   const std::string& track, int frame,
                   const std::string& message);

} // namespace detail

[[noreturn]] void fail_located(const std::string& file, const std::string& clip,
                               const std::string& track, int frame,
                               const std::string& message);

} // namespace osc
