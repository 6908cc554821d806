#pragma once

#include <stdexcept>
#include <string>
#include <cstdint>

namespace mra {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Rejected input: bad manifest, bad preset parameters, wrong mode, rate
// outside its admissible interval, mismatched dimensions.  A process that
// maps errors to exit codes should treat these as configuration errors.
struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(what) {}
};

struct DimensionError : ConfigError {
    explicit DimensionError(const std::string& what) : ConfigError(what) {}
};

struct ModeError : ConfigError {
    explicit ModeError(const std::string& what) : ConfigError(what) {}
};

struct RateRangeError : ConfigError {
    explicit RateRangeError(const std::string& what) : ConfigError(what) {}
};

// Failures that only show up while computing: numerical blow-up, divergent
// weighted integrals, families outside the admissible universe, iterations
// that stall.  These map to a runtime-failure exit code.
struct RuntimeFailure : Error {
    explicit RuntimeFailure(const std::string& what) : Error(what) {}
};

struct BlowUpError : RuntimeFailure {
    BlowUpError(const std::string& what, std::uint64_t step_, double time_, double h_sq_)
        : RuntimeFailure(what), step(step_), time(time_), h_sq(h_sq_) {}
    std::uint64_t step;
    double time;
    double h_sq;
};

struct IntegrabilityError : RuntimeFailure {
    explicit IntegrabilityError(const std::string& what) : RuntimeFailure(what) {}
};

struct UniverseError : RuntimeFailure {
    explicit UniverseError(const std::string& what) : RuntimeFailure(what) {}
};

struct NonConvergenceError : RuntimeFailure {
    explicit NonConvergenceError(const std::string& what) : RuntimeFailure(what) {}
};

} // namespace mra
