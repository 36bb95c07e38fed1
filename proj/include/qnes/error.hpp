#pragma once

#include <stdexcept>
#include <string>

namespace qnes
{
    /// Raised for malformed arguments: unknown benchmark names, dimension
    /// mismatches, non-finite matrix entries.
    class InvalidInput : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    /// Raised when an iteration produces non-finite function values or
    /// strategy state. The driver catches it and records a numerical abort
    /// (or restarts, under IPOP).
    class NumericalAbort : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };
}
