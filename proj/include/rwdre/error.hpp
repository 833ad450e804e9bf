#pragma once

#include <stdexcept>
#include <string>

namespace rwdre
{
    // Every failure raised by the library derives from Error so callers (the
    // CLI in particular) can map categories onto exit codes.
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Bad argument to an operation (negative rate, empty domain, ...).
    class ParameterError : public Error
    {
    public:
        using Error::Error;
    };

    // A model invariant (ZR1, bounded total rate, nu-constraint, ...) fails.
    class ValidationError : public Error
    {
    public:
        using Error::Error;
    };

    // A walk or query left the simulated space-time window.
    class CoverageError : public Error
    {
    public:
        using Error::Error;
    };

    class NumericalError : public Error
    {
    public:
        using Error::Error;
    };

    // Operation called on data that does not carry what it needs.
    class UsageError : public Error
    {
    public:
        using Error::Error;
    };

    // A property that must hold on every realization did not. Always a bug or
    // a genuinely violated hypothesis, never a statistical fluctuation.
    class InvariantViolation : public Error
    {
    public:
        using Error::Error;
    };
} // namespace rwdre
