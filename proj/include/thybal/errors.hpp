#pragma once

#include <stdexcept>
#include <string>

namespace thybal {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The closed forms need complex characteristic roots.
class NotUnderdamped : public Error {
public:
    using Error::Error;
};

/// A time query outside the interval where a formula holds.
class DomainError : public Error {
public:
    using Error::Error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class InfeasibleStatic : public Error {
public:
    using Error::Error;
};

class InfeasibleRR : public Error {
public:
    using Error::Error;
};

class TargetUnreachable : public Error {
public:
    using Error::Error;
};

class StepTooLarge : public Error {
public:
    using Error::Error;
};

class EmptyGrid : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace thybal
