#pragma once

#include <stdexcept>
#include <string>

namespace nudgesim {

/// Argument outside the domain where an operation is defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A signal that is never sent has no Bayes posterior.
class NullSignal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Posterior support or effort outside what any tagging policy can induce.
class Infeasible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Posterior distribution does not average back to the prior.
class NotPlausible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No supporting Lagrangian exists for a candidate posterior distribution.
class NotOptimal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The provider cannot be incentivized to exert any positive effort.
class NoPositiveEffort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Cascade population died out.
class Extinct : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Degenerate : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user-supplied configuration (bad file, bad scenario, violated assumption).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nudgesim
