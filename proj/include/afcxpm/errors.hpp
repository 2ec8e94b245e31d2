#pragma once

#include <stdexcept>
#include <string>

namespace afcxpm {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration: bad units, invariant breaches, unknown keys.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Spectral grid cannot resolve the comb teeth.
class ResolutionError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// Inputs outside the regime where the model holds (resonant signal, Δ = 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Signal modes or kick time outside the probe storage window.
class WindowError : public DomainError {
public:
    using DomainError::DomainError;
};

// Integration blow-up, degenerate fits, overlapping analysis windows.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace afcxpm
