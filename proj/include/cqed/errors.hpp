#pragma once

#include <stdexcept>
#include <string>

namespace cqed {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidTemperature : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A non-finite state appeared during integration. `last_tau` is the last
/// time at which the state was still finite.
class IntegrationDiverged : public Error {
public:
    IntegrationDiverged(const std::string& what, double last_tau)
        : Error(what), last_tau_(last_tau) {}
    double last_tau() const noexcept { return last_tau_; }

private:
    double last_tau_;
};

/// Adaptive step size fell below the underflow floor.
class StiffnessError : public Error {
public:
    StiffnessError(const std::string& what, double tau) : Error(what), tau_(tau) {}
    double tau() const noexcept { return tau_; }

private:
    double tau_;
};

class CrossingError : public Error {
public:
    using Error::Error;
};

class RenormalizationError : public Error {
public:
    RenormalizationError(const std::string& what, double tau, double separation)
        : Error(what), tau_(tau), separation_(separation) {}
    double tau() const noexcept { return tau_; }
    double separation() const noexcept { return separation_; }

private:
    double tau_;
    double separation_;
};

class SamplingResolutionError : public Error {
public:
    using Error::Error;
};

} // namespace cqed
