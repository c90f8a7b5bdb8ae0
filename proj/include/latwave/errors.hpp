#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace latwave {

/// Base class for all library failures.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedFieldError : Error { using Error::Error; };
struct InsufficientGridError : Error { using Error::Error; };
struct ParameterError : Error { using Error::Error; };
struct StabilityError : Error { using Error::Error; };
struct BlowUpError : Error {
    BlowUpError(const std::string& msg, double when) : Error(msg), time(when) {}
    double time;
};
struct ResolutionError : Error { using Error::Error; };
struct ConvergenceError : Error {
    ConvergenceError(const std::string& msg, std::vector<double> hist = {})
        : Error(msg), history(std::move(hist)) {}
    std::vector<double> history;
};
struct SpectralError : Error {
    SpectralError(const std::string& msg, double gap_est) : Error(msg), gap(gap_est) {}
    double gap;
};
struct BracketError : Error { using Error::Error; };
struct MarginError : Error { using Error::Error; };
struct InadmissibleTiltError : Error { using Error::Error; };
struct GeometryError : Error { using Error::Error; };
struct IterationIntegrityError : Error { using Error::Error; };
struct EnvelopeError : Error { using Error::Error; };
struct AdmissibilityError : Error { using Error::Error; };
struct ConstructionError : Error { using Error::Error; };
struct WindowExitError : Error {
    WindowExitError(const std::string& msg, double last_ok) : Error(msg), last_valid_time(last_ok) {}
    double last_valid_time;
};
struct DomainError : Error { using Error::Error; };

}  // namespace latwave
