#pragma once

#include <stdexcept>
#include <string>

namespace nodal {

/// Raised when a derivative is requested at a point where the chart frame
/// degenerates (sphere poles, disc center for non-radial fields).
class CoordinateSingularity : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid run configuration or sampling request.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Every level of a sweep was irregular, or a level required to be regular is not.
class DegenerateField : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A contour segment passes through the near-critical region.
class NearCriticalSegment : public std::runtime_error {
public:
    NearCriticalSegment(std::size_t segment, double grad_norm, double floor)
        : std::runtime_error("near-critical segment " + std::to_string(segment) +
                             ": |grad f| = " + std::to_string(grad_norm) +
                             " below floor " + std::to_string(floor)),
          segment_(segment) {}

    std::size_t segment() const noexcept { return segment_; }

private:
    std::size_t segment_;
};

/// A field handed to a theorem check is outside the function class the
/// check is stated for (unnormalized, nonzero mean, not an eigenfunction).
class MembershipError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation is not defined for the requested surface model.
class UnsupportedModel : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace nodal
