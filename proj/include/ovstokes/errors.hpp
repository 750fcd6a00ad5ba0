#pragma once

#include <stdexcept>
#include <string>

namespace ovs {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// parameter outside the parametric domain
struct DomainError : Error { using Error::Error; };
// derivative order or degree out of range
struct DegreeError : Error { using Error::Error; };
// invalid knot vector, footprint or map
struct GeometryError : Error { using Error::Error; };
struct SingularGeometryError : GeometryError { using GeometryError::GeometryError; };
// bad case setup: boundary conditions, missing good neighbors, ...
struct ConfigurationError : Error { using Error::Error; };
struct ParameterError : Error { using Error::Error; };
struct FrameConditioningError : Error { using Error::Error; };
struct SolverError : Error { using Error::Error; };
struct CapabilityError : Error { using Error::Error; };

} // namespace ovs
