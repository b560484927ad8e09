#pragma once

#include <stdexcept>
#include <string>

namespace beamfe {

/// Base class of all errors thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A relative rotation reached the representable limit of the
/// rotation-vector chart (angle at or beyond pi). Usually signals an
/// under-resolved mesh or an oversized load increment.
class RelativeRotationTooLarge : public Error {
public:
    using Error::Error;
};

/// The element-local block selected for static condensation is singular.
class SingularCondensationBlock : public Error {
public:
    using Error::Error;
};

/// The assembled global tangent could not be factorized.
class SingularTangent : public Error {
public:
    using Error::Error;
};

/// Newton iteration failed to converge within the configured limits.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, int step, double residual_norm)
        : Error(what), step(step), residual_norm(residual_norm) {}

    int step;
    double residual_norm;
};

/// A mesh node is not referenced by any element.
class DanglingNode : public Error {
public:
    using Error::Error;
};

/// Mesh validation failed (zero-length element, bad node reference, ...).
class InvalidMesh : public Error {
public:
    using Error::Error;
};

/// A problem or sweep document could not be parsed.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace beamfe
