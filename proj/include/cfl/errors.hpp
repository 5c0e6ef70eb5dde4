#pragma once

#include <stdexcept>
#include <string>

namespace cfl {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// AOA below the degeneracy cutoff; slant/projected distances are 0/0.
class DegenerateAngle : public Error {
public:
    DegenerateAngle() : Error("AOA angle below degeneracy cutoff") {}
};

/// Measured depth difference larger than the communication range.
class DepthExceedsRange : public Error {
public:
    DepthExceedsRange() : Error("depth difference exceeds communication range") {}
};

class EmptyIntersection : public Error {
public:
    EmptyIntersection() : Error("task-ring intersection is empty") {}
};

class NoUsableAnchor : public Error {
public:
    NoUsableAnchor() : Error("no non-degenerate task anchor") {}
};

class InsufficientAnchors : public Error {
public:
    explicit InsufficientAnchors(std::size_t usable)
        : Error("need at least 3 usable task anchors, got " + std::to_string(usable)) {}
};

class EmptyFilteredSet : public Error {
public:
    EmptyFilteredSet() : Error("filtered sample set is empty") {}
};

class SingularGeometry : public Error {
public:
    SingularGeometry() : Error("anchor projections are collinear") {}
};

class ConfigInvalid : public Error {
public:
    using Error::Error;
};

class IoFailure : public Error {
public:
    using Error::Error;
};

}  // namespace cfl
