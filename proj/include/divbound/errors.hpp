#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace divbound {

/// Malformed expression or scenario text. `offset` is a byte offset into the source.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// log of a nonpositive number, division by zero, sqrt of a negative, and friends.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A derivative was requested beyond the truncation order of a jet.
class OrderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Metric not symmetric positive definite at the evaluation point.
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adapted frame requested where |P| vanishes.
class DegenerateFrameError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unknown scenario name, unreadable scenario file, or a bad override.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace divbound
