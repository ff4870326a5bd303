#pragma once

#include <stdexcept>
#include <string>

namespace tmix {

// Base class for everything this library throws on contract violations.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

// Map / partition validation failures.
struct OverlapError : Error { using Error::Error; };    // branch cells overlap
struct CoverageError : Error { using Error::Error; };   // branch cells do not tile [0,1)^d
struct BoundaryError : Error { using Error::Error; };   // torus boundary has no interior preimage
struct NonCubeError : Error { using Error::Error; };    // a cylinder set is not an axis-aligned cube
struct IndexError : Error { using Error::Error; };      // branch index out of range
struct DepthError : Error { using Error::Error; };      // subdivision exceeded the safety depth

// Grid / kernel / operator failures.
struct ResolutionError : Error { using Error::Error; };   // kernel support below cell size
struct UnsupportedError : Error { using Error::Error; };  // no closed form / unsupported variant
struct SizeMismatchError : Error { using Error::Error; }; // incompatible grids
struct AlignmentError : Error { using Error::Error; };    // grid incommensurate with a cylinder
struct DomainError : Error { using Error::Error; };       // parameter outside the admissible range

// Measurement failures.
struct NonConvergenceError : Error { using Error::Error; };
struct InsufficientDataError : Error { using Error::Error; };

} // namespace tmix
