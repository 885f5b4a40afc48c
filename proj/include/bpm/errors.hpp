#pragma once

#include <stdexcept>
#include <string>

namespace bpm {

// Base class for everything this library throws on invalid input or
// numerical breakdown. Callers that only need coarse handling can catch
// this; the CLI maps subclasses to exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation point hit the pole of a Moebius transformation (|cz+d| ~ 0).
struct PoleError : Error {
  using Error::Error;
};

// Singular matrix / collinear or coincident points / zero-area triangle.
struct DegenerateError : Error {
  using Error::Error;
};

// Matrix logarithm requested on the branch cut (eigenvalues on the
// negative real axis after the sign correction).
struct BranchError : Error {
  using Error::Error;
};

// exp_traceless called with a matrix whose trace is not ~0.
struct InvalidTraceError : Error {
  using Error::Error;
};

// Malformed input file.
struct ParseError : Error {
  using Error::Error;
};

// An edge shared by more than two faces, or inconsistent orientation.
struct NonManifoldError : Error {
  using Error::Error;
};

// A vertex referenced with two distinct texture coordinates; the map is
// not vertex-based.
struct SeamError : Error {
  using Error::Error;
};

// Query point too close to a triangle corner for edge barycentric
// coordinates; the caller must use the vertex special case.
struct VertexProximityError : Error {
  using Error::Error;
};

}  // namespace bpm
