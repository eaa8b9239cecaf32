#pragma once

#include <stdexcept>
#include <string>

namespace omarray {

// Base class for everything this library throws on purpose.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameter or option rejected before any computation ran.
struct invalid_params : error {
    using error::error;
};

// A state object (density matrix, lattice state) failed its invariants.
struct invalid_state : error {
    using error::error;
};

// A fit or extraction routine could not produce a trustworthy answer.
// Thrown instead of returning garbage; callers that can tolerate failure
// should use the status fields on the result structs instead.
struct fit_error : error {
    using error::error;
};

// The steady-state solver found a (numerically) degenerate kernel, i.e.
// more than one stationary solution. Message reports the estimated
// dimension of the stationary subspace.
struct multi_stationary_error : error {
    using error::error;
};

// A statistic is not defined for the given state (e.g. g2 of a field with
// vanishing photon number).
struct undefined_statistics : error {
    using error::error;
};

// Config file problems; message carries "file:line: what".
struct config_error : error {
    using error::error;
};

// Filesystem problems while writing run output or manifests.
struct io_error : error {
    using error::error;
};

} // namespace omarray
