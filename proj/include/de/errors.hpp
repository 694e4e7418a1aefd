#pragma once

#include <stdexcept>
#include <string>

namespace de {

// Malformed external input: bad DEFS bytes, unparseable JSON, files that
// violate a documented schema.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoVisibleJointsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoLabeledJointsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingHeadBoxError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PlacementFailureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A skeleton definition that breaks its structural invariants.
struct SkeletonError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace de
