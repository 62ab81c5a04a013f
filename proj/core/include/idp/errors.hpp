#pragma once

#include <stdexcept>
#include <string>

namespace idp {

/// A constructor or factory argument violates a documented invariant.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// No prior mass is consistent with the requested range box.
struct EmptySupport : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An observed outcome contradicts bounds established by earlier observations.
struct InconsistentObservation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidHorizon : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Finite-horizon planning is only defined undiscounted.
struct DiscountedFiniteUnsupported : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Infinite-horizon planning requires a discount strictly below one.
struct UndiscountedInfinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The instance exceeds an explicit size guard.
struct InstanceTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A policy reached a state its solver never produced; indicates a bug.
struct UnreachableNode : std::logic_error {
    using std::logic_error::logic_error;
};

/// A proven suboptimality bound failed to hold; indicates a bug.
struct BoundViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace idp
