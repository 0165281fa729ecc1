#pragma once

#include <stdexcept>
#include <string>

namespace gporder {

// Shared error vocabulary. Every failure mode callers are expected to
// handle gets its own type so tests and the CLI can discriminate.

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// factorize() exceeded its iteration budget before fully splitting the input.
struct FactorizationTimeout : Error {
    explicit FactorizationTimeout(const std::string& msg) : Error(msg) {}
};

// An element required to be invertible was not.
struct NotAUnit : Error {
    explicit NotAUnit(const std::string& msg) : Error(msg) {}
};

// A (p, q) pair does not satisfy the generation hypothesis <-1, q> = (Z/pZ)*
// or an explicit congruence precondition on p.
struct HypothesisViolated : Error {
    explicit HypothesisViolated(const std::string& msg) : Error(msg) {}
};

// Two ring elements from different contexts were combined.
struct ContextMismatch : Error {
    explicit ContextMismatch(const std::string& msg) : Error(msg) {}
};

// A claimed divisor does not divide the quantity it must divide.
struct NotADivisor : Error {
    explicit NotADivisor(const std::string& msg) : Error(msg) {}
};

// The zero element was passed where a nonzero element is required.
struct ZeroElement : Error {
    explicit ZeroElement(const std::string& msg) : Error(msg) {}
};

// q is not inert in the quadratic field at hand.
struct NotInert : Error {
    explicit NotInert(const std::string& msg) : Error(msg) {}
};

// A floating-point computation could not certify its result at the
// requested precision.
struct PrecisionInsufficient : Error {
    explicit PrecisionInsufficient(const std::string& msg) : Error(msg) {}
};

// A checkpoint file exists but cannot be reconciled with the run config.
struct CheckpointCorrupt : Error {
    explicit CheckpointCorrupt(const std::string& msg) : Error(msg) {}
};

// An iteration cap was exceeded.
struct BudgetExhausted : Error {
    explicit BudgetExhausted(const std::string& msg) : Error(msg) {}
};

}  // namespace gporder
