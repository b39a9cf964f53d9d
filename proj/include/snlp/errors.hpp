#pragma once

#include <stdexcept>
#include <string>

namespace snlp {

/// ψ(λ)=q has a (numerically) multiple root at λ=0: q=0 with ψ'(0+)≈0.
struct DegenerateRoots : std::runtime_error {
    explicit DegenerateRoots(const std::string& what) : std::runtime_error(what) {}
};

/// A sign change could not be located inside an interlacing interval.
struct BracketFailure : std::runtime_error {
    explicit BracketFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Two inversion refinements disagree beyond the accepted relative tolerance.
struct InversionUnstable : std::runtime_error {
    explicit InversionUnstable(const std::string& what) : std::runtime_error(what) {}
};

/// Laplace abscissa violates the pricing validity region Phi(p) > 1.
struct AbscissaTooSmall : std::runtime_error {
    explicit AbscissaTooSmall(const std::string& what) : std::runtime_error(what) {}
};

} // namespace snlp
