#pragma once

namespace eigenform {
namespace tol {

// Coefficient-is-zero threshold on normalized forms (connectivity decisions).
inline constexpr double zero = 1e-14;
// Most negative trace coefficient tolerated before declaring a linear-algebra
// failure; anything in (-markov, 0) is clamped to 0.
inline constexpr double markov = 1e-9;
// |Lambda_r(E)| at or below this counts as a zero image.
inline constexpr double image_zero = 1e-12;
// Ray membership: collinearity residual bound and the margin on t > 1.
inline constexpr double ext = 1e-9;
// Two points closer than this in sup norm are treated as coincident in ray
// computations.
inline constexpr double ray = 1e-12;
// Margin for the strict/non-strict repulsing verdicts.
inline constexpr double check = 1e-9;
// Relative positive-definiteness floor for Rayleigh-quotient denominators.
inline constexpr double definiteness = 1e-12;

}  // namespace tol
}  // namespace eigenform
