#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "robust_scale/correction.hpp"

// Embedded finite-sample bias-correction tables. The refined Sn/Qn tables
// cover n = 2..100 and continue with the inverse-polynomial prediction
// equations; the croux1992 tables cover n = 2..9 and the robustbase Qn
// table n = 2..12, each switching to its own prediction equation above.

namespace robust_scale::tables {

inline constexpr std::size_t kRefinedMinN = 2;
inline constexpr std::size_t kRefinedMaxN = 100;

// Refined Sn factors, n = 2..100.
inline constexpr std::array<double, 99> kRefinedSn = {
    0.7430, 1.8498, 0.9551, 1.3486, 0.9941, 1.1983, 1.0050, 1.1318, 1.0069,
    1.0959, 1.0063, 1.0742, 1.0051, 1.0601, 1.0038, 1.0501, 1.0028, 1.0430, 1.0022,
    1.0374, 1.0014, 1.0331, 1.0009, 1.0297, 1.0007, 1.0269, 1.0004, 1.0245, 1.0001,
    1.0226, 0.9999, 1.0209, 0.9997, 1.0195, 0.9998, 1.0183, 0.9996, 1.0172, 0.9997,
    1.0162, 0.9996, 1.0154, 0.9996, 1.0146, 0.9996, 1.0139, 0.9995, 1.0132, 0.9995,
    1.0126, 0.9995, 1.0123, 0.9995, 1.0117, 0.9995, 1.0113, 0.9996, 1.0109, 0.9996,
    1.0105, 0.9995, 1.0102, 0.9996, 1.0099, 0.9997, 1.0095, 0.9996, 1.0092, 0.9997,
    1.0090, 0.9997, 1.0088, 0.9996, 1.0085, 0.9997, 1.0084, 0.9997, 1.0081, 0.9997,
    1.0079, 0.9997, 1.0076, 0.9997, 1.0076, 0.9997, 1.0074, 0.9997, 1.0072, 0.9997,
    1.0070, 0.9997, 1.0069, 0.9997, 1.0067, 0.9998, 1.0066, 0.9997, 1.0065, 0.9998};

// Refined Qn factors, n = 2..100.
inline constexpr std::array<double, 99> kRefinedQn = {
    0.3995, 0.9939, 0.5133, 0.8441, 0.6122, 0.8589, 0.6700, 0.8736, 0.7201,
    0.8890, 0.7575, 0.9023, 0.7855, 0.9125, 0.8078, 0.9211, 0.8260, 0.9279, 0.8410,
    0.9338, 0.8537, 0.9389, 0.8644, 0.9430, 0.8737, 0.9468, 0.8819, 0.9501, 0.8890,
    0.9530, 0.8953, 0.9557, 0.9010, 0.9579, 0.9060, 0.9600, 0.9106, 0.9619, 0.9148,
    0.9636, 0.9185, 0.9652, 0.9220, 0.9667, 0.9252, 0.9680, 0.9281, 0.9692, 0.9309,
    0.9704, 0.9333, 0.9715, 0.9357, 0.9724, 0.9378, 0.9733, 0.9399, 0.9742, 0.9418,
    0.9750, 0.9435, 0.9757, 0.9453, 0.9765, 0.9469, 0.9771, 0.9484, 0.9777, 0.9498,
    0.9784, 0.9511, 0.9789, 0.9523, 0.9794, 0.9536, 0.9800, 0.9547, 0.9805, 0.9558,
    0.9809, 0.9568, 0.9814, 0.9578, 0.9818, 0.9587, 0.9822, 0.9597, 0.9826, 0.9605,
    0.9829, 0.9614, 0.9833, 0.9621, 0.9836, 0.9629, 0.9840, 0.9636, 0.9843, 0.9644};

// Prediction-equation tails for n > 100 (odd/even coefficient pairs of
// 1 + alpha/n + beta/n^2).
inline constexpr FactorTable::Tail kRefinedSnTail = {0.707, -7.181, 0.043, -6.288};
inline constexpr FactorTable::Tail kRefinedQnTail = {-1.594, 3.22, -3.672, 11.087};

// Original 1992 tables, n = 2..9.
inline constexpr std::array<double, 8> kCrouxSn = {0.743, 1.851, 0.954, 1.351,
                                                   0.993, 1.198, 1.005, 1.131};
inline constexpr std::array<double, 8> kCrouxQn = {0.399, 0.994, 0.512, 0.844,
                                                   0.611, 0.857, 0.669, 0.872};

// robustbase 0.95-0 Qn table, n = 2..12.
inline constexpr std::array<double, 11> kRobustbaseQn = {
    0.399356, 0.99365, 0.51321, 0.84401, 0.61220, 0.85877,
    0.66993,  0.87344, 0.72014, 0.88906, 0.75743};

std::span<const MadFactorEntry> mad_factor_entries();

}  // namespace robust_scale::tables
