#pragma once

// Mode labeling shared by the closed-form model and the Fock-space oracle.
//
// The interferometer carries two modes, a (upper path, fixed reference mirror
// R) and b (lower path, movable mirror M). The first beam splitter sends the
// fraction sin^2(theta1) of the input intensity into b, so b is the probe arm:
// the mirror phase and the loss both act on the b slot of the mode vector.

namespace uil {

enum class Mode { a = 0, b = 1 };

inline constexpr Mode kReferenceMode = Mode::a;
inline constexpr Mode kProbeMode = Mode::b;

constexpr int slot(Mode m) { return static_cast<int>(m); }

constexpr Mode other(Mode m) { return m == Mode::a ? Mode::b : Mode::a; }

}  // namespace uil
