#pragma once

#include <numbers>

// Atomic units (hbar = m_e = e = 1) are used everywhere internally.
// File I/O may carry eV / fs / degrees; convert at the boundary.

namespace photoion {

inline constexpr double pi = std::numbers::pi;

inline constexpr double hartree_ev = 27.211386245988;
inline constexpr double au_time_s = 2.4188843265857e-17;
inline constexpr double au_time_fs = 2.4188843265857e-2;
inline constexpr double bohr_m = 5.29177210903e-11;

constexpr double ev_to_au(double ev) { return ev / hartree_ev; }
constexpr double au_to_ev(double au) { return au * hartree_ev; }
constexpr double fs_to_au(double fs) { return fs / au_time_fs; }
constexpr double au_to_fs(double au) { return au * au_time_fs; }
constexpr double deg_to_rad(double d) { return d * pi / 180.0; }
constexpr double rad_to_deg(double r) { return r * 180.0 / pi; }

} // namespace photoion
