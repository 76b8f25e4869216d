#pragma once

#include <cmath>
#include <random>

#include "cqed/model.hpp"

namespace testing_support {

/// x' = v, v' = -x.
struct Harmonic {
    void operator()(const cqed::StateVector<2>& s, cqed::StateVector<2>& d) const noexcept {
        d = {s[1], -s[0]};
    }
};

/// Unit-rate rotation of (ax, ay) in a state with the zero-temperature
/// layout; all other components frozen.
struct FieldRotation {
    void operator()(const cqed::StateVector<7>& s, cqed::StateVector<7>& d) const noexcept {
        d = {};
        d[5] = -s[6];
        d[6] = s[5];
    }
};

/// x' = -y, y' = x on the plane.
struct Rotation2 {
    void operator()(const cqed::StateVector<2>& s, cqed::StateVector<2>& d) const noexcept {
        d = {-s[1], s[0]};
    }
};

/// x' = x, y' = -y.
struct Saddle {
    void operator()(const cqed::StateVector<2>& s, cqed::StateVector<2>& d) const noexcept {
        d = {s[0], -s[1]};
    }
};

template <std::size_t N>
struct ZeroField {
    void operator()(const cqed::StateVector<N>&, cqed::StateVector<N>& d) const noexcept {
        d = {};
    }
};

inline void unit_spin(double& sx, double& sy, double& sz) {
    const double n = std::sqrt(sx * sx + sy * sy + sz * sz);
    sx /= n;
    sy /= n;
    sz /= n;
}

inline cqed::ThermalState random_thermal(std::mt19937_64& rng, bool zero_tilde = false) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    cqed::ThermalState s;
    s.x = 6.0 * u(rng);
    s.p = 10.0 * u(rng);
    s.sx = u(rng);
    s.sy = u(rng);
    s.sz = u(rng);
    unit_spin(s.sx, s.sy, s.sz);
    s.ax = 2.0 * u(rng);
    s.ay = 2.0 * u(rng);
    if (!zero_tilde) {
        s.p_tilde = 2.0 * u(rng);
        s.atx = 2.0 * u(rng);
        s.aty = 2.0 * u(rng);
    }
    return s;
}

inline cqed::ZeroTState random_zero_t(std::mt19937_64& rng) {
    const auto t = random_thermal(rng, true);
    return {t.x, t.p, t.sx, t.sy, t.sz, t.ax, t.ay};
}

} // namespace testing_support
