#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <optional>
#include <utility>
#include <vector>

#include "cqed/errors.hpp"
#include "cqed/model.hpp"

namespace cqed {

enum class Method { FixedRK4, AdaptiveEmbedded45 };

std::string_view to_string(Method m) noexcept;
std::optional<Method> parse_method(std::string_view s) noexcept;

struct IntegrationSpec {
    Method method = Method::FixedRK4;
    double step = 1e-3;  ///< fixed step, or initial step for the adaptive method
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double t_end = 1000.0;
    double sample_every = 0.1;
};

void validate(const IntegrationSpec& spec);

/// Smallest step the adaptive controller may take before giving up.
inline constexpr double kMinAdaptiveStep = 1e-12;

template <std::size_t N>
struct Trajectory {
    std::vector<double> times;
    std::vector<StateVector<N>> states;
    SystemParams params;
    IntegrationSpec spec;
};

template <std::size_t N>
bool all_finite(const StateVector<N>& v) noexcept {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

/// One accepted step with endpoint values and slopes; the cubic Hermite
/// interpolant through them serves as dense output.
template <std::size_t N>
struct StepInterval {
    double t0 = 0.0;
    double t1 = 0.0;
    StateVector<N> y0{};
    StateVector<N> y1{};
    StateVector<N> f0{};
    StateVector<N> f1{};

    StateVector<N> interpolate(double t) const noexcept {
        if (t == t1) return y1;
        if (t == t0) return y0;
        const double h = t1 - t0;
        const double th = (t - t0) / h;
        const double th2 = th * th;
        const double th3 = th2 * th;
        const double h10 = th3 - 2.0 * th2 + th;
        const double h01 = -2.0 * th3 + 3.0 * th2;
        const double h11 = th3 - th2;
        StateVector<N> out;
        for (std::size_t i = 0; i < N; ++i) {
            out[i] = y0[i] + h01 * (y1[i] - y0[i]) + h * (h10 * f0[i] + h11 * f1[i]);
        }
        return out;
    }
};

/// Advances a state one accepted step at a time.  Fixed-step RK4 uses
/// t = t_origin + n h so that times do not accumulate round-off.
template <std::size_t N, class Field>
class Stepper {
public:
    Stepper(Field field, const StateVector<N>& y0, double t0, const IntegrationSpec& spec)
        : field_(std::move(field)), spec_(spec), t_(t0), y_(y0), t_origin_(t0),
          h_(spec.step) {
        if (!all_finite(y0)) throw IntegrationDiverged("initial state is not finite", t0);
        field_(y_, f_);
    }

    double t() const noexcept { return t_; }
    const StateVector<N>& y() const noexcept { return y_; }
    const StateVector<N>& slope() const noexcept { return f_; }
    const StepInterval<N>& last() const noexcept { return last_; }
    const Field& field() const noexcept { return field_; }

    /// Replaces the state at the current time (used after renormalization).
    void reset(const StateVector<N>& y) {
        y_ = y;
        field_(y_, f_);
        have_err_prev_ = false;
    }

    /// Takes one accepted step that does not pass t_stop.
    void step(double t_stop) {
        if (spec_.method == Method::FixedRK4) {
            step_rk4(t_stop);
        } else {
            step_dp45(t_stop);
        }
    }

    /// Steps until t() == t_stop exactly.
    void advance_to(double t_stop) {
        while (t_ < t_stop) step(t_stop);
    }

private:
    void commit(double t1, const StateVector<N>& y1, const StateVector<N>& f1) {
        if (!all_finite(y1)) {
            throw IntegrationDiverged("non-finite state after step", t_);
        }
        last_.t0 = t_;
        last_.y0 = y_;
        last_.f0 = f_;
        last_.t1 = t1;
        last_.y1 = y1;
        last_.f1 = f1;
        t_ = t1;
        y_ = y1;
        f_ = f1;
    }

    void step_rk4(double t_stop) {
        double t1 = t_origin_ + static_cast<double>(n_steps_ + 1) * spec_.step;
        bool clamped = false;
        if (t1 >= t_stop) {
            t1 = t_stop;
            clamped = true;
        }
        const double h = t1 - t_;
        StateVector<N> k2, k3, k4, tmp;
        const StateVector<N>& k1 = f_;
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + 0.5 * h * k1[i];
        field_(tmp, k2);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + 0.5 * h * k2[i];
        field_(tmp, k3);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + h * k3[i];
        field_(tmp, k4);
        StateVector<N> y1;
        for (std::size_t i = 0; i < N; ++i) {
            y1[i] = y_[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        StateVector<N> f1;
        field_(y1, f1);
        commit(t1, y1, f1);
        // A clamped step lands off the grid; restart the grid from here.
        if (clamped && t1 != t_origin_ + static_cast<double>(n_steps_ + 1) * spec_.step) {
            t_origin_ = t1;
            n_steps_ = 0;
        } else {
            ++n_steps_;
        }
    }

    // Dormand-Prince 5(4) with FSAL and a PI step-size controller.
    void step_dp45(double t_stop) {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                                a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
        static constexpr double kSafety = 0.9, kMinFactor = 0.2, kMaxFactor = 5.0;
        static constexpr double kBeta = 0.04, kAlpha = 0.2 - 0.75 * kBeta;

        const StateVector<N>& k1 = f_;
        StateVector<N> k2, k3, k4, k5, k6, k7, tmp, y1;
        while (true) {
            double h = h_;
            bool clamped = false;
            if (t_ + h >= t_stop) {
                h = t_stop - t_;
                clamped = true;
            }
            for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + h * a21 * k1[i];
            field_(tmp, k2);
            for (std::size_t i = 0; i < N; ++i) tmp[i] = y_[i] + h * (a31 * k1[i] + a32 * k2[i]);
            field_(tmp, k3);
            for (std::size_t i = 0; i < N; ++i) {
                tmp[i] = y_[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
            }
            field_(tmp, k4);
            for (std::size_t i = 0; i < N; ++i) {
                tmp[i] = y_[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            }
            field_(tmp, k5);
            for (std::size_t i = 0; i < N; ++i) {
                tmp[i] = y_[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                      a65 * k5[i]);
            }
            field_(tmp, k6);
            for (std::size_t i = 0; i < N; ++i) {
                y1[i] = y_[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                     b6 * k6[i]);
            }
            field_(y1, k7);

            double err = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                      e6 * k6[i] + e7 * k7[i]);
                const double sc =
                    spec_.abs_tol + spec_.rel_tol * std::max(std::abs(y_[i]), std::abs(y1[i]));
                err += (e / sc) * (e / sc);
            }
            err = std::sqrt(err / static_cast<double>(N));
            if (!std::isfinite(err)) err = 1e10;

            if (err <= 1.0) {
                double factor = kMaxFactor;
                if (err > 0.0) {
                    factor = kSafety * std::pow(err, -kAlpha) *
                             (have_err_prev_ ? std::pow(err_prev_, kBeta) : 1.0);
                    factor = std::clamp(factor, kMinFactor, kMaxFactor);
                }
                err_prev_ = std::max(err, 1e-4);
                have_err_prev_ = true;
                const double t1 = clamped ? t_stop : t_ + h;
                commit(t1, y1, k7);
                // A step shortened to hit t_stop says nothing about the next one.
                if (!clamped) h_ = h * factor;
                return;
            }
            const double factor =
                std::max(kMinFactor, kSafety * std::pow(err, -kAlpha));
            h_ = h * factor;
            if (h_ < kMinAdaptiveStep) {
                throw StiffnessError("adaptive step fell below 1e-12", t_);
            }
        }
    }

    Field field_;
    IntegrationSpec spec_;
    double t_;
    StateVector<N> y_;
    StateVector<N> f_{};
    StepInterval<N> last_{};
    double t_origin_;
    long long n_steps_ = 0;
    double h_;
    double err_prev_ = 1.0;
    bool have_err_prev_ = false;
};

template <std::size_t N, class Field>
Stepper<N, Field> make_stepper(Field field, const StateVector<N>& y0, double t0,
                               const IntegrationSpec& spec) {
    return Stepper<N, Field>(std::move(field), y0, t0, spec);
}

/// Integrates from tau = 0 to spec.t_end.  Samples are taken at multiples of
/// spec.sample_every from the Hermite dense output; t_end itself is always
/// the final sample.
template <std::size_t N, class Field>
Trajectory<N> integrate(Field field, const StateVector<N>& s0, const IntegrationSpec& spec) {
    validate(spec);
    Trajectory<N> traj;
    traj.spec = spec;
    auto stepper = make_stepper<N>(std::move(field), s0, 0.0, spec);

    const double t_end = spec.t_end;
    const double t_slack = 1e-12 * std::max(1.0, t_end);
    const auto expected = static_cast<std::size_t>(t_end / spec.sample_every) + 2;
    traj.times.reserve(expected);
    traj.states.reserve(expected);
    traj.times.push_back(0.0);
    traj.states.push_back(s0);

    long long k = 1;
    double next = spec.sample_every;
    while (stepper.t() < t_end) {
        stepper.step(t_end);
        const auto& iv = stepper.last();
        while (next <= iv.t1 && next < t_end - t_slack) {
            traj.times.push_back(next);
            traj.states.push_back(iv.interpolate(next));
            ++k;
            next = static_cast<double>(k) * spec.sample_every;
        }
    }
    traj.times.push_back(t_end);
    traj.states.push_back(stepper.y());
    return traj;
}

/// Result of refining a section crossing.
template <std::size_t N>
struct Crossing {
    double tau = 0.0;
    StateVector<N> state{};
    int iterations = 0;
};

inline constexpr double kCrossingTolerance = 1e-10;
inline constexpr int kMaxCrossingIterations = 200;

/// Locates g = 0 inside an accepted step with the Illinois variant of
/// regula falsi on the Hermite dense output.  Requires a strict sign change
/// of g across the interval unless one endpoint is an exact zero.
template <std::size_t N, class G>
Crossing<N> refine_crossing(const StepInterval<N>& iv, const G& g) {
    double ta = iv.t0;
    double tb = iv.t1;
    double ga = g(iv.y0);
    double gb = g(iv.y1);
    if (ga == 0.0) return {ta, iv.y0, 0};
    if (gb == 0.0) return {tb, iv.y1, 0};
    if (!(ga * gb < 0.0)) throw CrossingError("refine_crossing: no sign change across step");

    int side = 0;
    for (int it = 1; it <= kMaxCrossingIterations; ++it) {
        double tc = (ta * gb - tb * ga) / (gb - ga);
        if (!(tc > ta && tc < tb)) tc = 0.5 * (ta + tb);
        const auto sc = iv.interpolate(tc);
        const double gc = g(sc);
        if (std::abs(gc) < kCrossingTolerance || tb - ta < 1e-15 * std::max(1.0, std::abs(tb))) {
            if (std::abs(gc) < kCrossingTolerance) return {tc, sc, it};
            break;
        }
        if ((gc < 0.0) == (ga < 0.0)) {
            ta = tc;
            ga = gc;
            if (side == -1) gb *= 0.5;
            side = -1;
        } else {
            tb = tc;
            gb = gc;
            if (side == 1) ga *= 0.5;
            side = 1;
        }
    }
    throw CrossingError("refine_crossing: no convergence within 200 iterations");
}

/// Convenience form taking two step endpoints; slopes are evaluated from
/// the field.
template <std::size_t N, class Field, class G>
Crossing<N> refine_crossing(const Field& field, double t_before, const StateVector<N>& s_before,
                            double t_after, const StateVector<N>& s_after, const G& g) {
    StepInterval<N> iv;
    iv.t0 = t_before;
    iv.t1 = t_after;
    iv.y0 = s_before;
    iv.y1 = s_after;
    field(s_before, iv.f0);
    field(s_after, iv.f1);
    return refine_crossing(iv, g);
}

} // namespace cqed
