#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cqed/errors.hpp"
#include "cqed/integrator.hpp"
#include "cqed/model.hpp"

namespace cqed {

/// Time discarded before any diagnostic starts accumulating.
inline constexpr double kDefaultTransient = 100.0;

// ---------------------------------------------------------------------------
// Poincare sections

enum class Direction { Up, Down, Both };

std::string_view to_string(Direction d) noexcept;
std::optional<Direction> parse_direction(std::string_view s) noexcept;

struct ProjectionAxis {
    std::size_t component = 0;
    bool wrap_2pi = false;  ///< report the value modulo 2 pi in [0, 2 pi)
};

/// Section surface g(s) = 0 crossed in a given direction, and the plane the
/// crossing points are projected onto.
struct SectionDef {
    enum class Kind { AyZeroUp, CosXZeroUp, Custom };

    Kind kind = Kind::AyZeroUp;
    std::size_t component = 0;  ///< Custom only: g = s[component] - level
    double level = 0.0;
    Direction direction = Direction::Up;  ///< Custom only; the named kinds are upward
    ProjectionAxis u{0, true};
    ProjectionAxis v{1, false};
};

std::string_view to_string(SectionDef::Kind k) noexcept;
std::optional<SectionDef::Kind> parse_section_kind(std::string_view s) noexcept;

struct PoincareOptions {
    std::size_t n_points = 500;
    double t_max = 1e5;
    double transient = kDefaultTransient;
};

struct PoincareSection {
    std::vector<std::pair<double, double>> points;
    std::vector<double> taus;
    std::vector<std::vector<double>> states;  ///< full refined state at each crossing
    SectionDef section;
    std::size_t count = 0;
    bool empty = true;  ///< no crossing was found; not an error
};

/// Crossings at tau <= t_max + kSectionTimeSlack * max(1, t_max) are kept,
/// so a crossing that lands on t_max analytically is not lost to the
/// integrator's phase error.
inline constexpr double kSectionTimeSlack = 1e-9;

inline double wrap_two_pi(double v) noexcept {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(v, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r = 0.0;
    return r;
}

template <std::size_t N>
double section_value(const SectionDef& def, const StateLayout& layout,
                     const StateVector<N>& s) noexcept {
    switch (def.kind) {
    case SectionDef::Kind::AyZeroUp:
        return s[layout.ay];
    case SectionDef::Kind::CosXZeroUp:
        return std::cos(s[layout.x]);
    case SectionDef::Kind::Custom:
        break;
    }
    return s[def.component] - def.level;
}

inline Direction section_direction(const SectionDef& def) noexcept {
    return def.kind == SectionDef::Kind::Custom ? def.direction : Direction::Up;
}

template <std::size_t N, class Field>
PoincareSection poincare(Field field, const StateVector<N>& s0, const StateLayout& layout,
                         const SectionDef& def, const PoincareOptions& opts,
                         const IntegrationSpec& spec) {
    validate(spec);
    if (opts.n_points < 1) throw InvalidArgument("poincare: n_points must be >= 1");
    if (def.kind == SectionDef::Kind::Custom && def.component >= N) {
        throw InvalidArgument("poincare: section component out of range");
    }
    if (def.u.component >= N || def.v.component >= N) {
        throw InvalidArgument("poincare: projection component out of range");
    }

    PoincareSection out;
    out.section = def;
    const Direction dir = section_direction(def);
    auto g = [&](const StateVector<N>& s) { return section_value<N>(def, layout, s); };
    auto project = [](const ProjectionAxis& a, const StateVector<N>& s) {
        return a.wrap_2pi ? wrap_two_pi(s[a.component]) : s[a.component];
    };

    const double t_stop = opts.t_max + kSectionTimeSlack * std::max(1.0, opts.t_max);
    auto stepper = make_stepper<N>(std::move(field), s0, 0.0, spec);
    double g_prev = g(stepper.y());
    while (stepper.t() < t_stop && out.count < opts.n_points) {
        stepper.step(t_stop);
        const auto& iv = stepper.last();
        const double g_next = g(iv.y1);
        const bool up = g_prev < 0.0 && g_next >= 0.0;
        const bool down = g_prev > 0.0 && g_next <= 0.0;
        g_prev = g_next;
        const bool hit = (dir == Direction::Up && up) || (dir == Direction::Down && down) ||
                         (dir == Direction::Both && (up || down));
        if (!hit || iv.t1 < opts.transient) continue;
        const auto c = refine_crossing(iv, g);
        if (c.tau < opts.transient) continue;
        out.points.emplace_back(project(def.u, c.state), project(def.v, c.state));
        out.taus.push_back(c.tau);
        out.states.emplace_back(c.state.begin(), c.state.end());
        ++out.count;
    }
    out.empty = out.count == 0;
    return out;
}

// ---------------------------------------------------------------------------
// Maximum Lyapunov exponent

struct LyapunovOptions {
    double d0 = 1e-8;
    double renorm_interval = 1.0;
    int n_renorm = 1000;
    double transient = kDefaultTransient;
};

struct LyapunovEstimate {
    double lambda_max = 0.0;      ///< per unit tau, i.e. in units of Omega_0
    std::vector<double> history;  ///< running estimate after each renormalization
    std::vector<double> times;    ///< tau of each renormalization
    int n_renorm = 0;
    double d0 = 0.0;
    double renorm_interval = 0.0;
};

void validate(const LyapunovOptions& opts);

namespace detail {

template <std::size_t N>
double distance(const StateVector<N>& a, const StateVector<N>& b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

/// Rescales the spin of `s` to the Bloch radius of `ref`, so that the
/// perturbed copy stays on the same sphere as the reference trajectory.
template <std::size_t N>
void match_spin_radius(StateVector<N>& s, const StateVector<N>& ref,
                       const StateLayout& layout) noexcept {
    if (!layout.spin) return;
    const auto [i, j, k] = *layout.spin;
    const double n = std::sqrt(s[i] * s[i] + s[j] * s[j] + s[k] * s[k]);
    const double r = std::sqrt(ref[i] * ref[i] + ref[j] * ref[j] + ref[k] * ref[k]);
    if (n > 0.0) {
        s[i] *= r / n;
        s[j] *= r / n;
        s[k] *= r / n;
    }
}

} // namespace detail

/// Two-trajectory Benettin estimate.  After the transient, a copy of the
/// state is displaced by d0 along a seeded random direction; every
/// renorm_interval the log growth of the separation is accumulated and the
/// separation rescaled back to d0.  The spin of the displaced copy is kept
/// on the Bloch sphere of the reference trajectory (radius 1 up to the
/// integrator's drift), and the reference separation for each interval is
/// the one actually measured after that projection.
template <std::size_t N, class Field>
LyapunovEstimate lyapunov_max(Field field, const StateVector<N>& s0, const StateLayout& layout,
                              const LyapunovOptions& opts, const IntegrationSpec& spec,
                              std::uint64_t seed) {
    validate(opts);
    validate(spec);

    auto base = make_stepper<N>(field, s0, 0.0, spec);
    if (opts.transient > 0.0) base.advance_to(opts.transient);
    const double t0 = base.t();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    StateVector<N> dir;
    double norm = 0.0;
    while (norm == 0.0) {
        for (auto& c : dir) c = normal(rng);
        norm = std::sqrt(std::inner_product(dir.begin(), dir.end(), dir.begin(), 0.0));
    }
    StateVector<N> shifted = base.y();
    for (std::size_t i = 0; i < N; ++i) shifted[i] += opts.d0 * dir[i] / norm;
    detail::match_spin_radius(shifted, base.y(), layout);
    double d_ref = detail::distance(shifted, base.y());
    if (!(d_ref > 0.0)) {
        throw RenormalizationError("initial perturbation vanished", t0, d_ref);
    }

    auto other = make_stepper<N>(field, shifted, t0, spec);

    LyapunovEstimate est;
    est.d0 = opts.d0;
    est.renorm_interval = opts.renorm_interval;
    est.n_renorm = opts.n_renorm;
    est.history.reserve(static_cast<std::size_t>(opts.n_renorm));
    est.times.reserve(static_cast<std::size_t>(opts.n_renorm));

    double sum = 0.0;
    for (int n = 1; n <= opts.n_renorm; ++n) {
        const double t_next = t0 + static_cast<double>(n) * opts.renorm_interval;
        base.advance_to(t_next);
        other.advance_to(t_next);
        const double d = detail::distance(other.y(), base.y());
        if (!std::isfinite(d) || d < std::numeric_limits<double>::min()) {
            throw RenormalizationError("separation left the representable range", t_next, d);
        }
        sum += std::log(d / d_ref);
        const double elapsed = static_cast<double>(n) * opts.renorm_interval;
        est.history.push_back(sum / elapsed);
        est.times.push_back(t_next);

        StateVector<N> rescaled = base.y();
        for (std::size_t i = 0; i < N; ++i) {
            rescaled[i] += (other.y()[i] - base.y()[i]) * (opts.d0 / d);
        }
        detail::match_spin_radius(rescaled, base.y(), layout);
        d_ref = detail::distance(rescaled, base.y());
        other.reset(rescaled);
    }
    est.lambda_max = est.history.back();
    return est;
}

// ---------------------------------------------------------------------------
// Levy flights

struct Flight {
    double tau_start = 0.0;
    double tau_end = 0.0;
    double dx = 0.0;
};

struct FlightOptions {
    double min_length = 10.0 * std::numbers::pi;  ///< five optical wavelengths
    double p_threshold = 0.1;
    double transient = kDefaultTransient;
    double max_sample_spacing = 0.1;
};

struct FlightStats {
    std::vector<Flight> flights;
    std::size_t count = 0;
    double min_length = 0.0;
};

/// A flight is a maximal run of samples over which p keeps one sign with
/// |p| > p_threshold, and over which x moves by at least min_length.
FlightStats levy_flights(const std::vector<double>& times, const std::vector<double>& x,
                         const std::vector<double>& p, const FlightOptions& opts);

template <std::size_t N>
FlightStats levy_flights(const Trajectory<N>& traj, const FlightOptions& opts,
                         const StateLayout& layout = {}) {
    std::vector<double> x, p;
    x.reserve(traj.states.size());
    p.reserve(traj.states.size());
    for (const auto& s : traj.states) {
        x.push_back(s[layout.x]);
        p.push_back(s[layout.p]);
    }
    return levy_flights(traj.times, x, p, opts);
}

// ---------------------------------------------------------------------------
// Physical experiments and sweeps

/// Everything needed to run one diagnostic on the cavity system.
struct Experiment {
    SystemParams params;
    InitialConditions initial;
    IntegrationSpec integration;
    SectionDef section;
    PoincareOptions poincare;
    LyapunovOptions lyapunov;
    FlightOptions flights;
    std::uint64_t seed = 1;
};

/// Trajectory in a uniform column layout: tau, then the state components of
/// the system selected by the temperature (7 at T = 0, 10 otherwise).
struct SampledTrajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    bool thermal = false;
};

SampledTrajectory simulate(const Experiment& e);
PoincareSection poincare(const Experiment& e);
LyapunovEstimate lyapunov_max(const Experiment& e);
FlightStats levy_flights(const Experiment& e);

enum class Diagnostic { Lyapunov, FlightCount };

std::string_view to_string(Diagnostic d) noexcept;
std::optional<Diagnostic> parse_diagnostic(std::string_view s) noexcept;

double evaluate_diagnostic(const Experiment& e, Diagnostic d);

enum class SweepAxisKind { Delta, Beta, P0 };

std::string_view to_string(SweepAxisKind k) noexcept;
std::optional<SweepAxisKind> parse_axis_kind(std::string_view s) noexcept;

/// Beta values of +inf denote zero temperature.
struct SweepAxis {
    SweepAxisKind kind = SweepAxisKind::Delta;
    std::vector<double> values;
};

struct SweepCell {
    std::vector<double> coords;  ///< one value per axis, in axis order
    double value = std::numeric_limits<double>::quiet_NaN();
    bool ok = false;
    std::string status;
    std::uint64_t seed = 0;
    SystemParams params;
    double p0 = 0.0;
};

struct SweepResult {
    std::vector<SweepAxis> axes;
    std::vector<SweepCell> cells;  ///< row-major, first axis slowest
    Diagnostic diagnostic = Diagnostic::Lyapunov;
};

inline constexpr std::size_t kDefaultMaxCells = 10000;

/// Applies the coordinates of one cell to the base experiment.
Experiment apply_cell(const Experiment& base, const std::vector<SweepAxis>& axes,
                      const std::vector<double>& coords);

/// Evaluates every grid cell independently on up to `threads` workers.
/// Cell failures are recorded in the cell; the sweep itself only throws for
/// an invalid grid.
SweepResult sweep(const std::vector<SweepAxis>& axes, const Experiment& base, Diagnostic diag,
                  int threads = 1, std::size_t max_cells = kDefaultMaxCells);

} // namespace cqed
