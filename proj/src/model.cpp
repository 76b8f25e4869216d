#include "cqed/model.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "cqed/errors.hpp"

namespace cqed {

std::string_view to_string(Variant v) noexcept {
    return v == Variant::Literal ? "literal" : "consistent";
}

std::optional<Variant> parse_variant(std::string_view s) noexcept {
    if (s == "literal") return Variant::Literal;
    if (s == "consistent") return Variant::Consistent;
    return std::nullopt;
}

void validate(const SystemParams& params) {
    if (!std::isfinite(params.alpha) || params.alpha <= 0.0) {
        throw InvalidArgument("alpha must be positive and finite");
    }
    if (!std::isfinite(params.delta)) throw InvalidArgument("delta must be finite");
    validate(params.temperature);
}

ZeroTDerivative deriv_zero_t(const ZeroTState& s, const SystemParams& params) noexcept {
    const double c = std::cos(s.x);
    const double sn = std::sin(s.x);
    const double delta = params.delta;

    ZeroTDerivative d;
    d.x = params.alpha * s.p;
    d.p = -2.0 * (s.ax * s.sx + s.ay * s.sy) * sn;
    d.sx = -delta * s.sy + 2.0 * s.ay * s.sz * c;
    d.sy = delta * s.sx - 2.0 * s.ax * s.sz * c;
    d.sz = 2.0 * (s.ax * s.sy - s.ay * s.sx) * c;
    d.ax = -s.sy * c;
    d.ay = s.sx * c;
    return d;
}

namespace {

// Effective field F = c A + s conj(A~) drives the atom; A and A~ are in turn
// driven by S- and S+ with weights c and s.
ThermalDerivative deriv_consistent(const ThermalState& s, const SystemParams& params,
                                   const ThermalFactors& f) noexcept {
    const double c = std::cos(s.x);
    const double sn = std::sin(s.x);
    const double ch = f.cosh_theta;
    const double sh = f.sinh_theta;
    const double fx = ch * s.ax + sh * s.atx;
    const double fy = ch * s.ay - sh * s.aty;
    const double delta = params.delta;

    ThermalDerivative d;
    d.x = params.alpha * s.p;
    d.p = -2.0 * (fx * s.sx + fy * s.sy) * sn;
    d.p_tilde = 0.0;
    d.sx = -delta * s.sy + 2.0 * fy * s.sz * c;
    d.sy = delta * s.sx - 2.0 * fx * s.sz * c;
    d.sz = 2.0 * (fx * s.sy - fy * s.sx) * c;
    d.ax = -(ch * s.sy) * c;
    d.ay = (ch * s.sx) * c;
    d.atx = (sh * s.sy) * c;
    d.aty = (sh * s.sx) * c;
    return d;
}

// Literal form, realified with a <-> ax + i ay, a~ <-> atx + i aty,
// S- <-> sx + i sy.  B1 = (sh - ch)(ax - atx) + i (sh + ch)(ay - aty).
ThermalDerivative deriv_literal(const ThermalState& s, const SystemParams& params,
                                const ThermalFactors& f) noexcept {
    const double c = std::cos(s.x);
    const double sn = std::sin(s.x);
    const double ch = f.cosh_theta;
    const double sh = f.sinh_theta;
    const double b1x = (sh - ch) * (s.ax - s.atx);
    const double b1y = (sh + ch) * (s.ay - s.aty);
    const double delta = params.delta;

    ThermalDerivative d;
    d.x = params.alpha * (s.p - s.p_tilde);
    d.p = -2.0 * (b1x * s.sx - b1y * s.sy) * sn;
    d.p_tilde = 0.0;
    d.sx = delta * s.sy - 2.0 * s.sz * b1y * c;
    d.sy = -delta * s.sx - 2.0 * s.sz * b1x * c;
    d.sz = -2.0 * (b1x * s.sy + b1y * s.sx) * c;
    d.ax = (ch + sh) * s.sy * c;
    d.ay = -(ch - sh) * s.sx * c;
    d.atx = -(sh + ch) * s.sy * c;
    d.aty = (ch - sh) * s.sx * c;
    return d;
}

} // namespace

ThermalDerivative deriv_thermal(const ThermalState& s, const SystemParams& params,
                                const ThermalFactors& f) noexcept {
    return params.variant == Variant::Literal ? deriv_literal(s, params, f)
                                              : deriv_consistent(s, params, f);
}

double energy_zero_t(const ZeroTState& s, const SystemParams& params) noexcept {
    return 0.5 * params.alpha * s.p * s.p - params.delta * s.sz -
           2.0 * (s.ax * s.sx + s.ay * s.sy) * std::cos(s.x);
}

double excitation_zero_t(const ZeroTState& s) noexcept {
    return s.ax * s.ax + s.ay * s.ay + s.sz;
}

double spin_norm(const ZeroTState& s) noexcept {
    return s.sx * s.sx + s.sy * s.sy + s.sz * s.sz;
}

double spin_norm(const ThermalState& s) noexcept {
    return s.sx * s.sx + s.sy * s.sy + s.sz * s.sz;
}

std::complex<double> effective_field(const ThermalState& s, const ThermalFactors& f) noexcept {
    return {f.cosh_theta * s.ax + f.sinh_theta * s.atx, f.cosh_theta * s.ay - f.sinh_theta * s.aty};
}

double energy_thermal(const ThermalState& s, const SystemParams& params,
                      const ThermalFactors& f) noexcept {
    const auto field = effective_field(s, f);
    return 0.5 * params.alpha * s.p * s.p - params.delta * s.sz -
           2.0 * (field.real() * s.sx + field.imag() * s.sy) * std::cos(s.x);
}

double excitation_thermal(const ThermalState& s, const ThermalFactors& f) noexcept {
    return std::norm(effective_field(s, f)) + s.sz;
}

SpinDrive spin_drive(const ThermalState& s, const ThermalFactors& f, Variant variant) noexcept {
    if (variant == Variant::Consistent) {
        const auto field = effective_field(s, f);
        return {-std::conj(field), -field};
    }
    const std::complex<double> a{s.ax, s.ay};
    const std::complex<double> at{s.atx, s.aty};
    const double sh = f.sinh_theta;
    const double ch = f.cosh_theta;
    return {a * sh - at * sh + std::conj(at) * ch - std::conj(a) * ch,
            std::conj(a) * sh - std::conj(at) * sh + at * ch - a * ch};
}

namespace {

ThermalState random_thermal_state(std::mt19937_64& rng, bool zero_tilde) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    ThermalState s;
    s.x = 3.0 * u(rng);
    s.p = 5.0 * u(rng);
    s.sx = u(rng);
    s.sy = u(rng);
    s.sz = u(rng);
    const double n = std::sqrt(spin_norm(s));
    s.sx /= n;
    s.sy /= n;
    s.sz /= n;
    s.ax = u(rng);
    s.ay = u(rng);
    if (!zero_tilde) {
        s.p_tilde = u(rng);
        s.atx = u(rng);
        s.aty = u(rng);
    }
    return s;
}

} // namespace

AxiomReport check_axioms(Variant variant, std::uint64_t seed, int samples) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> beta_dist(0.05, 20.0);
    std::uniform_real_distribution<double> delta_dist(-3.0, 3.0);

    AxiomReport report{true, true, true, {}};
    std::ostringstream detail;
    const ThermalFactors zero{0.0, 1.0};

    for (int i = 0; i < samples; ++i) {
        SystemParams params;
        params.delta = delta_dist(rng);
        params.variant = variant;
        params.temperature = InverseTemperature{beta_dist(rng)};
        const auto f = thermal_factors(params.temperature);

        const auto drive = spin_drive(random_thermal_state(rng, false), f, variant);
        const double scale = 1.0 + std::abs(drive.b1);
        if (std::abs(drive.b2 - std::conj(drive.b1)) > 1e-14 * scale && report.hermiticity) {
            report.hermiticity = false;
            detail << "A1 fails: B2 != conj(B1) at sample " << i << "; ";
        }

        const auto s = random_thermal_state(rng, true);
        const auto d = deriv_thermal(s, params, zero);
        if ((d.p_tilde != 0.0 || d.atx != 0.0 || d.aty != 0.0) && report.decoupling) {
            report.decoupling = false;
            detail << "A2 fails: tilde derivatives nonzero at theta=0 (sample " << i << "); ";
        }

        const ZeroTState z{s.x, s.p, s.sx, s.sy, s.sz, s.ax, s.ay};
        const auto dz = deriv_zero_t(z, params);
        const bool same = d.x == dz.x && d.p == dz.p && d.sx == dz.sx && d.sy == dz.sy &&
                          d.sz == dz.sz && d.ax == dz.ax && d.ay == dz.ay;
        if (!same && report.reduction) {
            report.reduction = false;
            detail << "A3 fails: theta=0 flow differs from zero-temperature flow (sample " << i
                   << "); ";
        }
    }
    report.detail = detail.str();
    return report;
}

namespace {

void check_bloch(double sx, double sy, double sz) {
    const double n = sx * sx + sy * sy + sz * sz;
    if (!(std::abs(n - 1.0) <= 1e-12)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "initial Bloch vector must have unit norm, |s|^2 = " << n;
        throw InvalidArgument(msg.str());
    }
}

double resolve_sx(const InitialConditions& ic) {
    if (ic.sx) return *ic.sx;
    const double rest = 1.0 - ic.sz * ic.sz - ic.sy * ic.sy;
    if (rest < -1e-12) throw InvalidArgument("sy^2 + sz^2 exceeds 1; no admissible sx");
    return std::sqrt(std::max(rest, 0.0));
}

} // namespace

ZeroTState make_zero_t_state(const InitialConditions& ic) {
    const double sx = resolve_sx(ic);
    check_bloch(sx, ic.sy, ic.sz);
    return {ic.x, ic.p, sx, ic.sy, ic.sz, ic.ax, ic.ay};
}

ThermalState make_thermal_state(const InitialConditions& ic) {
    const double sx = resolve_sx(ic);
    check_bloch(sx, ic.sy, ic.sz);
    return {ic.x, ic.p, ic.p_tilde, sx, ic.sy, ic.sz, ic.ax, ic.ay, ic.atx, ic.aty};
}

} // namespace cqed
