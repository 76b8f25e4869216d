#pragma once

// Direct complex-arithmetic evaluation of the thermal equations of motion on
// complex expectation values a(beta), a~(beta), S-, Sz.  Kept separate from
// the realified library code so the two can be compared.

#include <cmath>
#include <complex>

#include "cqed/model.hpp"

namespace oracle {

using cd = std::complex<double>;

struct ComplexState {
    double x, p, p_tilde;
    cd s_minus;  // sx + i sy
    double sz;
    cd a;        // a(beta)
    cd at;       // a~(beta)
};

struct ComplexDerivative {
    double x, p, p_tilde;
    cd s_minus;
    cd s_plus;
    double sz;
    cd a, a_dag, at, at_dag;
};

inline ComplexState from_state(const cqed::ThermalState& s) {
    return {s.x, s.p, s.p_tilde, {s.sx, s.sy}, s.sz, {s.ax, s.ay}, {s.atx, s.aty}};
}

// Literal form: every bracket transcribed term by term.  The dS+ bracket
// uses B1; the dS- bracket is B2 as written.
inline ComplexDerivative literal(const ComplexState& z, double delta, double alpha,
                                 double sh, double ch) {
    const cd i{0.0, 1.0};
    const cd a = z.a, ad = std::conj(z.a);
    const cd at = z.at, atd = std::conj(z.at);
    const cd sm = z.s_minus, sp = std::conj(z.s_minus);
    const double cx = std::cos(z.x), sx = std::sin(z.x);

    const cd b1 = a * sh - at * sh + atd * ch - ad * ch;
    const cd b2 = ad * sh - atd * sh + at * ch - a * ch;

    ComplexDerivative d{};
    d.x = alpha * (z.p - z.p_tilde);
    const cd force = (ad * ch - atd * ch - a * sh + at * sh) * sm +
                     (a * ch + atd * sh - ad * sh - at * ch) * sp;
    d.p = (force * sx).real();
    d.p_tilde = 0.0;
    d.s_plus = i * delta * sp + 2.0 * i * z.sz * b1 * cx;
    d.s_minus = -i * delta * sm - 2.0 * i * z.sz * b2 * cx;
    d.a_dag = -i * (sm * sh - sp * ch) * cx;
    d.a = -i * (sm * ch - sp * sh) * cx;
    d.at = -i * (sp * sh - sm * ch) * cx;
    d.at_dag = i * (sp * ch - sm * sh) * cx;
    d.sz = (i * (b1 * sm - b2 * sp) * cx).real();
    return d;
}

// Heisenberg equations of H - H~ in the rotating frame at the cavity
// frequency, with the bare field a = ch a(beta) + sh a~+(beta) and the
// interaction -(a+ S- + a S+) cos x of the zero-temperature model.
inline ComplexDerivative consistent(const ComplexState& z, double delta, double alpha,
                                    double sh, double ch) {
    const cd i{0.0, 1.0};
    const cd bare = ch * z.a + sh * std::conj(z.at);
    const cd bare_dag = std::conj(bare);
    const cd sm = z.s_minus, sp = std::conj(z.s_minus);
    const double cx = std::cos(z.x), sx = std::sin(z.x);

    ComplexDerivative d{};
    d.x = alpha * z.p;
    d.p = (-(bare_dag * sm + bare * sp) * sx).real();
    d.p_tilde = 0.0;
    d.s_minus = i * delta * sm - 2.0 * i * z.sz * bare * cx;
    d.s_plus = std::conj(d.s_minus);
    d.sz = (-i * (bare_dag * sm - bare * sp) * cx).real();
    d.a = i * ch * sm * cx;
    d.a_dag = std::conj(d.a);
    d.at = i * sh * sp * cx;
    d.at_dag = std::conj(d.at);
    return d;
}

inline cqed::ThermalDerivative realify(const ComplexDerivative& d) {
    cqed::ThermalDerivative r;
    r.x = d.x;
    r.p = d.p;
    r.p_tilde = d.p_tilde;
    r.sx = d.s_minus.real();
    r.sy = d.s_minus.imag();
    r.sz = d.sz;
    r.ax = d.a.real();
    r.ay = d.a.imag();
    r.atx = d.at.real();
    r.aty = d.at.imag();
    return r;
}

inline cqed::ThermalDerivative evaluate(const cqed::ThermalState& s,
                                        const cqed::SystemParams& params,
                                        const cqed::ThermalFactors& f) {
    const auto z = from_state(s);
    const auto d = params.variant == cqed::Variant::Literal
                       ? literal(z, params.delta, params.alpha, f.sinh_theta, f.cosh_theta)
                       : consistent(z, params.delta, params.alpha, f.sinh_theta, f.cosh_theta);
    return realify(d);
}

inline double max_abs_diff(const cqed::ThermalDerivative& a, const cqed::ThermalDerivative& b) {
    const auto va = a.to_array();
    const auto vb = b.to_array();
    double m = 0.0;
    for (std::size_t k = 0; k < va.size(); ++k) m = std::max(m, std::abs(va[k] - vb[k]));
    return m;
}

} // namespace oracle
