#include "cqed/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

namespace cqed {

std::string_view to_string(Direction d) noexcept {
    switch (d) {
    case Direction::Up:
        return "up";
    case Direction::Down:
        return "down";
    case Direction::Both:
        return "both";
    }
    return "up";
}

std::optional<Direction> parse_direction(std::string_view s) noexcept {
    if (s == "up") return Direction::Up;
    if (s == "down") return Direction::Down;
    if (s == "both") return Direction::Both;
    return std::nullopt;
}

std::string_view to_string(SectionDef::Kind k) noexcept {
    switch (k) {
    case SectionDef::Kind::AyZeroUp:
        return "ay_zero_up";
    case SectionDef::Kind::CosXZeroUp:
        return "cos_x_zero_up";
    case SectionDef::Kind::Custom:
        return "custom";
    }
    return "ay_zero_up";
}

std::optional<SectionDef::Kind> parse_section_kind(std::string_view s) noexcept {
    if (s == "ay_zero_up") return SectionDef::Kind::AyZeroUp;
    if (s == "cos_x_zero_up") return SectionDef::Kind::CosXZeroUp;
    if (s == "custom") return SectionDef::Kind::Custom;
    return std::nullopt;
}

std::string_view to_string(Diagnostic d) noexcept {
    return d == Diagnostic::Lyapunov ? "lyapunov" : "flight_count";
}

std::optional<Diagnostic> parse_diagnostic(std::string_view s) noexcept {
    if (s == "lyapunov") return Diagnostic::Lyapunov;
    if (s == "flight_count") return Diagnostic::FlightCount;
    return std::nullopt;
}

std::string_view to_string(SweepAxisKind k) noexcept {
    switch (k) {
    case SweepAxisKind::Delta:
        return "delta";
    case SweepAxisKind::Beta:
        return "beta";
    case SweepAxisKind::P0:
        return "p0";
    }
    return "delta";
}

std::optional<SweepAxisKind> parse_axis_kind(std::string_view s) noexcept {
    if (s == "delta") return SweepAxisKind::Delta;
    if (s == "beta") return SweepAxisKind::Beta;
    if (s == "p0") return SweepAxisKind::P0;
    return std::nullopt;
}

void validate(const LyapunovOptions& opts) {
    if (!(opts.d0 >= 1e-10 && opts.d0 <= 1e-6)) {
        throw InvalidArgument("lyapunov: d0 must lie in [1e-10, 1e-6]");
    }
    if (!(std::isfinite(opts.renorm_interval) && opts.renorm_interval > 0.0)) {
        throw InvalidArgument("lyapunov: renorm_interval must be positive");
    }
    if (opts.n_renorm < 100) throw InvalidArgument("lyapunov: n_renorm must be >= 100");
    if (!(opts.transient >= 0.0)) throw InvalidArgument("lyapunov: transient must be >= 0");
}

FlightStats levy_flights(const std::vector<double>& times, const std::vector<double>& x,
                         const std::vector<double>& p, const FlightOptions& opts) {
    if (times.size() != x.size() || times.size() != p.size()) {
        throw InvalidArgument("levy_flights: column lengths differ");
    }
    if (!(opts.min_length > 0.0) || !(opts.p_threshold >= 0.0)) {
        throw InvalidArgument("levy_flights: min_length must be positive, p_threshold >= 0");
    }

    const auto first = static_cast<std::size_t>(
        std::lower_bound(times.begin(), times.end(), opts.transient) - times.begin());
    const double spacing_limit = opts.max_sample_spacing * (1.0 + 1e-9);
    for (std::size_t i = first + 1; i < times.size(); ++i) {
        if (times[i] - times[i - 1] > spacing_limit) {
            std::ostringstream msg;
            msg << "levy_flights: sample spacing " << times[i] - times[i - 1] << " at tau "
                << times[i - 1] << " exceeds " << opts.max_sample_spacing;
            throw SamplingResolutionError(msg.str());
        }
    }

    FlightStats stats;
    stats.min_length = opts.min_length;
    auto sign_of = [&](double v) { return v > opts.p_threshold ? 1 : (v < -opts.p_threshold ? -1 : 0); };

    std::size_t i = first;
    while (i < times.size()) {
        const int sign = sign_of(p[i]);
        if (sign == 0) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < times.size() && sign_of(p[j + 1]) == sign) ++j;
        const double dx = x[j] - x[i];
        if (std::abs(dx) >= opts.min_length) stats.flights.push_back({times[i], times[j], dx});
        i = j + 1;
    }
    stats.count = stats.flights.size();
    return stats;
}

SampledTrajectory simulate(const Experiment& e) {
    return with_system(e.params, [&](auto system) {
        using System = decltype(system);
        const auto s0 = initial_array<System>(e.initial);
        auto traj = integrate<System::kDim>(system, s0, e.integration);
        SampledTrajectory out;
        out.thermal = System::kDim == ThermalState::kDim;
        out.times = std::move(traj.times);
        out.states.reserve(traj.states.size());
        for (const auto& s : traj.states) out.states.emplace_back(s.begin(), s.end());
        return out;
    });
}

PoincareSection poincare(const Experiment& e) {
    return with_system(e.params, [&](auto system) {
        using System = decltype(system);
        const auto s0 = initial_array<System>(e.initial);
        return poincare<System::kDim>(system, s0, System::kLayout, e.section, e.poincare,
                                      e.integration);
    });
}

LyapunovEstimate lyapunov_max(const Experiment& e) {
    return with_system(e.params, [&](auto system) {
        using System = decltype(system);
        const auto s0 = initial_array<System>(e.initial);
        return lyapunov_max<System::kDim>(system, s0, System::kLayout, e.lyapunov, e.integration,
                                          e.seed);
    });
}

FlightStats levy_flights(const Experiment& e) {
    return with_system(e.params, [&](auto system) {
        using System = decltype(system);
        const auto s0 = initial_array<System>(e.initial);
        const auto traj = integrate<System::kDim>(system, s0, e.integration);
        return levy_flights<System::kDim>(traj, e.flights, System::kLayout);
    });
}

double evaluate_diagnostic(const Experiment& e, Diagnostic d) {
    if (d == Diagnostic::Lyapunov) return lyapunov_max(e).lambda_max;
    return static_cast<double>(levy_flights(e).count);
}

Experiment apply_cell(const Experiment& base, const std::vector<SweepAxis>& axes,
                      const std::vector<double>& coords) {
    Experiment e = base;
    for (std::size_t a = 0; a < axes.size(); ++a) {
        const double v = coords[a];
        switch (axes[a].kind) {
        case SweepAxisKind::Delta:
            e.params.delta = v;
            break;
        case SweepAxisKind::Beta:
            if (std::isinf(v) && v > 0.0) {
                e.params.temperature = ZeroTemperature{};
            } else {
                e.params.temperature = InverseTemperature{v};
            }
            break;
        case SweepAxisKind::P0:
            e.initial.p = v;
            break;
        }
    }
    return e;
}

SweepResult sweep(const std::vector<SweepAxis>& axes, const Experiment& base, Diagnostic diag,
                  int threads, std::size_t max_cells) {
    if (axes.empty()) throw InvalidArgument("sweep: at least one axis is required");
    std::size_t total = 1;
    for (const auto& axis : axes) {
        if (axis.values.empty()) {
            throw InvalidArgument("sweep: axis '" + std::string(to_string(axis.kind)) +
                                  "' has no points");
        }
        total *= axis.values.size();
        if (total > max_cells) {
            throw InvalidArgument("sweep: grid exceeds the cell budget of " +
                                  std::to_string(max_cells));
        }
    }

    SweepResult result;
    result.axes = axes;
    result.diagnostic = diag;
    result.cells.resize(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        auto& cell = result.cells[idx];
        cell.coords.resize(axes.size());
        for (std::size_t a = axes.size(); a-- > 0;) {
            const std::size_t n = axes[a].values.size();
            cell.coords[a] = axes[a].values[rem % n];
            rem /= n;
        }
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t idx = next.fetch_add(1); idx < total; idx = next.fetch_add(1)) {
            auto& cell = result.cells[idx];
            const Experiment e = apply_cell(base, axes, cell.coords);
            cell.seed = e.seed;
            cell.params = e.params;
            cell.p0 = e.initial.p;
            try {
                cell.value = evaluate_diagnostic(e, diag);
                cell.ok = true;
                cell.status = "ok";
            } catch (const IntegrationDiverged& err) {
                cell.status = std::string("diverged at tau=") + std::to_string(err.last_tau()) +
                              ": " + err.what();
            } catch (const std::exception& err) {
                cell.status = err.what();
            }
        }
    };

    const int n_workers = std::max(1, std::min<int>(threads, static_cast<int>(total)));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return result;
}

} // namespace cqed
