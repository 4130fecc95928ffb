#include "echosim/pulse.hpp"

#include <algorithm>
#include <cmath>

namespace echosim {

double envelope_value(const PulseEnvelope& p, double t) {
    switch (p.shape) {
        case PulseShape::gaussian: {
            const double x = (t - p.center) / p.width;
            if (std::abs(x) > 4.0) return 0.0;
            return p.peak_rabi * std::exp(-x * x);
        }
        case PulseShape::rectangular: {
            const double lo = p.center - 0.5 * p.width;
            const double hi = p.center + 0.5 * p.width;
            return (t >= lo && t < hi) ? p.peak_rabi : 0.0;
        }
        case PulseShape::sampled: {
            if (p.samples.size() < 2 || p.sample_dt <= 0.0)
                throw ValidationError("sampled envelope: needs >= 2 samples and a positive dt");
            const double tmax = p.sample_t0 + p.sample_dt * static_cast<double>(p.samples.size() - 1);
            // zero outside the sample range, matching the other shapes, so a
            // sampled pulse can sit in a schedule with gaps around it
            if (t < p.sample_t0 || t > tmax) return 0.0;
            const double u = (t - p.sample_t0) / p.sample_dt;
            const auto i = static_cast<std::size_t>(u);
            const std::size_t j = std::min(i + 1, p.samples.size() - 1);
            const double f = u - static_cast<double>(i);
            return p.peak_rabi * ((1.0 - f) * p.samples[i] + f * p.samples[j]);
        }
    }
    return 0.0;
}

cxd sample_envelope(const PulseEnvelope& p, double t) {
    return envelope_value(p, t) * std::polar(1.0, p.phase);
}

PulseArea pulse_area(const PulseEnvelope& p) {
    switch (p.shape) {
        case PulseShape::gaussian:
            return {p.peak_rabi * p.width * std::sqrt(kPi), false};
        case PulseShape::rectangular:
            return {p.peak_rabi * p.width, false};
        case PulseShape::sampled: {
            // trapezoid over the stored samples
            double s = 0.0;
            for (std::size_t i = 0; i + 1 < p.samples.size(); ++i)
                s += 0.5 * (p.samples[i] + p.samples[i + 1]) * p.sample_dt;
            return {p.peak_rabi * s, true};
        }
    }
    return {0.0, true};
}

double solve_for_peak(PulseShape shape, double width, double target_area) {
    if (!(target_area > 0.0) || !(width > 0.0))
        throw ValidationError("solve_for_peak: width and area must be positive");
    switch (shape) {
        case PulseShape::gaussian:
            return target_area / (width * std::sqrt(kPi));
        case PulseShape::rectangular:
            return target_area / width;
        case PulseShape::sampled:
            throw ValidationError("solve_for_peak: sampled shapes have no closed-form area");
    }
    return 0.0;
}

PulseEnvelope gaussian_pulse(double center, double width, double area,
                             DriveLeg leg, double phase) {
    PulseEnvelope p;
    p.shape = PulseShape::gaussian;
    p.center = center;
    p.width = width;
    p.peak_rabi = solve_for_peak(PulseShape::gaussian, width, area);
    p.leg = leg;
    p.phase = phase;
    return p;
}

PulseEnvelope rectangular_pulse(double center, double duration, double area,
                                DriveLeg leg, double phase) {
    PulseEnvelope p;
    p.shape = PulseShape::rectangular;
    p.center = center;
    p.width = duration;
    p.peak_rabi = solve_for_peak(PulseShape::rectangular, duration, area);
    p.leg = leg;
    p.phase = phase;
    return p;
}

namespace {

double mean_center(const std::vector<PulseEnvelope>& packet) {
    double s = 0.0;
    for (const auto& p : packet) s += p.center;
    return s / static_cast<double>(packet.size());
}

}  // namespace

double support_halfwidth(const PulseEnvelope& p) {
    switch (p.shape) {
        case PulseShape::rectangular:
            return 0.5 * p.width;
        case PulseShape::sampled:
            return p.samples.size() < 2
                       ? 0.0
                       : 0.5 * p.sample_dt * static_cast<double>(p.samples.size() - 1);
        case PulseShape::gaussian:
        default:
            return 4.0 * p.width;
    }
}

double PulseSchedule::t2() const {
    if (query.empty()) throw ValidationError("schedule: empty query packet");
    return mean_center(query);
}

double PulseSchedule::t3() const {
    if (reference.empty()) throw ValidationError("schedule: empty reference packet");
    return mean_center(reference);
}

std::vector<PulseEnvelope> PulseSchedule::leg_a_pulses() const {
    std::vector<PulseEnvelope> out;
    out.push_back(write);
    out.insert(out.end(), query.begin(), query.end());
    out.insert(out.end(), reference.begin(), reference.end());
    std::sort(out.begin(), out.end(),
              [](const PulseEnvelope& a, const PulseEnvelope& b) { return a.center < b.center; });
    return out;
}

std::vector<std::string> validate_schedule(const PulseSchedule& s, double t_end) {
    std::vector<std::string> issues;
    if (s.query.empty()) issues.push_back("schedule: query packet is empty");
    if (s.reference.empty()) issues.push_back("schedule: reference packet is empty");
    if (!issues.empty()) return issues;

    const double t1 = s.t1(), t2 = s.t2(), t3 = s.t3();
    if (!(t1 < t2)) issues.push_back("schedule: T1 must precede T2");
    if (!(t2 < t3)) issues.push_back("schedule: T2 must precede T3");

    const double w_lo = s.write.center - support_halfwidth(s.write);
    const double w_hi = s.write.center + support_halfwidth(s.write);
    for (const auto* packet : {&s.query, &s.reference}) {
        for (const auto& p : *packet) {
            if (p.center - support_halfwidth(p) < w_hi && p.center + support_halfwidth(p) > w_lo)
                issues.push_back("schedule: packet pulse overlaps the write pulse");
        }
    }
    if (!(s.t4() < t_end))
        issues.push_back("schedule: echo time T3+T2-T1 falls outside the time grid");
    return issues;
}

std::vector<PulseEnvelope> make_packet(double nominal, double spacing,
                                       const std::vector<double>& area_scales,
                                       double base_area, double width, PulseShape shape) {
    if (area_scales.empty()) throw ValidationError("make_packet: no sub-pulses");
    const auto n = static_cast<double>(area_scales.size());
    std::vector<PulseEnvelope> out;
    out.reserve(area_scales.size());
    for (std::size_t m = 0; m < area_scales.size(); ++m) {
        const double off = (static_cast<double>(m) - 0.5 * (n - 1.0)) * spacing;
        const double area = base_area * area_scales[m];
        out.push_back(shape == PulseShape::gaussian
                          ? gaussian_pulse(nominal + off, width, area)
                          : rectangular_pulse(nominal + off, width, area));
    }
    return out;
}

}  // namespace echosim
