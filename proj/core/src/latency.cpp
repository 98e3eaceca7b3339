#include "tolldag/latency.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "tolldag/errors.hpp"

namespace tolldag {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_nonnegative(double w) {
    if (!(w >= 0.0)) {
        throw NegativeFlow("latency evaluated at negative or NaN flow " + std::to_string(w));
    }
}

// Composite 5-point Gauss-Legendre rule over [0, w].
double gauss_legendre_integral(const std::function<double(double)>& f, double w) {
    static constexpr std::array<double, 5> nodes = {0.0, -0.5384693101056831, 0.5384693101056831,
                                                    -0.9061798459386640, 0.9061798459386640};
    static constexpr std::array<double, 5> weights = {0.5688888888888889, 0.4786286704993665,
                                                      0.4786286704993665, 0.2369268850561891,
                                                      0.2369268850561891};
    constexpr int panels = 64;
    const double h = w / panels;
    double total = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double mid = (k + 0.5) * h;
        double panel = 0.0;
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            panel += weights[q] * f(mid + 0.5 * h * nodes[q]);
        }
        total += 0.5 * h * panel;
    }
    return total;
}

}  // namespace

LatencyFn LatencyFn::affine(double theta1, double theta0) {
    return LatencyFn(AffineLatency{theta1, theta0});
}

LatencyFn LatencyFn::bpr(double free_flow_time, double capacity, double alpha, double power) {
    return LatencyFn(BprLatency{free_flow_time, capacity, alpha, power});
}

LatencyFn LatencyFn::custom(std::function<double(double)> value,
                            std::function<double(double)> derivative) {
    return LatencyFn(CustomLatency{std::move(value), std::move(derivative)});
}

double LatencyFn::value(double w) const {
    require_nonnegative(w);
    return std::visit(
        overloaded{
            [w](const AffineLatency& a) { return a.theta1 * w + a.theta0; },
            [w](const BprLatency& b) {
                return b.free_flow_time * (1.0 + b.alpha * std::pow(w / b.capacity, b.power));
            },
            [w](const CustomLatency& c) { return c.value(w); },
        },
        kind_);
}

double LatencyFn::derivative(double w) const {
    require_nonnegative(w);
    return std::visit(
        overloaded{
            [](const AffineLatency& a) { return a.theta1; },
            [w](const BprLatency& b) {
                return b.free_flow_time * b.alpha * b.power *
                       std::pow(w / b.capacity, b.power - 1.0) / b.capacity;
            },
            [w](const CustomLatency& c) { return c.derivative(w); },
        },
        kind_);
}

double LatencyFn::second_derivative(double w) const {
    require_nonnegative(w);
    return std::visit(
        overloaded{
            [](const AffineLatency&) { return 0.0; },
            [w](const BprLatency& b) {
                if (b.power == 1.0) return 0.0;
                return b.free_flow_time * b.alpha * b.power * (b.power - 1.0) *
                       std::pow(w / b.capacity, b.power - 2.0) / (b.capacity * b.capacity);
            },
            [w](const CustomLatency& c) {
                const double h = 1e-6 * std::max(1.0, std::abs(w));
                const double lo = std::max(0.0, w - h);
                return (c.derivative(w + h) - c.derivative(lo)) / (w + h - lo);
            },
        },
        kind_);
}

double LatencyFn::integral(double w) const {
    require_nonnegative(w);
    return std::visit(
        overloaded{
            [w](const AffineLatency& a) { return 0.5 * a.theta1 * w * w + a.theta0 * w; },
            [w](const BprLatency& b) {
                return b.free_flow_time *
                       (w + b.alpha * b.capacity / (b.power + 1.0) *
                                std::pow(w / b.capacity, b.power + 1.0));
            },
            [w](const CustomLatency& c) { return gauss_legendre_integral(c.value, w); },
        },
        kind_);
}

void LatencyFn::validate(double max_flow) const {
    std::visit(
        overloaded{
            [](const AffineLatency& a) {
                if (!(a.theta1 > 0.0) || !std::isfinite(a.theta1)) {
                    throw ValidationError("affine latency requires theta1 > 0");
                }
                if (!(a.theta0 >= 0.0) || !std::isfinite(a.theta0)) {
                    throw ValidationError("affine latency requires theta0 >= 0");
                }
            },
            [](const BprLatency& b) {
                if (!(b.free_flow_time > 0.0 && b.capacity > 0.0 && b.alpha > 0.0 &&
                      b.power >= 1.0)) {
                    throw ValidationError(
                        "bpr latency requires free_flow_time, capacity, alpha > 0 and power >= 1");
                }
            },
            [max_flow](const CustomLatency& c) {
                if (!c.value || !c.derivative) {
                    throw ValidationError("custom latency requires value and derivative");
                }
                constexpr int grid = 64;
                double prev = c.value(0.0);
                for (int k = 1; k <= grid; ++k) {
                    const double cur = c.value(max_flow * k / grid);
                    if (!(cur > prev)) {
                        throw ValidationError("custom latency is not strictly increasing");
                    }
                    prev = cur;
                }
            },
        },
        kind_);
}

bool LatencyFn::operator==(const LatencyFn& other) const {
    if (const auto* a = as_affine()) {
        const auto* b = other.as_affine();
        return b != nullptr && *a == *b;
    }
    if (const auto* a = as_bpr()) {
        const auto* b = other.as_bpr();
        return b != nullptr && *a == *b;
    }
    return false;
}

}  // namespace tolldag
