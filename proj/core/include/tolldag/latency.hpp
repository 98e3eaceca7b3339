#pragma once

#include <functional>
#include <variant>

namespace tolldag {

/// s(w) = theta1 * w + theta0
struct AffineLatency {
    double theta1 = 1.0;
    double theta0 = 0.0;

    bool operator==(const AffineLatency&) const = default;
};

/// Bureau of Public Roads form: s(w) = t0 * (1 + alpha * (w / capacity)^power).
struct BprLatency {
    double free_flow_time = 1.0;
    double capacity = 1.0;
    double alpha = 0.15;
    double power = 4.0;

    bool operator==(const BprLatency&) const = default;
};

/// Arbitrary strictly increasing, continuously differentiable latency.
struct CustomLatency {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

/// Per-arc latency function. Affine latencies are the common case and are the
/// only kind admitted by the discrete toll dynamics; the equilibrium and
/// social-optimum solvers accept every kind.
class LatencyFn {
public:
    LatencyFn() = default;

    static LatencyFn affine(double theta1, double theta0);
    static LatencyFn bpr(double free_flow_time, double capacity, double alpha = 0.15,
                         double power = 4.0);
    static LatencyFn custom(std::function<double(double)> value,
                            std::function<double(double)> derivative);

    /// s(w). Throws NegativeFlow for w < 0.
    double value(double w) const;
    /// ds/dw at w. Throws NegativeFlow for w < 0.
    double derivative(double w) const;
    double second_derivative(double w) const;
    /// Integral of s over [0, w]. Closed form for affine and BPR kinds.
    double integral(double w) const;

    bool is_affine() const noexcept { return std::holds_alternative<AffineLatency>(kind_); }
    const AffineLatency* as_affine() const noexcept { return std::get_if<AffineLatency>(&kind_); }
    const BprLatency* as_bpr() const noexcept { return std::get_if<BprLatency>(&kind_); }

    /// Throws ValidationError when the parameters break monotonicity, checking
    /// custom kinds on a grid over [0, max_flow].
    void validate(double max_flow) const;

    /// Custom latencies never compare equal, even to themselves.
    bool operator==(const LatencyFn& other) const;

private:
    using Kind = std::variant<AffineLatency, BprLatency, CustomLatency>;

    explicit LatencyFn(Kind kind) : kind_(std::move(kind)) {}

    Kind kind_ = AffineLatency{};
};

}  // namespace tolldag
