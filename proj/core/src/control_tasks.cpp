#include "lrq/control_tasks.hpp"

#include <cmath>
#include <numbers>

#include "lrq/errors.hpp"

namespace lrq {

double wrap_into(double x, Interval bounds) {
    const double period = bounds.width();
    const double center = 0.5 * (bounds.lo + bounds.hi);
    double w = center + std::remainder(x - center, period);
    if (w <= bounds.lo) w += period;
    if (w > bounds.hi) w = bounds.hi;
    return w;
}

void ControlTask::project(std::span<double> state) const {
    for (std::size_t d = 0; d < state_bounds.size(); ++d) {
        if (boundary[d] == Boundary::Wrap) {
            state[d] = wrap_into(state[d], state_bounds[d]);
        } else {
            state[d] = std::clamp(state[d], state_bounds[d].lo, state_bounds[d].hi);
        }
    }
}

void ControlTask::step(std::span<const double> state, double u, std::span<double> next) const {
    dynamics(state, u, next);
    for (double v : next) {
        if (!std::isfinite(v)) return;  // left for the caller to report
    }
    project(next);
}

std::vector<double> ControlTask::step(std::span<const double> state, double u) const {
    std::vector<double> next(state_dim());
    step(state, u, next);
    return next;
}

ControlTask pendulum_task() {
    constexpr double tau = 0.3;
    ControlTask t;
    t.name = "pendulum";
    t.state_names = {"theta", "theta_dot"};
    t.state_bounds = {{-std::numbers::pi, std::numbers::pi}, {-10.0, 10.0}};
    t.boundary = {Boundary::Wrap, Boundary::Clamp};
    t.action_bounds = {-1.0, 1.0};
    t.tau = tau;
    t.angle_dim = 0;
    // Explicit Euler: both updates read the pre-step state.
    t.dynamics = [](std::span<const double> x, double u, std::span<double> out) {
        out[0] = x[0] + x[1] * tau;
        out[1] = x[1] + (std::sin(x[0]) - x[1] + u) * tau;
    };
    t.reward = [](std::span<const double> x, double u) { return -0.1 * u * u + std::exp(std::cos(x[0]) - 1.0); };
    return t;
}

ControlTask mountain_car_task() {
    constexpr double goal = 0.5;
    ControlTask t;
    t.name = "mountain-car";
    t.state_names = {"x", "x_dot"};
    t.state_bounds = {{-1.2, 0.6}, {-0.07, 0.07}};
    t.boundary = {Boundary::Clamp, Boundary::Clamp};
    t.action_bounds = {-1.0, 1.0};
    t.tau = 1.0;
    t.dynamics = [](std::span<const double> x, double u, std::span<double> out) {
        out[0] = x[0] + x[1];
        out[1] = x[1] - 0.0025 * std::cos(3.0 * x[0]) + 0.001 * u;
    };
    t.reward = [](std::span<const double> x, double) { return x[0] >= goal ? 10.0 : -1.0; };
    t.absorbing = [](std::span<const double> x) { return x[0] >= goal; };
    return t;
}

ControlTask double_integrator_task() {
    constexpr double tau = 0.1;
    ControlTask t;
    t.name = "double-integrator";
    t.state_names = {"x", "x_dot"};
    t.state_bounds = {{-3.0, 3.0}, {-3.0, 3.0}};
    t.boundary = {Boundary::Clamp, Boundary::Clamp};
    t.action_bounds = {-1.0, 1.0};
    t.tau = tau;
    t.dynamics = [](std::span<const double> x, double u, std::span<double> out) {
        out[0] = x[0] + x[1] * tau;
        out[1] = x[1] + u * tau;
    };
    t.reward = [](std::span<const double> x, double) { return -0.5 * (x[0] * x[0] + x[1] * x[1]); };
    return t;
}

namespace cartpole {
constexpr double g = 9.8;
constexpr double cart_mass = 1.0;
constexpr double pole_mass = 0.1;
constexpr double half_length = 0.5;
constexpr double total_mass = cart_mass + pole_mass;
constexpr double tau = 0.1;
}  // namespace cartpole

double cartpole_theta_acc(double theta, double theta_dot, double u) {
    using namespace cartpole;
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const double push = (u + pole_mass * half_length * theta_dot * theta_dot * s) / total_mass;
    return (g * s - push * c) / (half_length * (4.0 / 3.0 - pole_mass * c * c / total_mass));
}

ControlTask cartpole_task() {
    using namespace cartpole;
    ControlTask t;
    t.name = "cartpole";
    t.state_names = {"theta", "theta_dot", "x", "x_dot"};
    t.state_bounds = {{-std::numbers::pi / 2, std::numbers::pi / 2}, {-3.0, 3.0}, {-2.4, 2.4}, {-3.5, 3.5}};
    // theta covers half a turn only, so it saturates rather than wraps.
    t.boundary = {Boundary::Clamp, Boundary::Clamp, Boundary::Clamp, Boundary::Clamp};
    t.action_bounds = {-10.0, 10.0};
    t.tau = tau;
    t.angle_dim = 0;
    t.dynamics = [](std::span<const double> x, double u, std::span<double> out) {
        const double theta = x[0], theta_dot = x[1], pos = x[2], vel = x[3];
        const double theta_acc = cartpole_theta_acc(theta, theta_dot, u);
        const double x_acc =
            (u + pole_mass * half_length * (theta_dot * theta_dot * std::sin(theta) - theta_acc * std::cos(theta))) /
            total_mass;
        out[0] = theta + theta_dot * tau;
        out[1] = theta_dot + theta_acc * tau;
        out[2] = pos + vel * tau;
        out[3] = vel + x_acc * tau;
    };
    t.reward = [](std::span<const double> x, double) {
        const double c = std::cos(15.0 * x[0]);
        return c * c * c * c;
    };
    return t;
}

ControlTask task_by_name(const std::string& name) {
    if (name == "pendulum") return pendulum_task();
    if (name == "mountain-car") return mountain_car_task();
    if (name == "double-integrator") return double_integrator_task();
    if (name == "cartpole") return cartpole_task();
    throw ArgumentError("unknown task '" + name + "'");
}

}  // namespace lrq
