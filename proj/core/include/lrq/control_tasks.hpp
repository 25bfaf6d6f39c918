#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lrq/mdp.hpp"

namespace lrq {

struct Interval {
    double lo;
    double hi;
    double width() const noexcept { return hi - lo; }
    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

enum class Boundary {
    Clamp,  // saturate at [lo, hi]
    Wrap,   // periodic, mapped into (lo, hi]
};

/// Continuous-state control problem with a scalar action. `dynamics` writes the
/// raw Euler step; ControlTask::step applies the boundary rules afterwards.
struct ControlTask {
    std::string name;
    std::vector<std::string> state_names;
    std::vector<Interval> state_bounds;
    std::vector<Boundary> boundary;
    Interval action_bounds{};
    double tau = 1.0;
    std::function<void(std::span<const double>, double, std::span<double>)> dynamics;
    std::function<double(std::span<const double>, double)> reward;
    /// States for which the discretised model uses an absorbing self-loop. Optional.
    std::function<bool(std::span<const double>)> absorbing;
    /// Index of the angle used by the angular-deviation metric, or -1.
    int angle_dim = -1;

    std::size_t state_dim() const noexcept { return state_bounds.size(); }

    /// Dynamics followed by wrap/clamp. `next` must have state_dim() entries.
    void step(std::span<const double> state, double u, std::span<double> next) const;
    std::vector<double> step(std::span<const double> state, double u) const;

    /// Applies the boundary rules in place.
    void project(std::span<double> state) const;
};

/// Maps x into (lo, hi] treating the interval as one period.
double wrap_into(double x, Interval bounds);

/// theta <- theta + theta_dot*tau; theta_dot <- theta_dot + (sin(theta) - theta_dot + u)*tau,
/// r = -0.1 u^2 + exp(cos(theta) - 1); theta in (-pi, pi] (wrapped), theta_dot in [-10, 10],
/// u in [-1, 1], tau = 0.3.
ControlTask pendulum_task();

/// x <- x + x_dot; x_dot <- x_dot - 0.0025 cos(3x) + 0.001 u; r = 10 if x >= 0.5 else -1.
/// x in [-1.2, 0.6], x_dot in [-0.07, 0.07], u in [-1, 1]. States with x >= 0.5 are absorbing.
ControlTask mountain_car_task();

/// x <- x + x_dot*tau; x_dot <- x_dot + u*tau; r = -(x^2 + x_dot^2)/2 on [-3, 3]^2, u in [-1, 1], tau = 0.1.
ControlTask double_integrator_task();

/// Cart-pole with g = 9.8, m_c = 1, m = 0.1, l = 0.5, u in [-10, 10], tau = 0.1, r = cos^4(15 theta).
/// State order (theta, theta_dot, x, x_dot).
ControlTask cartpole_task();

/// Pole angular acceleration of the cart-pole model.
double cartpole_theta_acc(double theta, double theta_dot, double u);

/// Task by name: "pendulum", "mountain-car", "double-integrator", "cartpole".
ControlTask task_by_name(const std::string& name);

struct GridSpec {
    std::vector<std::size_t> points_per_dim;
    std::size_t n_actions = 1;

    std::size_t n_states() const;
    void validate(std::size_t state_dim) const;
};

/// Uniform tensor grid (endpoints included) over a task's state box and action interval.
/// Flat state index is row-major with dimension 0 most significant.
class StateGrid {
public:
    StateGrid(const ControlTask& task, GridSpec spec);

    std::size_t n_states() const noexcept { return n_states_; }
    std::size_t n_actions() const noexcept { return spec_.n_actions; }
    std::size_t dims() const noexcept { return spec_.points_per_dim.size(); }
    const GridSpec& spec() const noexcept { return spec_; }

    double node_value(std::size_t dim, std::size_t i) const;
    double action_value(std::size_t a) const;
    std::vector<double> state_at(std::size_t flat) const;
    void state_at(std::size_t flat, std::span<double> out) const;

    /// Nearest grid node of a continuous state (clamped into the box).
    std::size_t nearest(std::span<const double> state) const;

    /// Multilinear interpolation weights of `state` over the enclosing cell's corners.
    /// Corners with zero weight are omitted, so a state on a node yields one entry.
    void interpolate(std::span<const double> state, std::vector<Successor>& out) const;

private:
    std::vector<Interval> bounds_;
    Interval action_bounds_{};
    GridSpec spec_;
    std::size_t n_states_;
    std::vector<std::size_t> strides_;
};

/// Discretises `task` on `grid`: every (node, action) pair takes one dynamics step,
/// and the successor is spread over its enclosing cell with multilinear weights.
/// Rewards are evaluated at the node and action. Throws NumericalError naming the
/// pair if a successor is non-finite.
TabularMdp discretize(const ControlTask& task, const GridSpec& grid, double gamma = 0.95);

/// |S| = n_states, |A| = n_actions, one uniformly drawn successor per pair and
/// i.i.d. uniform [0, 1) rewards, all seeded.
TabularMdp toy_mdp(std::size_t n_states = 1000, std::size_t n_actions = 100, double gamma = 0.95,
                   std::uint64_t seed = 0);

}  // namespace lrq
