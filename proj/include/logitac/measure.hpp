#pragma once

#include <span>
#include <variant>
#include <vector>

#include "logitac/rng.hpp"

namespace logitac {

// Compact action interval [lo, hi].
class Interval {
public:
    Interval(double lo, double hi);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double width() const { return hi_ - lo_; }
    bool contains(double x) const { return x >= lo_ && x <= hi_; }

    bool operator==(const Interval& other) const = default;

private:
    double lo_;
    double hi_;
};

// Uniform nodes lo = x_0 < ... < x_{m-1} = hi.
std::vector<double> grid_nodes(const Interval& iv, int m);

// Trapezoid quadrature weights on the same nodes; they sum to width().
std::vector<double> trapezoid_weights(const Interval& iv, int m);

struct Atom {
    double position;
    double weight;

    bool operator==(const Atom& other) const = default;
};

// Finite nonnegative measure as weighted atoms on an interval. Construction
// sorts atoms, merges positions closer than kMergeEps (weights add) and drops
// zero-weight atoms, so positions are strictly increasing afterwards.
class AtomicMeasure {
public:
    static constexpr double kMergeEps = 1e-12;

    AtomicMeasure(Interval interval, std::vector<Atom> atoms);

    // Fast path for callers that already guarantee the invariants (sorted,
    // merged, nonnegative, inside the interval).
    static AtomicMeasure trusted(Interval interval, std::vector<Atom> atoms);

    const Interval& interval() const { return interval_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }

    double total_weight() const;
    bool is_probability(double tol = 1e-12) const;

    bool operator==(const AtomicMeasure& other) const = default;

private:
    Interval interval_;
    std::vector<Atom> atoms_;
};

// Absolutely continuous probability measure as density values at m >= 2
// uniform nodes. Values are nonnegative and the trapezoid integral over the
// interval is 1 within 1e-9.
class GridDensity {
public:
    GridDensity(Interval interval, std::vector<double> values);

    // Rescales nonnegative raw values so the trapezoid integral is exactly 1.
    static GridDensity normalized(Interval interval, std::vector<double> values);

    const Interval& interval() const { return interval_; }
    const std::vector<double>& values() const { return values_; }
    int grid_size() const { return static_cast<int>(values_.size()); }
    double node(int k) const;
    double spacing() const { return interval_.width() / (grid_size() - 1); }

    bool operator==(const GridDensity& other) const = default;

private:
    Interval interval_;
    std::vector<double> values_;
};

using Measure = std::variant<AtomicMeasure, GridDensity>;

const Interval& measure_interval(const Measure& mu);

// Point mass at x.
AtomicMeasure dirac(double x, const Interval& iv);

// Actor update pi + alpha * (dirac(b) - pi): prior weights scale by exactly
// (1 - alpha) and the atom at b gains mass alpha.
AtomicMeasure mix_update(const AtomicMeasure& pi, double b, double alpha);

// Pools atoms into `bins` uniform cells; each pooled atom sits at the
// weight-weighted mean position of its cell. Total mass is preserved exactly
// and the BL distance to the input is at most one cell width.
AtomicMeasure compact(const AtomicMeasure& pi, int bins);

// Draws an atom position with probability equal to its weight.
double sample(const AtomicMeasure& pi, Rng& rng);

// Inverse-CDF draw treating the density as piecewise linear between nodes.
double sample(const GridDensity& p, Rng& rng);

// Bounded-Lipschitz distance sup { integral of g d(mu - nu) } over test
// functions with sup|g| + Lip(g) <= 1, estimated by the discretized linear
// program on `resolution` uniform nodes (see measure.cpp). Symmetric in its
// arguments and monotone nondecreasing under nested grid refinement.
double bl_distance(const Measure& mu, const Measure& nu, int resolution);
double bl_distance(const AtomicMeasure& mu, const AtomicMeasure& nu, int resolution);
double bl_distance(const GridDensity& mu, const GridDensity& nu, int resolution);

// Max over players of bl_distance; the product-space metric.
double profile_distance(std::span<const Measure> mus, std::span<const Measure> nus,
                        int resolution);
double profile_distance(const std::vector<AtomicMeasure>& mus,
                        const std::vector<GridDensity>& nus, int resolution);
double profile_distance(const std::vector<GridDensity>& mus,
                        const std::vector<GridDensity>& nus, int resolution);

// Density floor applied before any log so entropy/KL never see -inf.
inline constexpr double kDensityFloor = 1e-300;

// Trapezoid estimate of -∫ p log p.
double entropy(const GridDensity& p);

// Trapezoid estimate of ∫ |p - q| on a shared grid.
double l1_distance(const GridDensity& p, const GridDensity& q);

// Projects atoms onto hat functions at `grid` uniform nodes, giving the
// piecewise-linear density with the same mass; used to evaluate density-only
// diagnostics on an actor.
GridDensity to_grid_density(const AtomicMeasure& pi, int grid);

}  // namespace logitac
