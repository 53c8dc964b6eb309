#include "logitac/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace logitac {

namespace {

bool finite(double x) { return std::isfinite(x); }

}  // namespace

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!finite(lo) || !finite(hi) || !(lo < hi)) {
        throw std::invalid_argument("Interval: requires finite lo < hi, got [" +
                                    std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
}

std::vector<double> grid_nodes(const Interval& iv, int m) {
    if (m < 2) throw std::invalid_argument("grid_nodes: need at least 2 nodes");
    std::vector<double> xs(m);
    const double h = iv.width() / (m - 1);
    for (int k = 0; k < m; ++k) xs[k] = iv.lo() + k * h;
    xs.back() = iv.hi();
    return xs;
}

std::vector<double> trapezoid_weights(const Interval& iv, int m) {
    if (m < 2) throw std::invalid_argument("trapezoid_weights: need at least 2 nodes");
    const double h = iv.width() / (m - 1);
    std::vector<double> w(m, h);
    w.front() = 0.5 * h;
    w.back() = 0.5 * h;
    return w;
}

AtomicMeasure::AtomicMeasure(Interval interval, std::vector<Atom> atoms)
    : interval_(interval), atoms_(std::move(atoms)) {
    for (const Atom& a : atoms_) {
        if (!finite(a.position) || !interval_.contains(a.position)) {
            throw std::invalid_argument("AtomicMeasure: atom position " +
                                        std::to_string(a.position) + " outside interval");
        }
        if (!finite(a.weight) || a.weight < 0.0) {
            throw std::invalid_argument("AtomicMeasure: atom weight must be finite and >= 0");
        }
    }
    if (!std::is_sorted(atoms_.begin(), atoms_.end(),
                        [](const Atom& a, const Atom& b) { return a.position < b.position; })) {
        std::sort(atoms_.begin(), atoms_.end(),
                  [](const Atom& a, const Atom& b) { return a.position < b.position; });
    }
    // Merge near-duplicates and drop zero weights in one pass.
    std::size_t out = 0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (atoms_[i].weight == 0.0) continue;
        if (out > 0 && atoms_[i].position - atoms_[out - 1].position < kMergeEps) {
            atoms_[out - 1].weight += atoms_[i].weight;
        } else {
            atoms_[out++] = atoms_[i];
        }
    }
    atoms_.resize(out);
}

AtomicMeasure AtomicMeasure::trusted(Interval interval, std::vector<Atom> atoms) {
    AtomicMeasure out(interval, {});
    out.atoms_ = std::move(atoms);
    return out;
}

double AtomicMeasure::total_weight() const {
    double s = 0.0;
    for (const Atom& a : atoms_) s += a.weight;
    return s;
}

bool AtomicMeasure::is_probability(double tol) const {
    return std::abs(total_weight() - 1.0) <= tol;
}

GridDensity::GridDensity(Interval interval, std::vector<double> values)
    : interval_(interval), values_(std::move(values)) {
    if (values_.size() < 2) throw std::invalid_argument("GridDensity: need at least 2 nodes");
    double integral = 0.0;
    const auto w = trapezoid_weights(interval_, static_cast<int>(values_.size()));
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!finite(values_[k]) || values_[k] < 0.0) {
            throw std::invalid_argument("GridDensity: values must be finite and >= 0");
        }
        integral += w[k] * values_[k];
    }
    if (std::abs(integral - 1.0) > 1e-9) {
        throw std::invalid_argument("GridDensity: trapezoid integral is " +
                                    std::to_string(integral) + ", expected 1");
    }
}

GridDensity GridDensity::normalized(Interval interval, std::vector<double> values) {
    if (values.size() < 2) throw std::invalid_argument("GridDensity: need at least 2 nodes");
    const auto w = trapezoid_weights(interval, static_cast<int>(values.size()));
    double integral = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!finite(values[k]) || values[k] < 0.0) {
            throw std::invalid_argument("GridDensity: values must be finite and >= 0");
        }
        integral += w[k] * values[k];
    }
    if (!(integral > 0.0)) throw std::invalid_argument("GridDensity: cannot normalize zero mass");
    for (double& v : values) v /= integral;
    return GridDensity(interval, std::move(values));
}

double GridDensity::node(int k) const {
    if (k == grid_size() - 1) return interval_.hi();
    return interval_.lo() + k * spacing();
}

const Interval& measure_interval(const Measure& mu) {
    return std::visit([](const auto& m) -> const Interval& { return m.interval(); }, mu);
}

AtomicMeasure dirac(double x, const Interval& iv) {
    if (!iv.contains(x)) {
        throw std::invalid_argument("dirac: position " + std::to_string(x) +
                                    " outside interval");
    }
    return AtomicMeasure(iv, {{x, 1.0}});
}

AtomicMeasure mix_update(const AtomicMeasure& pi, double b, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("mix_update: alpha must be in [0, 1]");
    }
    if (!pi.interval().contains(b)) {
        throw std::invalid_argument("mix_update: target action outside interval");
    }
    if (alpha == 0.0) return pi;
    if (alpha == 1.0) return AtomicMeasure(pi.interval(), {{b, 1.0}});

    // The input is sorted, merged and strictly positive, so scaling by
    // (1 - alpha) and inserting b in place preserves the invariants; the
    // validating pass of the constructor is not needed.
    const double keep = 1.0 - alpha;
    std::vector<Atom> atoms;
    atoms.reserve(pi.size() + 1);
    bool inserted = false;
    for (const Atom& a : pi.atoms()) {
        if (!inserted && b < a.position + AtomicMeasure::kMergeEps) {
            if (a.position - b < AtomicMeasure::kMergeEps) {
                atoms.push_back({a.position, keep * a.weight + alpha});
            } else {
                if (!atoms.empty() && b - atoms.back().position < AtomicMeasure::kMergeEps) {
                    atoms.back().weight += alpha;
                } else {
                    atoms.push_back({b, alpha});
                }
                atoms.push_back({a.position, keep * a.weight});
            }
            inserted = true;
            continue;
        }
        atoms.push_back({a.position, keep * a.weight});
    }
    if (!inserted) {
        if (!atoms.empty() && b - atoms.back().position < AtomicMeasure::kMergeEps) {
            atoms.back().weight += alpha;
        } else {
            atoms.push_back({b, alpha});
        }
    }
    return AtomicMeasure::trusted(pi.interval(), std::move(atoms));
}

AtomicMeasure compact(const AtomicMeasure& pi, int bins) {
    if (bins < 2) throw std::invalid_argument("compact: bins must be >= 2");
    if (pi.size() <= 1) return pi;
    const double lo = pi.interval().lo();
    const double cell = pi.interval().width() / bins;
    std::vector<double> mass(bins, 0.0), first_moment(bins, 0.0);
    for (const Atom& a : pi.atoms()) {
        int j = std::min(bins - 1, static_cast<int>((a.position - lo) / cell));
        mass[j] += a.weight;
        first_moment[j] += a.weight * a.position;
    }
    std::vector<Atom> pooled;
    pooled.reserve(bins);
    for (int j = 0; j < bins; ++j) {
        if (mass[j] > 0.0) {
            double pos = std::clamp(first_moment[j] / mass[j], pi.interval().lo(),
                                    pi.interval().hi());
            pooled.push_back({pos, mass[j]});
        }
    }
    return AtomicMeasure(pi.interval(), std::move(pooled));
}

double sample(const AtomicMeasure& pi, Rng& rng) {
    if (pi.atoms().empty() || !pi.is_probability()) {
        throw std::invalid_argument("sample: measure is not a probability measure");
    }
    const double u = rng.uniform01();
    double acc = 0.0;
    for (const Atom& a : pi.atoms()) {
        acc += a.weight;
        if (u < acc) return a.position;
    }
    return pi.atoms().back().position;
}

double sample(const GridDensity& p, Rng& rng) {
    const auto& v = p.values();
    const int m = p.grid_size();
    const double h = p.spacing();
    const double target = rng.uniform01();

    int k = 0;
    double acc = 0.0;
    while (k < m - 2) {
        const double cell = 0.5 * h * (v[k] + v[k + 1]);
        if (acc + cell >= target) break;
        acc += cell;
        ++k;
    }
    // Mass target - acc falls inside cell k; the density is linear there, so
    // the within-cell CDF is quadratic in t: h (v_k t + (v_{k+1}-v_k) t^2 / 2).
    const double r = std::max(0.0, (target - acc) / h);
    const double a = 0.5 * (v[k + 1] - v[k]);
    const double b = v[k];
    const double denom = b + std::sqrt(std::max(0.0, b * b + 4.0 * a * r));
    const double t = std::clamp(denom > 0.0 ? 2.0 * r / denom : 0.0, 0.0, 1.0);
    return std::clamp(p.interval().lo() + (k + t) * h, p.interval().lo(), p.interval().hi());
}

// ---------------------------------------------------------------------------
// Bounded-Lipschitz distance.
//
// The norm is discretized as the linear program
//
//   max sum_k c_k g_k   s.t.   max_k |g_k| + max_j |g_{j+1} - g_j| / h <= 1
//
// where c_k are signed node masses with sum_k c_k g(x_k) == integral of
// g d(mu - nu) for every g piecewise linear on the node grid. Splitting the
// budget as |g_k| <= s and |g_{j+1} - g_j| <= (1 - s) h, the inner problem is
// an LP on a chain whose value is concave in s (max-LP values are concave in
// the right-hand side), so a golden-section sweep over s is exact up to the
// bracket width.
//
// The inner LP is solved exactly by dynamic programming over node index:
// V_k(g) = c_k g + max { V_{k+1}(g') : |g' - g| <= delta, |g'| <= s } is
// concave piecewise linear, and the sliding-window max of a concave function
// is its flat-top widening by delta. Runs of zero coefficients collapse into
// a single widening, which makes atomic inputs cheap at high resolution.
// ---------------------------------------------------------------------------

namespace {

void accumulate_atomic_masses(const AtomicMeasure& mu, double sign, const Interval& iv,
                              int resolution, std::vector<double>& c) {
    const double h = iv.width() / (resolution - 1);
    for (const Atom& a : mu.atoms()) {
        double t = (a.position - iv.lo()) / h;
        int k = std::clamp(static_cast<int>(t), 0, resolution - 2);
        double f = std::clamp(t - k, 0.0, 1.0);
        c[k] += sign * a.weight * (1.0 - f);
        c[k + 1] += sign * a.weight * f;
    }
}

// Exact integrals of the density against the hat basis at the LP nodes,
// walking the union of the two uniform grids; on each segment both factors
// are linear, so Simpson is exact.
void accumulate_density_masses(const GridDensity& p, double sign, const Interval& iv,
                               int resolution, std::vector<double>& c) {
    const int m = p.grid_size();
    const double lo = iv.lo(), hi = iv.hi();
    const double hat_h = iv.width() / (resolution - 1);
    const double den_h = iv.width() / (m - 1);
    const auto& v = p.values();
    auto pval = [&](double x) {
        double t = (x - lo) / den_h;
        int j = std::clamp(static_cast<int>(t), 0, m - 2);
        double f = std::clamp(t - j, 0.0, 1.0);
        return v[j] * (1.0 - f) + v[j + 1] * f;
    };
    int k = 0, j = 0;
    double a = lo;
    while (k < resolution - 1) {
        const double xk = lo + k * hat_h;
        const double xk1 = (k + 2 == resolution) ? hi : lo + (k + 1) * hat_h;
        const double yj1 = (j + 2 == m) ? hi : lo + (j + 1) * den_h;
        const double b = std::min(xk1, yj1);
        if (b > a) {
            const double mid = 0.5 * (a + b);
            const double pa = pval(a), pm = pval(mid), pb = pval(b);
            const double w6 = sign * (b - a) / 6.0;
            auto phiL = [&](double x) { return (xk1 - x) / hat_h; };
            auto phiR = [&](double x) { return (x - xk) / hat_h; };
            c[k] += w6 * (phiL(a) * pa + 4.0 * phiL(mid) * pm + phiL(b) * pb);
            c[k + 1] += w6 * (phiR(a) * pa + 4.0 * phiR(mid) * pm + phiR(b) * pb);
            a = b;
        }
        if (xk1 <= b) ++k;
        if (yj1 <= b && j + 2 < m) ++j;
    }
}

// Flat-top widening by w followed by restriction to [-s, s]. `xs`/`ys` hold a
// concave piecewise-linear function with domain [-s, s] on entry.
void widen_and_clamp(std::vector<double>& xs, std::vector<double>& ys, double w, double s,
                     std::vector<double>& tx, std::vector<double>& ty) {
    const int n = static_cast<int>(xs.size());
    int im = 0;
    for (int i = 1; i < n; ++i) {
        if (ys[i] > ys[im]) im = i;
    }
    const double ymax = ys[im];
    int il = im, ir = im;
    while (il > 0 && ys[il - 1] == ymax) --il;
    while (ir + 1 < n && ys[ir + 1] == ymax) ++ir;

    tx.clear();
    ty.clear();
    for (int i = 0; i < il; ++i) {
        tx.push_back(xs[i] - w);
        ty.push_back(ys[i]);
    }
    tx.push_back(xs[il] - w);
    ty.push_back(ymax);
    tx.push_back(xs[ir] + w);
    ty.push_back(ymax);
    for (int i = ir + 1; i < n; ++i) {
        tx.push_back(xs[i] + w);
        ty.push_back(ys[i]);
    }

    auto value_at = [&](int i, double x) {
        // interpolate on segment [i, i+1]
        const double t = (x - tx[i]) / (tx[i + 1] - tx[i]);
        return ty[i] + t * (ty[i + 1] - ty[i]);
    };

    xs.clear();
    ys.clear();
    const int wn = static_cast<int>(tx.size());
    int i = 0;
    while (i < wn && tx[i] < -s) ++i;
    if (i == 0 || tx[i] == -s) {
        // domain already starts at -s (cannot happen after a true widening,
        // but keep the general case correct)
    } else {
        xs.push_back(-s);
        ys.push_back(value_at(i - 1, -s));
    }
    while (i < wn && tx[i] <= s) {
        xs.push_back(tx[i]);
        ys.push_back(ty[i]);
        ++i;
    }
    if (xs.empty() || xs.back() < s) {
        xs.push_back(s);
        ys.push_back(value_at(i - 1, s));
    }
}

// max sum_k c_k g_k  s.t.  |g_k| <= s, |g_{k+1} - g_k| <= delta.
double chain_lp(const std::vector<double>& c, double s, double delta) {
    if (s <= 0.0) return 0.0;
    const int n = static_cast<int>(c.size());
    std::vector<double> xs = {-s, s};
    std::vector<double> ys = {-s * c[n - 1], s * c[n - 1]};
    std::vector<double> tx, ty;
    double pending = 0.0;
    for (int k = n - 2; k >= 0; --k) {
        pending += delta;
        if (c[k] == 0.0) continue;
        if (pending > 0.0) {
            widen_and_clamp(xs, ys, pending, s, tx, ty);
            pending = 0.0;
        }
        for (std::size_t i = 0; i < xs.size(); ++i) ys[i] += c[k] * xs[i];
    }
    return *std::max_element(ys.begin(), ys.end());
}

double bl_from_coefficients(std::vector<double> c, double h) {
    // Canonical sign: makes bl_distance(mu, nu) == bl_distance(nu, mu) exactly.
    bool all_zero = true;
    for (double v : c) {
        if (v != 0.0) {
            if (v < 0.0) {
                for (double& u : c) u = -u;
            }
            all_zero = false;
            break;
        }
    }
    if (all_zero) return 0.0;

    auto inner = [&](double s) { return chain_lp(c, s, (1.0 - s) * h); };
    const double gr = 0.6180339887498949;
    double a = 0.0, b = 1.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = inner(x1), f2 = inner(x2);
    for (int it = 0; it < 48; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = inner(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = inner(x1);
        }
    }
    return std::max(f1, f2);
}

void accumulate_masses(const Measure& mu, double sign, const Interval& iv, int resolution,
                       std::vector<double>& c) {
    if (const auto* am = std::get_if<AtomicMeasure>(&mu)) {
        accumulate_atomic_masses(*am, sign, iv, resolution, c);
    } else {
        accumulate_density_masses(std::get<GridDensity>(mu), sign, iv, resolution, c);
    }
}

}  // namespace

double bl_distance(const Measure& mu, const Measure& nu, int resolution) {
    const Interval& iv = measure_interval(mu);
    if (!(measure_interval(nu) == iv)) {
        throw std::invalid_argument("bl_distance: measures live on different intervals");
    }
    if (resolution < 16) throw std::invalid_argument("bl_distance: resolution must be >= 16");
    // Separate accumulators keep swapping the arguments an exact negation,
    // which the sign canonicalization then maps to the identical LP.
    std::vector<double> cmu(resolution, 0.0), cnu(resolution, 0.0);
    accumulate_masses(mu, 1.0, iv, resolution, cmu);
    accumulate_masses(nu, 1.0, iv, resolution, cnu);
    for (int k = 0; k < resolution; ++k) cmu[k] -= cnu[k];
    return bl_from_coefficients(std::move(cmu), iv.width() / (resolution - 1));
}

double bl_distance(const AtomicMeasure& mu, const AtomicMeasure& nu, int resolution) {
    return bl_distance(Measure(mu), Measure(nu), resolution);
}

double bl_distance(const GridDensity& mu, const GridDensity& nu, int resolution) {
    return bl_distance(Measure(mu), Measure(nu), resolution);
}

double profile_distance(std::span<const Measure> mus, std::span<const Measure> nus,
                        int resolution) {
    if (mus.size() != nus.size()) {
        throw std::invalid_argument("profile_distance: profiles have different lengths");
    }
    double d = 0.0;
    for (std::size_t i = 0; i < mus.size(); ++i) {
        d = std::max(d, bl_distance(mus[i], nus[i], resolution));
    }
    return d;
}

namespace {

template <class A, class B>
double profile_distance_impl(const std::vector<A>& mus, const std::vector<B>& nus,
                             int resolution) {
    if (mus.size() != nus.size()) {
        throw std::invalid_argument("profile_distance: profiles have different lengths");
    }
    double d = 0.0;
    for (std::size_t i = 0; i < mus.size(); ++i) {
        d = std::max(d, bl_distance(Measure(mus[i]), Measure(nus[i]), resolution));
    }
    return d;
}

}  // namespace

double profile_distance(const std::vector<AtomicMeasure>& mus,
                        const std::vector<GridDensity>& nus, int resolution) {
    return profile_distance_impl(mus, nus, resolution);
}

double profile_distance(const std::vector<GridDensity>& mus,
                        const std::vector<GridDensity>& nus, int resolution) {
    return profile_distance_impl(mus, nus, resolution);
}

double entropy(const GridDensity& p) {
    const auto w = trapezoid_weights(p.interval(), p.grid_size());
    double acc = 0.0;
    for (int k = 0; k < p.grid_size(); ++k) {
        const double v = p.values()[k];
        acc -= w[k] * v * std::log(std::max(v, kDensityFloor));
    }
    return acc;
}

double l1_distance(const GridDensity& p, const GridDensity& q) {
    if (!(p.interval() == q.interval()) || p.grid_size() != q.grid_size()) {
        throw std::invalid_argument("l1_distance: densities live on different grids");
    }
    const auto w = trapezoid_weights(p.interval(), p.grid_size());
    double acc = 0.0;
    for (int k = 0; k < p.grid_size(); ++k) {
        acc += w[k] * std::abs(p.values()[k] - q.values()[k]);
    }
    return acc;
}

GridDensity to_grid_density(const AtomicMeasure& pi, int grid) {
    if (grid < 2) throw std::invalid_argument("to_grid_density: need at least 2 nodes");
    if (!pi.is_probability()) {
        throw std::invalid_argument("to_grid_density: measure is not a probability measure");
    }
    std::vector<double> mass(grid, 0.0);
    accumulate_atomic_masses(pi, 1.0, pi.interval(), grid, mass);
    const auto w = trapezoid_weights(pi.interval(), grid);
    for (int k = 0; k < grid; ++k) mass[k] /= w[k];
    return GridDensity::normalized(pi.interval(), std::move(mass));
}

}  // namespace logitac
