#include "eigenflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

namespace eigenflow {

// ================================================================ PathSpec

int PathSpec::Segment::pieces() const {
    return kind == Kind::Polyline ? static_cast<int>(vertices.size()) - 1 : 1;
}

ParamPoint PathSpec::Segment::at(double s) const {
    s = std::clamp(s, 0.0, 1.0);
    if (kind == Kind::Polyline) {
        const int edges = pieces();
        const double pos = s * edges;
        const int e = std::min(static_cast<int>(std::floor(pos)), edges - 1);
        const double frac = pos - e;
        const auto& a = vertices[static_cast<std::size_t>(e)];
        const auto& b = vertices[static_cast<std::size_t>(e + 1)];
        if (frac == 0.0) return a;
        if (frac == 1.0) return b;
        return a + frac * (b - a);
    }
    const Eigen::VectorXd sym = base + s * dir;
    const std::span<const double> sv(sym.data(), static_cast<std::size_t>(sym.size()));
    ParamPoint x(static_cast<Eigen::Index>(coords.size()));
    for (std::size_t k = 0; k < coords.size(); ++k) {
        const Complex v = expr::evaluate(*coords[k], sv);
        if (!std::isfinite(v.real()) || std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v.real()))) {
            throw DomainError("path coordinate " + std::to_string(k + 1) + " is not a finite real number");
        }
        x(static_cast<Eigen::Index>(k)) = v.real();
    }
    return x;
}

PathSpec PathSpec::parametric(std::vector<expr::NodePtr> coords) {
    Segment s;
    s.kind = Segment::Kind::Parametric;
    s.coords = std::move(coords);
    s.base = Eigen::VectorXd::Zero(1);
    s.dir = Eigen::VectorXd::Ones(1);
    return from_segments({std::move(s)});
}

PathSpec PathSpec::polyline(std::vector<ParamPoint> vertices) {
    Segment s;
    s.kind = Segment::Kind::Polyline;
    s.vertices = std::move(vertices);
    return from_segments({std::move(s)});
}

PathSpec PathSpec::from_segments(std::vector<Segment> segments) {
    if (segments.empty()) throw DimensionError("path has no segments");
    int d = -1;
    for (const auto& s : segments) {
        int sd = 0;
        if (s.kind == Segment::Kind::Polyline) {
            if (s.vertices.size() < 2) throw DimensionError("polyline needs at least two points");
            sd = static_cast<int>(s.vertices.front().size());
            for (const auto& v : s.vertices) {
                if (v.size() != sd) throw DimensionError("polyline points have different lengths");
            }
        } else {
            if (s.coords.empty()) throw DimensionError("parametric segment has no coordinates");
            if (s.base.size() != s.dir.size()) throw DimensionError("parametric segment symbol map is inconsistent");
            sd = static_cast<int>(s.coords.size());
        }
        if (d >= 0 && sd != d) throw DimensionError("path segments have different parameter dimensions");
        d = sd;
    }
    for (std::size_t k = 0; k + 1 < segments.size(); ++k) {
        const ParamPoint a = segments[k].at(1.0);
        const ParamPoint b = segments[k + 1].at(0.0);
        if ((a - b).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
            throw DimensionError("path segment " + std::to_string(k + 2) + " does not start where segment " +
                                 std::to_string(k + 1) + " ends");
        }
    }
    PathSpec p;
    p.segments_ = std::move(segments);
    return p;
}

PathSpec PathSpec::then(const PathSpec& next) const {
    std::vector<Segment> segs = segments_;
    segs.insert(segs.end(), next.segments_.begin(), next.segments_.end());
    return from_segments(std::move(segs));
}

PathSpec PathSpec::reversed() const {
    std::vector<Segment> segs(segments_.rbegin(), segments_.rend());
    for (auto& s : segs) {
        if (s.kind == Segment::Kind::Polyline) {
            std::reverse(s.vertices.begin(), s.vertices.end());
        } else {
            s.base = s.base + s.dir;
            s.dir = -s.dir;
        }
    }
    return from_segments(std::move(segs));
}

int PathSpec::dim() const {
    const auto& s = segments_.front();
    return s.kind == Segment::Kind::Polyline ? static_cast<int>(s.vertices.front().size())
                                             : static_cast<int>(s.coords.size());
}

ParamPoint PathSpec::at(double t) const {
    const int n = static_cast<int>(segments_.size());
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * n;
    const int idx = std::min(static_cast<int>(std::floor(pos)), n - 1);
    return segments_[static_cast<std::size_t>(idx)].at(pos - idx);
}

bool PathSpec::is_loop() const { return (start() - end()).lpNorm<Eigen::Infinity>() <= 1e-12; }

std::vector<double> PathSpec::initial_times(int init_samples) const {
    int total_pieces = 0;
    for (const auto& s : segments_) total_pieces += s.pieces();
    const int target = std::max(1, init_samples - 1);
    const int per_piece = std::max(1, (target + total_pieces - 1) / total_pieces);

    const int nseg = static_cast<int>(segments_.size());
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(total_pieces * per_piece + 1));
    for (int s = 0; s < nseg; ++s) {
        const int pieces = segments_[static_cast<std::size_t>(s)].pieces();
        for (int p = 0; p < pieces; ++p) {
            for (int k = 0; k < per_piece; ++k) {
                const double local = (p + static_cast<double>(k) / per_piece) / pieces;
                times.push_back((s + local) / nseg);
            }
        }
    }
    times.push_back(1.0);
    return times;
}

// ================================================================ matching

double max_displacement(const Eigen::VectorXcd& from, const Eigen::VectorXcd& to, const Permutation& mu) {
    double m = 0.0;
    for (int i = 0; i < mu.size(); ++i) m = std::max(m, std::abs(to(mu(i)) - from(i)));
    return m;
}

namespace {

// Hungarian algorithm (potentials form), rows assigned to columns.
std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    std::vector<bool> used(n + 1);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), false);
        do {
            used[j0] = true;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> assign(n);
    for (int j = 1; j <= n; ++j) assign[p[j] - 1] = j - 1;
    return assign;
}

}  // namespace

Permutation optimal_matching(const Eigen::VectorXcd& from, const Eigen::VectorXcd& to) {
    const int n = static_cast<int>(from.size());
    if (to.size() != n) throw DimensionError("optimal_matching: spectra of different sizes");
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) cost(i, j) = std::abs(to(j) - from(i));
    }
    if (n > 6) return Permutation(hungarian(cost));

    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double c = 0.0;
        for (int i = 0; i < n; ++i) c += cost(i, perm[static_cast<std::size_t>(i)]);
        if (c < best_cost) {
            best_cost = c;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return Permutation(std::move(best));
}

// ==================================================================== lift

void SpectralFlow::finish() {
    const int n = systems_.front().dim();
    composite_ = Permutation::identity(n);
    slots_.assign(times_.size(), std::vector<int>(static_cast<std::size_t>(n)));
    for (int b = 0; b < n; ++b) slots_[0][static_cast<std::size_t>(b)] = b;
    for (std::size_t k = 0; k < matchings_.size(); ++k) {
        for (int b = 0; b < n; ++b) slots_[k + 1][static_cast<std::size_t>(b)] = matchings_[k](slots_[k][static_cast<std::size_t>(b)]);
        composite_ = matchings_[k] * composite_;
    }
    min_gap_ = std::numeric_limits<double>::infinity();
    for (const auto& s : systems_) min_gap_ = std::min(min_gap_, s.gap());
}

SpectralFlow SpectralFlow::rescaled(const std::vector<Eigen::VectorXcd>& scales) const {
    if (scales.size() != systems_.size()) throw DimensionError("rescaled: one scale vector per sample required");
    SpectralFlow out = *this;
    for (std::size_t k = 0; k < systems_.size(); ++k) out.systems_[k] = systems_[k].rescaled(scales[k]);
    return out;
}

namespace {

class Lifter {
public:
    Lifter(const FamilySpec& family, const PathSpec& path, const LiftOptions& opts)
        : family_(family), path_(path), opts_(opts), spectral_{opts.tol_gap, SpectralOptions{}.max_dim} {}

    EigenSystem sample(double t, const ParamPoint& x) const {
        try {
            return decompose(family_.eval(x), spectral_);
        } catch (const DegenerateOperator& e) {
            std::ostringstream msg;
            msg << "degenerate spectrum at t = " << t << " (" << e.what() << ")";
            throw DegeneracyOnPath(msg.str(), t);
        }
    }

    // Appends the accepted steps of [ta, tb] (excluding ta) to `out`.
    void refine(double ta, const EigenSystem& sa, double tb, const ParamPoint& xb, const EigenSystem& sb, int depth,
                std::vector<double>& times, std::vector<ParamPoint>& points, std::vector<EigenSystem>& systems,
                std::vector<Permutation>& matchings) {
        const Permutation mu = optimal_matching(sa.lambdas(), sb.lambdas());
        if (max_displacement(sa.lambdas(), sb.lambdas(), mu) < 0.5 * sa.gap()) {
            depth_reached = std::max(depth_reached, depth);
            times.push_back(tb);
            points.push_back(xb);
            systems.push_back(sb);
            matchings.push_back(mu);
            return;
        }
        if (depth >= opts_.max_depth) {
            std::ostringstream msg;
            msg << "cannot resolve the spectrum on t in [" << ta << ", " << tb << "] (minimal gap "
                << std::min(sa.gap(), sb.gap()) << "); the path passes too close to a degeneracy";
            throw SubdivisionLimit(msg.str(), ta, tb, std::min(sa.gap(), sb.gap()));
        }
        const double tm = 0.5 * (ta + tb);
        const ParamPoint xm = path_.at(tm);
        const EigenSystem sm = sample(tm, xm);
        refine(ta, sa, tm, xm, sm, depth + 1, times, points, systems, matchings);
        refine(tm, sm, tb, xb, sb, depth + 1, times, points, systems, matchings);
    }

    int depth_reached = 0;

private:
    const FamilySpec& family_;
    const PathSpec& path_;
    const LiftOptions& opts_;
    SpectralOptions spectral_;
};

void check_initial(const FamilySpec& family, const ParamPoint& x0, const EigenSystem& init) {
    const Eigen::MatrixXcd h = family.eval(x0);
    if (init.dim() != h.rows()) throw DimensionError("initial frame has the wrong dimension");
    const double hn = std::max(h.norm(), 1e-300);
    for (int k = 0; k < init.dim(); ++k) {
        const Eigen::VectorXcd v = init.vec(k);
        const double res = (h * v - init.lambda(k) * v).norm();
        if (res > 1e-8 * hn * v.norm()) {
            throw std::invalid_argument("initial frame does not diagonalize H at the path start (slot " +
                                        std::to_string(k + 1) + ")");
        }
    }
}

}  // namespace

SpectralFlow lift_path(const FamilySpec& family, const PathSpec& path, const LiftOptions& opts,
                       const std::optional<EigenSystem>& initial) {
    if (path.dim() != family.num_params()) {
        throw DimensionError("path has " + std::to_string(path.dim()) + " coordinates, family has " +
                             std::to_string(family.num_params()) + " parameters");
    }
    Lifter lifter(family, path, opts);
    const std::vector<double> grid = path.initial_times(opts.init_samples);

    SpectralFlow flow;
    flow.is_loop_ = path.is_loop();

    const ParamPoint x0 = path.at(grid.front());
    EigenSystem s0 = initial ? *initial : lifter.sample(grid.front(), x0);
    if (initial) check_initial(family, x0, s0);
    flow.times_.push_back(grid.front());
    flow.points_.push_back(x0);
    flow.systems_.push_back(s0);

    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double t = grid[k];
        const ParamPoint x = path.at(t);
        const EigenSystem s = lifter.sample(t, x);
        const double ta = flow.times_.back();
        const EigenSystem sa = flow.systems_.back();
        lifter.refine(ta, sa, t, x, s, 0, flow.times_, flow.points_, flow.systems_, flow.matchings_);
    }
    flow.depth_reached_ = lifter.depth_reached;
    flow.finish();
    return flow;
}

Permutation monodromy(const SpectralFlow& flow) {
    if (!flow.is_loop()) throw NotALoop("monodromy requires a loop (endpoints differ)");
    const EigenSystem& first = flow.systems().front();
    const EigenSystem& last = flow.systems().back();
    const Permutation close = optimal_matching(last.lambdas(), first.lambdas());
    if (!(max_displacement(last.lambdas(), first.lambdas(), close) < 0.5 * last.gap())) {
        throw SubdivisionLimit("final spectrum cannot be matched to the initial spectrum", 1.0, 1.0, last.gap());
    }
    // band b ends at the value held by initial slot beta(b)
    const Permutation beta = close * flow.composite();
    return beta.inverse();
}

BandFunction band_function(const SpectralFlow& flow, int band) {
    if (band < 0 || band >= flow.dim()) throw DimensionError("band index out of range");
    BandFunction f;
    f.times = flow.times();
    f.values.reserve(f.times.size());
    for (int k = 0; k < flow.size(); ++k) f.values.push_back(flow.energy(band, k));
    return f;
}

}  // namespace eigenflow
