#include "qgpatch/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include "qgpatch/errors.hpp"
#include "qgpatch/parallel.hpp"
#include "qgpatch/quadrature.hpp"

namespace qgpatch::nonlinear {

namespace {
constexpr double pi = std::numbers::pi;

// Offsets and weights of a fixed-level tanh-sinh rule on [0, L] measured from 0 (s) or from L (sc).
std::vector<quad::DENode> de_all(int level) {
    std::vector<quad::DENode> out;
    const double scale = std::ldexp(1.0, -level);
    for (int k = 0; k <= level; ++k)
        for (const auto& n : quad::de_level_nodes(k)) out.push_back({n.s, n.sc, n.w * scale});
    return out;
}

const std::vector<quad::DENode>& de_cached(int level) {
    static std::vector<quad::DENode> cache[12];
    static std::once_flag flags[12];
    if (level < 0 || level > 10) throw DomainError("tanh-sinh level must lie in [0, 10]");
    std::call_once(flags[level], [&] { cache[level] = de_all(level); });
    return cache[level];
}

// Target of a surface integral: physical point, plus the parameters when it lies on the
// integrated surface itself.
struct Target {
    double R, theta, Z;
    bool self = false;
    double phi = 0.0, fT = 0.0;
};

struct UNode {
    double u, w, s2, sinu;  // s2 = sin^2(u/2)
    double ce, se;          // cos, sin of eta = theta + u
};

// Integral over surface j of (y - x).N / |y - x| (potential) or sin(phi') (r_eta + i r) e^{i eta} / |y - x|
// (velocity), over the parameter square.
template <bool Velocity>
std::complex<double> surface_integral(int j, const Target& t, const SurfacePerturbation& f, const PatchPairConfig& cfg,
                                      const NonlinearOptions& opt, double* min_dist2) {
    const auto& prof = cfg.profile(j);
    const double d = cfg.d(j);
    const auto& modes = f.modes(j);
    std::vector<int> ks;
    for (const auto& kv : modes) ks.push_back(kv.first);
    const int M = static_cast<int>(ks.size());

    // eta rule
    std::vector<UNode> us;
    if (t.self) {
        for (const auto& n : de_cached(opt.self_level))
            for (int sgn : {-1, 1}) {
                const double u = sgn * pi * n.s;
                const double h = std::sin(0.5 * u);
                us.push_back({u, pi * n.w, h * h, std::sin(u), 0.0, 0.0});
            }
    } else {
        int ne = std::max(opt.n_eta, 8);
        ne = (ne + f.fold() - 1) / f.fold() * f.fold();
        for (int l = 0; l < ne; ++l) {
            const double u = 2.0 * pi * l / ne;
            const double h = std::sin(0.5 * u);
            us.push_back({u, 2.0 * pi / ne, h * h, std::sin(u), 0.0, 0.0});
        }
    }
    const int NU = static_cast<int>(us.size());
    std::vector<double> ck(static_cast<std::size_t>(NU) * M), sk(static_cast<std::size_t>(NU) * M);
    for (int a = 0; a < NU; ++a) {
        const double eta = t.theta + us[a].u;
        us[a].ce = std::cos(eta);
        us[a].se = std::sin(eta);
        for (int b = 0; b < M; ++b) {
            ck[static_cast<std::size_t>(a) * M + b] = std::cos(ks[b] * eta);
            sk[static_cast<std::size_t>(a) * M + b] = std::sin(ks[b] * eta);
        }
    }

    // phi rule: (phi', offset from target phi, weight)
    struct PNode {
        double phi, delta, w;
    };
    std::vector<PNode> ps;
    if (t.self) {
        const double L = t.phi, Rr = pi - t.phi;
        for (const auto& n : de_cached(opt.self_level)) {
            if (L > 0.0) ps.push_back({L * n.s, -L * n.sc, L * n.w});
            if (Rr > 0.0) ps.push_back({t.phi + Rr * n.s, Rr * n.s, Rr * n.w});
        }
    } else {
        for (const auto& n : de_cached(opt.cross_level)) ps.push_back({pi * n.s, 0.0, pi * n.w});
    }

    // t.R already carries fT; only the self offset dr0 is measured on the unperturbed profile
    const double fshift = t.self ? t.fT : 0.0;
    std::vector<double> fk(M), dfk(M);
    std::complex<double> acc = 0.0;
    double md2 = std::numeric_limits<double>::infinity();
    for (const auto& p : ps) {
        if (p.phi <= 0.0 || p.phi >= pi) continue;
        const double sp = std::sin(p.phi);
        const double r0 = prof.r(p.phi), r0p = prof.dr(p.phi);
        double dr0, dz;
        if (t.self) {
            dr0 = prof.increment(t.phi, p.delta);
            dz = -2.0 * d * std::sin(t.phi + 0.5 * p.delta) * std::sin(0.5 * p.delta);
        } else {
            dr0 = r0 - t.R;
            dz = d * std::cos(p.phi) - t.Z;
        }
        for (int b = 0; b < M; ++b) f.interpolate(j, ks[b], p.phi, fk[b], dfk[b]);
        std::complex<double> row = 0.0;
        for (int a = 0; a < NU; ++a) {
            const double* c = ck.data() + static_cast<std::size_t>(a) * M;
            const double* s = sk.data() + static_cast<std::size_t>(a) * M;
            double fv = 0.0, fp = 0.0, fe = 0.0;
            for (int b = 0; b < M; ++b) {
                fv += fk[b] * c[b];
                fp += dfk[b] * c[b];
                fe -= ks[b] * fk[b] * s[b];
            }
            const double r = r0 + fv, rphi = r0p + fp;
            const double dr = dr0 + fv - fshift;
            const double dist2 = dr * dr + 4.0 * r * t.R * us[a].s2 + dz * dz;
            if (!(dist2 > 0.0)) continue;
            md2 = std::min(md2, dist2);
            const double inv = 1.0 / std::sqrt(dist2);
            if constexpr (Velocity) {
                const double g = sp * inv * us[a].w;
                row += g * std::complex<double>(fe * us[a].ce - r * us[a].se, fe * us[a].se + r * us[a].ce);
            } else {
                const double num = d * sp * (r * dr + 2.0 * t.R * r * us[a].s2 - t.R * fe * us[a].sinu) + r * rphi * dz;
                row += num * inv * us[a].w;
            }
        }
        acc += p.w * row;
    }
    if (min_dist2) *min_dist2 = md2;
    if constexpr (Velocity)
        return acc * (d / (4.0 * pi));
    else
        return 0.5 * acc;
}

double perturbation_at(const SurfacePerturbation& f, int j, int node, double theta) {
    double v = 0.0;
    for (const auto& kv : f.modes(j)) v += kv.second[node] * std::cos(kv.first * theta);
    return v;
}

double perturbation_at(const SurfacePerturbation& f, int j, double phi, double theta) {
    double v = 0.0, dv = 0.0;
    double s = 0.0;
    for (const auto& kv : f.modes(j)) {
        f.interpolate(j, kv.first, phi, v, dv);
        s += v * std::cos(kv.first * theta);
    }
    return s;
}

Target on_surface(int i, double phi, double theta, double fT, const PatchPairConfig& cfg) {
    return {cfg.profile(i).r(phi) + fT, theta, cfg.d(i) * std::cos(phi), false, phi, fT};
}

}  // namespace

SurfacePerturbation::SurfacePerturbation(std::shared_ptr<const QuadratureGrid> grid, int fold)
    : grid_(std::move(grid)), fold_(fold) {
    if (!grid_) throw DomainError("SurfacePerturbation: grid required");
    if (fold < 1) throw DomainError("SurfacePerturbation: fold must be >= 1");
    const int P = grid_->panels();
    px_.resize(P);
    pw_.resize(P);
    for (int p = 0; p < P; ++p) {
        const double a = grid_->breaks[p], b = grid_->breaks[p + 1];
        auto& x = px_[p];
        if (p == 0) x.push_back(-1.0);
        for (int j = 0; j < grid_->q; ++j) x.push_back((2.0 * grid_->nodes[grid_->first_node(p) + j] - a - b) / (b - a));
        if (p == P - 1) x.push_back(1.0);
        auto& w = pw_[p];
        w.resize(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) {
            double prod = 1.0;
            for (std::size_t k = 0; k < x.size(); ++k)
                if (k != j) prod *= x[j] - x[k];
            w[j] = 1.0 / prod;
        }
    }
}

void SurfacePerturbation::set_mode(int j, int k, std::vector<double> values) {
    if (j != 1 && j != 2) throw DomainError("set_mode: surface must be 1 or 2");
    if (k < 1 || k % fold_ != 0) throw DomainError("set_mode: mode must be a positive multiple of the fold");
    if (static_cast<int>(values.size()) != grid_->size()) throw DomainError("set_mode: one value per grid node");
    modes_[j - 1][k] = std::move(values);
}

int SurfacePerturbation::max_mode() const {
    int m = 0;
    for (const auto& mm : modes_)
        for (const auto& kv : mm) m = std::max(m, kv.first);
    return m;
}

double SurfacePerturbation::sup_norm() const {
    double best = 0.0;
    for (const auto& mm : modes_) {
        double s = 0.0;
        for (const auto& kv : mm) {
            double mx = 0.0;
            for (double v : kv.second) mx = std::max(mx, std::abs(v));
            s += mx;
        }
        best = std::max(best, s);
    }
    return best;
}

bool SurfacePerturbation::equatorially_symmetric(double tol) const {
    const int N = grid_->size();
    for (const auto& mm : modes_)
        for (const auto& kv : mm) {
            double mx = 0.0;
            for (double v : kv.second) mx = std::max(mx, std::abs(v));
            for (int k = 0; k < N / 2; ++k)
                if (std::abs(kv.second[k] - kv.second[N - 1 - k]) > tol * std::max(mx, 1e-300)) return false;
        }
    return true;
}

SurfacePerturbation SurfacePerturbation::scaled(double s) const {
    SurfacePerturbation out = *this;
    for (auto& mm : out.modes_)
        for (auto& kv : mm)
            for (auto& v : kv.second) v *= s;
    return out;
}

void SurfacePerturbation::interpolate(int j, int k, double phi, double& value, double& dvalue) const {
    const auto& y0 = modes_[j - 1].at(k);
    const int P = grid_->panels();
    int p = static_cast<int>(std::upper_bound(grid_->breaks.begin(), grid_->breaks.end(), phi) - grid_->breaks.begin()) - 1;
    p = std::clamp(p, 0, P - 1);
    const double a = grid_->breaks[p], b = grid_->breaks[p + 1];
    const double t = (2.0 * phi - a - b) / (b - a);
    const auto& x = px_[p];
    const auto& w = pw_[p];
    const int n = static_cast<int>(x.size());
    const int off = p == 0 ? 1 : 0;
    auto y = [&](int i) {
        const int node = i - off;
        if (node < 0 || node >= grid_->q) return 0.0;
        return y0[grid_->first_node(p) + node];
    };
    for (int i = 0; i < n; ++i)
        if (t == x[i]) {
            value = y(i);
            double dv = 0.0;
            for (int m = 0; m < n; ++m)
                if (m != i) dv += (w[m] / w[i]) * (y(m) - y(i)) / (x[i] - x[m]);
            dvalue = dv * 2.0 / (b - a);
            return;
        }
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
        const double c = w[i] / (t - x[i]);
        num += c * y(i);
        den += c;
    }
    value = num / den;
    double dnum = 0.0;
    for (int i = 0; i < n; ++i) dnum += w[i] / (t - x[i]) * (value - y(i)) / (t - x[i]);
    dvalue = dnum / den * 2.0 / (b - a);
}

double stream_component(int j, const Point3& x, const SurfacePerturbation& f, const PatchPairConfig& cfg,
                        const NonlinearOptions& opt) {
    const Target t{x.R, x.theta, x.z};
    return -surface_integral<false>(j, t, f, cfg, opt, nullptr).real() / (4.0 * pi);
}

double stream_at(const Point3& x, const SurfacePerturbation& f, const PatchPairConfig& cfg,
                 const NonlinearOptions& opt) {
    return stream_component(1, x, f, cfg, opt) - stream_component(2, x, f, cfg, opt);
}

double stream_on_surface(int i, double phi, double theta, const SurfacePerturbation& f, const PatchPairConfig& cfg,
                         const NonlinearOptions& opt) {
    const double fT = perturbation_at(f, i, phi, theta);
    Target t = on_surface(i, phi, theta, fT, cfg);
    double v[2];
    for (int j = 1; j <= 2; ++j) {
        t.self = j == i;
        v[j - 1] = surface_integral<false>(j, t, f, cfg, opt, nullptr).real();
    }
    return -(v[0] - v[1]) / (4.0 * pi);
}

std::complex<double> velocity_at(const Point3& x, const SurfacePerturbation& f, const PatchPairConfig& cfg,
                                 const NonlinearOptions& opt) {
    const Target t{x.R, x.theta, x.z};
    return surface_integral<true>(1, t, f, cfg, opt, nullptr) - surface_integral<true>(2, t, f, cfg, opt, nullptr);
}

std::complex<double> velocity_on_surface(int i, double phi, double theta, const SurfacePerturbation& f,
                                         const PatchPairConfig& cfg, const NonlinearOptions& opt) {
    const double fT = perturbation_at(f, i, phi, theta);
    Target t = on_surface(i, phi, theta, fT, cfg);
    std::complex<double> v[2];
    for (int j = 1; j <= 2; ++j) {
        t.self = j == i;
        v[j - 1] = surface_integral<true>(j, t, f, cfg, opt, nullptr);
    }
    return v[0] - v[1];
}

double default_eps_max(const PatchPairConfig& cfg) {
    return 0.05 * std::min(cfg.d2, std::sqrt(cfg.validated.separation_delta));
}

FunctionalValue functional_Ftilde(double Omega, const SurfacePerturbation& f, const PatchPairConfig& cfg,
                                  const NonlinearOptions& opt) {
    const auto& g = f.grid();
    const int N = g.size();
    const int mm = std::max(f.max_mode(), f.fold());
    const int NT = opt.n_theta > 0 ? opt.n_theta : 8 * mm;
    const double eps_max = opt.eps_max >= 0.0 ? opt.eps_max : default_eps_max(cfg);
    if (f.sup_norm() > eps_max) throw PerturbationTooLarge("functional_Ftilde: perturbation exceeds eps_max");

    const bool eq = opt.exploit_symmetry && f.equatorially_symmetric() && cfg.validated.symmetry_defect <= 1e-10;
    const bool th = opt.exploit_symmetry && NT % (2 * f.fold()) == 0;
    const int KC = eq ? (N + 1) / 2 : N;
    const int LC = th ? NT / (2 * f.fold()) + 1 : NT;

    FunctionalValue out;
    out.n_phi = N;
    out.n_theta = NT;
    for (auto& v : out.values) v.assign(static_cast<std::size_t>(N) * NT, 0.0);

    const std::size_t count = 2 * static_cast<std::size_t>(KC) * LC;
    std::vector<double> raw(count), mind(count, std::numeric_limits<double>::infinity());
    parallel_for(count, [&](std::size_t idx) {
        const int i = static_cast<int>(idx / (static_cast<std::size_t>(KC) * LC)) + 1;
        const int k = static_cast<int>(idx / LC % KC);
        const int l = static_cast<int>(idx % LC);
        const double phi = g.nodes[k], theta = 2.0 * pi * l / NT;
        const double fT = perturbation_at(f, i, k, theta);
        Target t = on_surface(i, phi, theta, fT, cfg);
        double v[2];
        for (int j = 1; j <= 2; ++j) {
            t.self = j == i;
            double md = std::numeric_limits<double>::infinity();
            v[j - 1] = surface_integral<false>(j, t, f, cfg, opt, &md).real();
            if (j != i) mind[idx] = md;
        }
        const double r = t.R;
        raw[idx] = -(v[0] - v[1]) / (4.0 * pi) - 0.5 * Omega * r * r;
    });
    out.min_J12 = *std::min_element(mind.begin(), mind.end());
    if (out.min_J12 < 0.25 * cfg.validated.separation_delta)
        throw PerturbationTooLarge("functional_Ftilde: surfaces closer than delta/4");

    const int period = NT / f.fold();
    for (int i = 1; i <= 2; ++i)
        for (int k = 0; k < N; ++k) {
            const int kk = eq && k >= KC ? N - 1 - k : k;
            for (int l = 0; l < NT; ++l) {
                int ll = l;
                if (th) {
                    ll = l % period;
                    if (ll > period / 2) ll = period - ll;
                }
                out.values[i - 1][static_cast<std::size_t>(k) * NT + l] =
                    raw[(static_cast<std::size_t>(i - 1) * KC + kk) * LC + ll];
            }
        }
    for (int i = 1; i <= 2; ++i)
        for (int k = 0; k < N; ++k) {
            double* row = out.values[i - 1].data() + static_cast<std::size_t>(k) * NT;
            double mean = 0.0;
            for (int l = 0; l < NT; ++l) mean += row[l];
            mean /= NT;
            const double r0 = cfg.profile(i).r(g.nodes[k]);
            for (int l = 0; l < NT; ++l) {
                row[l] = (row[l] - mean) / r0;
                out.sup_norm = std::max(out.sup_norm, std::abs(row[l]));
            }
        }
    out.mean_removed = true;
    return out;
}

FunctionalValue linearized_matvec(double Omega, const SurfacePerturbation& direction,
                                  const spectral::SpectralProblem& problem, int n_theta) {
    const int N = problem.grid().size();
    if (direction.grid().size() != N) throw DomainError("linearized_matvec: direction must live on the problem grid");
    const int mm = std::max(direction.max_mode(), direction.fold());
    const int NT = n_theta > 0 ? n_theta : 8 * mm;
    FunctionalValue out;
    out.n_phi = N;
    out.n_theta = NT;
    for (auto& v : out.values) v.assign(static_cast<std::size_t>(N) * NT, 0.0);
    std::map<int, bool> present;
    for (int j = 1; j <= 2; ++j)
        for (const auto& kv : direction.modes(j)) present[kv.first] = true;
    const std::vector<double> zero(N, 0.0);
    for (const auto& kv : present) {
        const int n = kv.first;
        const auto op = problem.assemble(n, Omega);
        const auto& h1 = direction.modes(1).count(n) ? direction.modes(1).at(n) : zero;
        const auto& h2 = direction.modes(2).count(n) ? direction.modes(2).at(n) : zero;
        std::vector<double> t1, t2;
        spectral::apply_rowwise(op, h1, h2, t1, t2);
        for (int k = 0; k < N; ++k) {
            const double a1 = op.nu1[k] * (h1[k] - t1[k]);
            const double a2 = -op.nu2[k] * (h2[k] - t2[k]);
            for (int l = 0; l < NT; ++l) {
                const double c = std::cos(n * 2.0 * pi * l / NT);
                out.values[0][static_cast<std::size_t>(k) * NT + l] += a1 * c;
                out.values[1][static_cast<std::size_t>(k) * NT + l] += a2 * c;
            }
        }
    }
    for (const auto& v : out.values)
        for (double x : v) out.sup_norm = std::max(out.sup_norm, std::abs(x));
    out.mean_removed = true;
    return out;
}

double sup_distance(const FunctionalValue& a, const FunctionalValue& b, double scale_b) {
    if (a.n_phi != b.n_phi || a.n_theta != b.n_theta) throw DomainError("sup_distance: shape mismatch");
    double d = 0.0;
    for (int i = 0; i < 2; ++i)
        for (std::size_t k = 0; k < a.values[i].size(); ++k)
            d = std::max(d, std::abs(a.values[i][k] - scale_b * b.values[i][k]));
    return d;
}

}  // namespace qgpatch::nonlinear
