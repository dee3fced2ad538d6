#include "crnstab/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "crnstab/diagnostics.hpp"
#include "crnstab/error.hpp"
#include "crnstab/structure.hpp"
#include "linalg_detail.hpp"

namespace crnstab {

namespace {

struct ComplexIndex {
    std::vector<Complex> complexes;
    std::vector<std::vector<long>> exponents;
    std::vector<int> reactant_of;  // per reaction
    std::vector<int> product_of;
};

ComplexIndex index_complexes(const Network& net) {
    ComplexIndex ix;
    std::map<Complex, int> ids;
    auto intern = [&](const Complex& c) {
        auto [it, inserted] = ids.emplace(c, static_cast<int>(ix.complexes.size()));
        if (inserted) ix.complexes.push_back(c);
        return it->second;
    };
    for (const Reaction& r : net.reactions) {
        ix.reactant_of.push_back(intern(r.reactant));
        ix.product_of.push_back(intern(r.product));
    }
    for (const Complex& c : ix.complexes) ix.exponents.push_back(c.integer_exponents());
    return ix;
}

/// Per-complex balance residuals at exp(u), plus the largest single flow for
/// scaling tolerances.
std::pair<Eigen::VectorXd, double> balance_residuals_log(const Network& net,
                                                         const ComplexIndex& ix,
                                                         const Eigen::VectorXd& u) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ix.complexes.size()));
    double max_flow = 0.0;
    for (std::size_t i = 0; i < net.reactions.size(); ++i) {
        const std::vector<long>& y = ix.exponents[ix.reactant_of[i]];
        double e = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) e += static_cast<double>(y[j]) * u(j);
        double flow = net.reactions[i].rate.to_double() * std::exp(e);
        max_flow = std::max(max_flow, flow);
        g(ix.reactant_of[i]) += flow;
        g(ix.product_of[i]) -= flow;
    }
    return {g, max_flow};
}

Eigen::MatrixXd balance_jacobian_log(const Network& net, const ComplexIndex& ix,
                                     const Eigen::VectorXd& u) {
    const Eigen::Index m = static_cast<Eigen::Index>(ix.complexes.size());
    const Eigen::Index n = u.size();
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, n);
    for (std::size_t i = 0; i < net.reactions.size(); ++i) {
        const std::vector<long>& y = ix.exponents[ix.reactant_of[i]];
        double e = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) e += static_cast<double>(y[j]) * u(j);
        double flow = net.reactions[i].rate.to_double() * std::exp(e);
        for (Eigen::Index j = 0; j < n; ++j) {
            double d = flow * static_cast<double>(y[j]);
            J(ix.reactant_of[i], j) += d;
            J(ix.product_of[i], j) -= d;
        }
    }
    return J;
}

}  // namespace

std::vector<double> check_complex_balance(const Network& net, const Vec& x) {
    net.validate();
    if (x.size() != net.species_count()) throw Error("state dimension mismatch");
    for (double v : x)
        if (!(v > 0.0)) throw Error("state must be strictly positive");

    ComplexIndex ix = index_complexes(net);
    std::vector<double> res(ix.complexes.size(), 0.0);
    for (std::size_t i = 0; i < net.reactions.size(); ++i) {
        double flow = net.reactions[i].rate.to_double() *
                      monomial(x, ix.exponents[ix.reactant_of[i]]);
        res[ix.reactant_of[i]] += flow;   // outflow from the reactant complex
        res[ix.product_of[i]] -= flow;    // inflow into the product complex
    }
    return res;
}

EquilibriumResult find_complex_balanced_equilibrium(const Network& net) {
    StoichiometryAnalysis an = analyze_structure(net);
    if (!an.weakly_reversible)
        throw Error("network is not weakly reversible; no complex balanced equilibrium search");

    ComplexIndex ix = index_complexes(net);
    const int m = static_cast<int>(ix.complexes.size());
    const int n = static_cast<int>(net.species_count());
    const int ell = an.linkage_class_count;

    // Kinetic Laplacian on complexes, column = source.
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < net.reactions.size(); ++i) {
        double k = net.reactions[i].rate.to_double();
        L(ix.product_of[i], ix.reactant_of[i]) += k;
        L(ix.reactant_of[i], ix.reactant_of[i]) -= k;
    }

    // One strictly positive kernel vector per linkage class, max entry 1.
    // analyze_structure dedupes complexes in the same first-appearance order
    // as index_complexes, so its class labels apply directly.
    const std::vector<int>& cls = an.complex_class;
    Eigen::VectorXd log_kernel(m);
    for (int c = 0; c < ell; ++c) {
        std::vector<int> members;
        for (int v = 0; v < m; ++v)
            if (cls[v] == c) members.push_back(v);
        Eigen::MatrixXd Lc(members.size(), members.size());
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = 0; b < members.size(); ++b)
                Lc(a, b) = L(members[a], members[b]);
        std::vector<Vec> kern = detail::kernel_basis(Lc, 1e-12);
        if (kern.size() != 1)
            throw Error("positive kernel extraction failed: kernel dimension " +
                        std::to_string(kern.size()) + " in linkage class " + std::to_string(c + 1));
        Vec p = kern[0];
        double mx = 0.0;
        for (double v : p) mx = std::abs(v) > std::abs(mx) ? v : mx;
        for (double& v : p) v /= mx;  // flips sign if needed
        for (double v : p)
            if (!(v > 1e-9))
                throw Error("positive kernel extraction failed: non-positive component");
        for (std::size_t a = 0; a < members.size(); ++a)
            log_kernel(members[a]) = std::log(p[a]);
    }

    // y_c^T u - lambda_class = ln p_c, solved jointly for u = Ln(x) and the
    // per-class constants.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n + ell);
    for (int c = 0; c < m; ++c) {
        for (int j = 0; j < n; ++j) A(c, j) = static_cast<double>(ix.exponents[c][j]);
        A(c, n + cls[c]) = -1.0;
    }
    Eigen::VectorXd z = detail::min_norm_least_squares(A, log_kernel);
    double ls_residual = (A * z - log_kernel).lpNorm<Eigen::Infinity>();
    if (ls_residual > 1e-6)
        throw Error("no complex balanced equilibrium found (log-linear residual " +
                    std::to_string(ls_residual) + ")");

    Eigen::VectorXd u = z.head(n);

    // Newton polish on the balance residuals in log coordinates.
    auto [g, max_flow] = balance_residuals_log(net, ix, u);
    double tol = 1e-12 * (1.0 + max_flow);
    for (int iter = 0; iter < 50 && g.lpNorm<Eigen::Infinity>() > tol; ++iter) {
        Eigen::MatrixXd J = balance_jacobian_log(net, ix, u);
        Eigen::VectorXd du = detail::min_norm_least_squares(J, g);
        double norm0 = g.lpNorm<Eigen::Infinity>();
        double damp = 1.0;
        for (int h = 0; h < 30; ++h) {
            Eigen::VectorXd trial = u - damp * du;
            auto [gt, mf] = balance_residuals_log(net, ix, trial);
            if (gt.lpNorm<Eigen::Infinity>() < norm0) {
                u = trial;
                g = gt;
                max_flow = mf;
                break;
            }
            damp *= 0.5;
        }
        tol = 1e-12 * (1.0 + max_flow);
    }

    // Canonical representative: minimum-norm Ln coordinates. Shifting u along
    // S-perp rescales residuals per linkage class, so balance is preserved.
    for (const Vec& a : an.basis_S_perp) {
        Eigen::VectorXd av = detail::to_eigen(a);
        u -= av.dot(u) * av;
    }

    EquilibriumResult result;
    result.point.resize(n);
    for (int j = 0; j < n; ++j) result.point[j] = std::exp(u(j));
    result.complexes = ix.complexes;
    result.residuals = check_complex_balance(net, result.point);
    result.equilibrium_set_directions = an.basis_S_perp;

    double max_res = 0.0;
    for (double r : result.residuals) max_res = std::max(max_res, std::abs(r));
    if (max_res > 1e-10 * (1.0 + max_flow))
        throw Error("no complex balanced equilibrium found (balance residual " +
                    std::to_string(max_res) + ")");
    return result;
}

Vec find_equilibrium_in_class(const Network& net, const HistoryFunction& theta,
                              const EquilibriumResult& cb) {
    net.validate();
    const std::size_t n = net.species_count();
    if (theta.size() != n || cb.point.size() != n) throw Error("dimension mismatch");
    const std::vector<Vec>& dirs = cb.equilibrium_set_directions;
    if (dirs.empty()) return cb.point;  // the class is the whole positive orthant

    const std::size_t d = dirs.size();
    Vec targets(d);
    for (std::size_t k = 0; k < d; ++k) targets[k] = eval_c_a(net, dirs[k], theta);
    double target_scale = 1.0;
    for (double t : targets) target_scale = std::max(target_scale, std::abs(t));

    std::vector<std::vector<long>> expo;
    std::vector<double> kt;  // kappa_i * tau_i
    for (const Reaction& r : net.reactions) {
        expo.push_back(r.reactant.integer_exponents());
        kt.push_back(r.rate.to_double() * r.delay.to_double());
    }

    Eigen::VectorXd u0(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) u0(static_cast<Eigen::Index>(j)) = std::log(cb.point[j]);

    auto point_at = [&](const Eigen::VectorXd& t) {
        Vec x(n);
        for (std::size_t j = 0; j < n; ++j) {
            double u = u0(static_cast<Eigen::Index>(j));
            for (std::size_t k = 0; k < d; ++k) u += t(static_cast<Eigen::Index>(k)) * dirs[k][j];
            x[j] = std::exp(u);
        }
        return x;
    };

    // c_a of the constant history x: a^T [x + sum_i kappa_i tau_i x^{y_i} y_i].
    auto residual = [&](const Vec& x) {
        Eigen::VectorXd g(static_cast<Eigen::Index>(d));
        Vec acc = x;
        Vec flows(net.reactions.size());
        for (std::size_t i = 0; i < net.reactions.size(); ++i) {
            flows[i] = kt[i] * monomial(x, expo[i]);
            for (std::size_t j = 0; j < n; ++j)
                acc[j] += flows[i] * static_cast<double>(expo[i][j]);
        }
        for (std::size_t k = 0; k < d; ++k) {
            double v = 0.0;
            for (std::size_t j = 0; j < n; ++j) v += dirs[k][j] * acc[j];
            g(static_cast<Eigen::Index>(k)) = v - targets[k];
        }
        return g;
    };

    Eigen::VectorXd t = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    Eigen::VectorXd g = residual(point_at(t));
    const double tol = 1e-10 * target_scale;
    for (int iter = 0; iter < 100; ++iter) {
        if (g.lpNorm<Eigen::Infinity>() <= tol) break;
        Vec x = point_at(t);
        // J_mk = a_m^T diag(x) a_k + sum_i kappa_i tau_i x^{y_i} (a_m.y_i)(y_i.a_k)
        Eigen::MatrixXd J(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        for (std::size_t mi = 0; mi < d; ++mi)
            for (std::size_t k = 0; k < d; ++k) {
                double v = 0.0;
                for (std::size_t j = 0; j < n; ++j) v += dirs[mi][j] * x[j] * dirs[k][j];
                for (std::size_t i = 0; i < net.reactions.size(); ++i) {
                    double ay = 0.0, ya = 0.0;
                    for (std::size_t j = 0; j < n; ++j) {
                        ay += dirs[mi][j] * static_cast<double>(expo[i][j]);
                        ya += static_cast<double>(expo[i][j]) * dirs[k][j];
                    }
                    v += kt[i] * monomial(x, expo[i]) * ay * ya;
                }
                J(static_cast<Eigen::Index>(mi), static_cast<Eigen::Index>(k)) = v;
            }
        Eigen::VectorXd dt = J.ldlt().solve(g);
        double norm0 = g.lpNorm<Eigen::Infinity>();
        double damp = 1.0;
        bool improved = false;
        for (int h = 0; h < 40; ++h) {
            Eigen::VectorXd trial = t - damp * dt;
            Eigen::VectorXd gt = residual(point_at(trial));
            if (gt.lpNorm<Eigen::Infinity>() < norm0) {
                t = trial;
                g = gt;
                improved = true;
                break;
            }
            damp *= 0.5;
        }
        if (!improved)
            throw Error("equilibrium-in-class root finder stalled");
    }
    if (g.lpNorm<Eigen::Infinity>() > tol)
        throw Error("equilibrium-in-class root finder did not converge");
    return point_at(t);
}

}  // namespace crnstab
