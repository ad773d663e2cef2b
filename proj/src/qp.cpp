#include "swarmplan/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace swarmplan {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string to_string(QpStatus s) {
    switch (s) {
        case QpStatus::Optimal: return "optimal";
        case QpStatus::Infeasible: return "infeasible";
        case QpStatus::MaxIterations: return "max_iterations";
    }
    return "unknown";
}

double KktResiduals::max() const {
    return std::max(std::max(stationarity, primal), std::max(dual, complementarity));
}

double FeasibilityReport::max() const {
    return std::max({input_box, state_box, collision, other_ineq, terminal});
}

void QpProblem::validate() const {
    const int v = num_vars();
    if (hessian.cols() != v || linear.size() != v)
        throw std::invalid_argument("QpProblem: hessian/linear dimension mismatch");
    if ((hessian - hessian.transpose()).cwiseAbs().maxCoeff() >
        1e-12 * std::max(1.0, hessian.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("QpProblem: hessian not symmetric");
    if (ineq_matrix.rows() != ineq_upper.size() || (ineq_matrix.rows() > 0 && ineq_matrix.cols() != v))
        throw std::invalid_argument("QpProblem: inequality dimension mismatch");
    if (eq_matrix.rows() != eq_rhs.size() || (eq_matrix.rows() > 0 && eq_matrix.cols() != v))
        throw std::invalid_argument("QpProblem: equality dimension mismatch");
    if (var_lower.size() != v || var_upper.size() != v)
        throw std::invalid_argument("QpProblem: bound dimension mismatch");
    if (((var_upper - var_lower).array() < 0.0).any())
        throw std::invalid_argument("QpProblem: var_lower > var_upper");
    if (state_box_rows < 0 || collision_rows < 0 || state_box_rows + collision_rows > num_ineq())
        throw std::invalid_argument("QpProblem: bad row family split");
}

FeasibilityReport check_feasible(const QpProblem& p, const Eigen::VectorXd& x) {
    FeasibilityReport rep;
    rep.input_box = std::max((p.var_lower - x).maxCoeff(), (x - p.var_upper).maxCoeff());
    rep.input_box = std::max(rep.input_box, 0.0);
    if (p.num_ineq() > 0) {
        const Eigen::VectorXd viol = (p.ineq_matrix * x - p.ineq_upper).cwiseMax(0.0);
        const int sb = p.state_box_rows;
        const int cr = p.collision_rows;
        if (sb > 0) rep.state_box = viol.head(sb).maxCoeff();
        if (cr > 0) rep.collision = viol.segment(sb, cr).maxCoeff();
        if (p.num_ineq() > sb + cr) rep.other_ineq = viol.tail(p.num_ineq() - sb - cr).maxCoeff();
    }
    if (p.num_eq() > 0) rep.terminal = (p.eq_matrix * x - p.eq_rhs).cwiseAbs().maxCoeff();
    return rep;
}

namespace {

struct Stacked {
    Eigen::MatrixXd A;       // [ineq; eq; I]
    Eigen::VectorXd l, u;    // row bounds
    Eigen::VectorXd rho;     // per-row penalty
    Eigen::VectorXd scale;   // row scaling E: scaled system is (EA) x in [El, Eu]
    int n_ineq = 0, n_eq = 0, n = 0;
};

Stacked stack(const QpProblem& p, const QpSettings& s) {
    Stacked st;
    st.n = p.num_vars();
    st.n_ineq = p.num_ineq();
    st.n_eq = p.num_eq();
    const int rows = st.n_ineq + st.n_eq + st.n;
    st.A.resize(rows, st.n);
    st.l.resize(rows);
    st.u.resize(rows);
    st.rho.resize(rows);
    if (st.n_ineq > 0) {
        st.A.topRows(st.n_ineq) = p.ineq_matrix;
        st.l.head(st.n_ineq).setConstant(-kInf);
        st.u.head(st.n_ineq) = p.ineq_upper;
        st.rho.head(st.n_ineq).setConstant(s.rho);
    }
    if (st.n_eq > 0) {
        st.A.middleRows(st.n_ineq, st.n_eq) = p.eq_matrix;
        st.l.segment(st.n_ineq, st.n_eq) = p.eq_rhs;
        st.u.segment(st.n_ineq, st.n_eq) = p.eq_rhs;
        st.rho.segment(st.n_ineq, st.n_eq).setConstant(s.rho * 1e3);
    }
    st.A.bottomRows(st.n).setIdentity();
    st.l.tail(st.n) = p.var_lower;
    st.u.tail(st.n) = p.var_upper;
    st.rho.tail(st.n).setConstant(s.rho);

    st.scale.resize(rows);
    for (int i = 0; i < rows; ++i) {
        const double nrm = st.A.row(i).cwiseAbs().maxCoeff();
        st.scale(i) = nrm > 1e-10 ? 1.0 / nrm : 1.0;
    }
    return st;
}

KktResiduals kkt_residuals(const QpProblem& p, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& lam, const Eigen::VectorXd& mu,
                           const Eigen::VectorXd& nu) {
    KktResiduals r;
    Eigen::VectorXd stat = p.hessian * x + p.linear + nu;
    if (p.num_ineq() > 0) stat += p.ineq_matrix.transpose() * lam;
    if (p.num_eq() > 0) stat += p.eq_matrix.transpose() * mu;
    r.stationarity = stat.cwiseAbs().maxCoeff();

    const auto feas = check_feasible(p, x);
    r.primal = feas.max();

    r.dual = p.num_ineq() > 0 ? std::max(0.0, (-lam).maxCoeff()) : 0.0;

    double comp = 0.0;
    if (p.num_ineq() > 0) {
        const Eigen::VectorXd slack = p.ineq_upper - p.ineq_matrix * x;
        comp = (lam.cwiseAbs().cwiseProduct(slack.cwiseAbs())).maxCoeff();
    }
    for (int i = 0; i < p.num_vars(); ++i) {
        if (nu(i) > 0.0)
            comp = std::max(comp, nu(i) * std::abs(x(i) - p.var_upper(i)));
        else if (nu(i) < 0.0)
            comp = std::max(comp, -nu(i) * std::abs(x(i) - p.var_lower(i)));
    }
    r.complementarity = comp;
    return r;
}

void split_duals(const Stacked& st, const Eigen::VectorXd& y, Eigen::VectorXd& lam,
                 Eigen::VectorXd& mu, Eigen::VectorXd& nu) {
    lam = y.head(st.n_ineq).cwiseMax(0.0);  // one-sided rows, clip tiny negatives
    mu = y.segment(st.n_ineq, st.n_eq);
    nu = y.tail(st.n);
}

// Equality-constrained polish on the detected active set. Activity is read
// from the primal slacks (plus dual hints); rows whose polished multiplier
// comes out with the wrong sign are dropped and the solve repeated. Returns
// true and fills `sol` when the polished point certifies at tol.
bool polish(const QpProblem& p, const Stacked& st, const Eigen::VectorXd& x,
            const Eigen::VectorXd& y, double tol, QpSolution& sol) {
    const int rows = static_cast<int>(st.A.rows());
    const int n = st.n;
    const Eigen::VectorXd ax = st.A * x;
    const double ytol = 1e-9 * std::max(1.0, y.cwiseAbs().maxCoeff());

    // +1: pinned at the upper bound, -1: at the lower bound, 0: inactive.
    std::vector<int> side(static_cast<std::size_t>(rows), 0);
    for (int i = 0; i < rows; ++i) {
        const bool is_eq = i >= st.n_ineq && i < st.n_ineq + st.n_eq;
        if (is_eq) {
            side[static_cast<std::size_t>(i)] = 1;
            continue;
        }
        const double up_slack = st.u(i) == kInf ? kInf : st.u(i) - ax(i);
        const double lo_slack = st.l(i) == -kInf ? kInf : ax(i) - st.l(i);
        const double act_up = 1e-3 * (1.0 + std::abs(st.u(i) == kInf ? 0.0 : st.u(i)));
        const double act_lo = 1e-3 * (1.0 + std::abs(st.l(i) == -kInf ? 0.0 : st.l(i)));
        if ((up_slack < act_up || y(i) > ytol) && up_slack <= lo_slack)
            side[static_cast<std::size_t>(i)] = 1;
        else if (lo_slack < act_lo || y(i) < -ytol)
            side[static_cast<std::size_t>(i)] = -1;
    }

    const double delta = 1e-9;
    Eigen::VectorXd xp;
    Eigen::VectorXd yp = Eigen::VectorXd::Zero(rows);
    for (int pass = 0; pass < 30; ++pass) {
        std::vector<int> act;
        for (int i = 0; i < rows; ++i)
            if (side[static_cast<std::size_t>(i)] != 0) act.push_back(i);
        const int na = static_cast<int>(act.size());

        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + na, n + na);
        K.topLeftCorner(n, n) = p.hessian + delta * Eigen::MatrixXd::Identity(n, n);
        Eigen::VectorXd rhs(n + na);
        rhs.head(n) = -p.linear;
        for (int a = 0; a < na; ++a) {
            K.block(n + a, 0, 1, n) = st.A.row(act[a]);
            K.block(0, n + a, n, 1) = st.A.row(act[a]).transpose();
            K(n + a, n + a) = -delta;
            rhs(n + a) = side[static_cast<std::size_t>(act[a])] > 0 ? st.u(act[a]) : st.l(act[a]);
        }

        Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
        Eigen::VectorXd sol_vec = lu.solve(rhs);
        // One round of iterative refinement against the unregularized system.
        {
            Eigen::MatrixXd K0 = K;
            K0.topLeftCorner(n, n) -= delta * Eigen::MatrixXd::Identity(n, n);
            for (int a = 0; a < na; ++a) K0(n + a, n + a) = 0.0;
            const Eigen::VectorXd resid = rhs - K0 * sol_vec;
            sol_vec += lu.solve(resid);
        }
        if (!sol_vec.allFinite()) return false;

        xp = sol_vec.head(n);
        yp.setZero();
        for (int a = 0; a < na; ++a) yp(act[a]) = sol_vec(n + a);

        // Drop rows whose multiplier sign contradicts the assumed side, then
        // pick up rows the polished point violates. No changes means the
        // working set is consistent.
        int changes = 0;
        for (int a = 0; a < na; ++a) {
            const int i = act[a];
            const bool is_eq = i >= st.n_ineq && i < st.n_ineq + st.n_eq;
            if (is_eq) continue;
            const int s = side[static_cast<std::size_t>(i)];
            if ((s > 0 && yp(i) < -1e-9) || (s < 0 && yp(i) > 1e-9)) {
                side[static_cast<std::size_t>(i)] = 0;
                ++changes;
            }
        }
        const Eigen::VectorXd axp = st.A * xp;
        for (int i = 0; i < rows; ++i) {
            if (side[static_cast<std::size_t>(i)] != 0) continue;
            if (st.u(i) != kInf && axp(i) - st.u(i) > 1e-11) {
                side[static_cast<std::size_t>(i)] = 1;
                ++changes;
            } else if (st.l(i) != -kInf && st.l(i) - axp(i) > 1e-11) {
                side[static_cast<std::size_t>(i)] = -1;
                ++changes;
            }
        }
        if (changes == 0) break;
    }

    Eigen::VectorXd lam, mu, nu;
    split_duals(st, yp, lam, mu, nu);
    const KktResiduals kkt = kkt_residuals(p, xp, lam, mu, nu);
    if (kkt.max() > tol) return false;

    sol.primal = xp;
    sol.ineq_duals = lam;
    sol.eq_duals = mu;
    sol.bound_duals = nu;
    sol.kkt = kkt;
    sol.status = QpStatus::Optimal;
    sol.objective = p.objective(xp);
    return true;
}

bool infeasibility_certificate(const Stacked& st, const Eigen::VectorXd& dy) {
    const double norm_dy = dy.cwiseAbs().maxCoeff();
    if (norm_dy < 1e-14) return false;
    const double eps = 1e-8 * norm_dy;
    if ((st.A.transpose() * dy).cwiseAbs().maxCoeff() > eps) return false;
    double support = 0.0;
    for (int i = 0; i < dy.size(); ++i) {
        if (dy(i) > 0.0) {
            if (st.u(i) == kInf) return false;
            support += st.u(i) * dy(i);
        } else if (dy(i) < 0.0) {
            if (st.l(i) == -kInf) {
                if (dy(i) < -eps) return false;
            } else {
                support += st.l(i) * dy(i);
            }
        }
    }
    return support < -eps;
}

}  // namespace

QpSolution solve(const QpProblem& p, const std::optional<Eigen::VectorXd>& warm_start,
                 const QpSettings& settings) {
    p.validate();
    const int n = p.num_vars();

    {
        // Reject indefinite objectives before iterating.
        const double shift = 1e-10 * std::max(1.0, p.hessian.cwiseAbs().maxCoeff());
        Eigen::LLT<Eigen::MatrixXd> llt(p.hessian +
                                        shift * Eigen::MatrixXd::Identity(n, n));
        if (llt.info() != Eigen::Success)
            throw std::invalid_argument("solve: hessian is not positive semidefinite");
    }

    Stacked st = stack(p, settings);
    const int rows = static_cast<int>(st.A.rows());

    // Scaled system.
    const Eigen::MatrixXd As = st.scale.asDiagonal() * st.A;
    Eigen::VectorXd ls = st.scale.cwiseProduct(st.l);
    Eigen::VectorXd us = st.scale.cwiseProduct(st.u);
    for (int i = 0; i < rows; ++i) {
        if (st.l(i) == -kInf) ls(i) = -kInf;
        if (st.u(i) == kInf) us(i) = kInf;
    }

    // Penalty adaptation keeps primal and dual progress balanced; the
    // update rule is deterministic (driven only by the iterates).
    double rho_factor = 1.0;
    Eigen::LDLT<Eigen::MatrixXd> kkt;
    const auto refactor = [&]() {
        const Eigen::MatrixXd K =
            p.hessian + settings.sigma * Eigen::MatrixXd::Identity(n, n) +
            As.transpose() * (rho_factor * st.rho).asDiagonal() * As;
        kkt.compute(K);
    };
    refactor();

    Eigen::VectorXd x = warm_start ? *warm_start : Eigen::VectorXd::Zero(n);
    if (warm_start && warm_start->size() != n)
        throw std::invalid_argument("solve: warm start dimension mismatch");
    Eigen::VectorXd z = As * x;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(rows);

    QpSolution sol;
    Eigen::VectorXd lam, mu, nu;

    const double alpha = settings.alpha;
    // Gate the (expensive) polish attempts: after a failure, require the
    // residual to halve before trying again. Escalate rho when the residual
    // stops improving; empirically the stalls here are primal-side.
    double polish_gate = 0.3;
    double best_kr = kInf;
    int stalled_checks = 0;
    int iter = 0;
    for (; iter < settings.max_iterations; ++iter) {
        const Eigen::VectorXd rho_now = rho_factor * st.rho;
        const Eigen::VectorXd rhs =
            settings.sigma * x - p.linear + As.transpose() * (rho_now.cwiseProduct(z) - y);
        const Eigen::VectorXd xt = kkt.solve(rhs);
        const Eigen::VectorXd zt = As * xt;
        const Eigen::VectorXd x_next = alpha * xt + (1.0 - alpha) * x;
        const Eigen::VectorXd z_relax = alpha * zt + (1.0 - alpha) * z;
        const Eigen::VectorXd z_next =
            (z_relax + y.cwiseQuotient(rho_now)).cwiseMax(ls).cwiseMin(us);
        const Eigen::VectorXd y_next = y + rho_now.cwiseProduct(z_relax - z_next);

        const Eigen::VectorXd dy_scaled = y_next - y;
        x = x_next;
        z = z_next;
        y = y_next;

        if ((iter + 1) % 25 == 0 || iter + 1 == settings.max_iterations) {
            // Unscale duals: constraint was (EA)x, so multipliers on A rows
            // are E*y_scaled.
            const Eigen::VectorXd yu = st.scale.cwiseProduct(y);
            split_duals(st, yu, lam, mu, nu);
            const KktResiduals kr = kkt_residuals(p, x, lam, mu, nu);
            if (kr.max() < polish_gate) {
                if (polish(p, st, x, yu, settings.kkt_tol, sol)) {
                    sol.iterations = iter + 1;
                    return sol;
                }
                polish_gate = 0.5 * kr.max();
                if (kr.max() <= settings.kkt_tol) {
                    sol.primal = x;
                    sol.ineq_duals = lam;
                    sol.eq_duals = mu;
                    sol.bound_duals = nu;
                    sol.kkt = kr;
                    sol.status = QpStatus::Optimal;
                    sol.objective = p.objective(x);
                    sol.iterations = iter + 1;
                    return sol;
                }
            }
            if (kr.max() < 0.8 * best_kr) {
                best_kr = kr.max();
                stalled_checks = 0;
            } else if (++stalled_checks >= 8) {
                // Push rho toward whichever side is lagging.
                const double next =
                    kr.primal >= kr.stationarity
                        ? std::min(rho_factor * 5.0, 1e4)
                        : std::max(rho_factor / 5.0, 1e-4);
                if (next != rho_factor) {
                    rho_factor = next;
                    refactor();
                }
                best_kr = kr.max();
                stalled_checks = 0;
            }

            const Eigen::VectorXd dyu = st.scale.cwiseProduct(dy_scaled);
            if (infeasibility_certificate(st, dyu)) {
                sol.primal = x;
                sol.ineq_duals = lam;
                sol.eq_duals = mu;
                sol.bound_duals = nu;
                sol.kkt = kr;
                sol.status = QpStatus::Infeasible;
                sol.objective = p.objective(x);
                sol.iterations = iter + 1;
                return sol;
            }
        }
    }

    const Eigen::VectorXd yu = st.scale.cwiseProduct(y);
    if (polish(p, st, x, yu, settings.kkt_tol, sol)) {
        sol.iterations = iter;
        return sol;
    }
    split_duals(st, yu, lam, mu, nu);
    sol.primal = x;
    sol.ineq_duals = lam;
    sol.eq_duals = mu;
    sol.bound_duals = nu;
    sol.kkt = kkt_residuals(p, x, lam, mu, nu);
    sol.status = QpStatus::MaxIterations;
    sol.objective = p.objective(x);
    sol.iterations = iter;
    return sol;
}

}  // namespace swarmplan
