#include "stmpc/reference.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <functional>
#include <limits>

namespace stmpc::reference {
namespace {

using State = std::vector<double>;

void integrate_rkf78(const std::function<void(const State&, State&, double)>& rhs, State& state,
                     double h, double tol) {
  namespace ode = boost::numeric::odeint;
  ode::runge_kutta_fehlberg78<State> stepper;
  ode::integrate_adaptive(ode::make_controlled(tol, tol, stepper), rhs, state, 0.0, h,
                          h / 16.0);
}

}  // namespace

Eigen::MatrixXd matrix_exponential_taylor(const Eigen::MatrixXd& A, double t) {
  const int n = static_cast<int>(A.rows());
  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k <= 200; ++k) {
    term = (term * A) * (t / static_cast<double>(k));
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-16) break;
  }
  return sum;
}

DiscreteMap discretize_ode(const LinearSystem& sys, double h, double tol) {
  const int n = sys.state_dim();
  const int m = sys.input_dim();
  // Columns of [A_s | B_s] obey d/ds A_s = A A_s, d/ds B_s = A B_s + B.
  State state(static_cast<std::size_t>(n * (n + m)), 0.0);
  for (int i = 0; i < n; ++i) state[static_cast<std::size_t>(i * n + i)] = 1.0;

  const Eigen::MatrixXd A = sys.A;
  const Eigen::MatrixXd B = sys.B;
  auto rhs = [&](const State& y, State& dy, double) {
    Eigen::Map<const Eigen::MatrixXd> Y(y.data(), n, n + m);
    Eigen::Map<Eigen::MatrixXd> dY(dy.data(), n, n + m);
    dY = A * Y;
    dY.rightCols(m) += B;
  };
  std::function<void(const State&, State&, double)> f = rhs;
  integrate_rkf78(f, state, h, tol);

  Eigen::Map<const Eigen::MatrixXd> Y(state.data(), n, n + m);
  return DiscreteMap{Y.leftCols(n), Y.rightCols(m)};
}

Eigen::VectorXd propagate_ode(const LinearSystem& sys, const Eigen::VectorXd& x0,
                              const Eigen::VectorXd& u, double h, double tol) {
  const int n = sys.state_dim();
  State state(static_cast<std::size_t>(n));
  Eigen::Map<Eigen::VectorXd>(state.data(), n) = x0;
  const Eigen::VectorXd drive = sys.B * u;
  const Eigen::MatrixXd A = sys.A;
  std::function<void(const State&, State&, double)> rhs = [&](const State& y, State& dy,
                                                              double) {
    Eigen::Map<const Eigen::VectorXd> Y(y.data(), n);
    Eigen::Map<Eigen::VectorXd> dY(dy.data(), n);
    dY = A * Y + drive;
  };
  integrate_rkf78(rhs, state, h, tol);
  return Eigen::Map<const Eigen::VectorXd>(state.data(), n);
}

Eigen::MatrixXd stage_cost_kernel_trapezoid(const LinearSystem& sys, const CostWeights& weights,
                                            double h, double panel_width) {
  const int n = sys.state_dim();
  const int m = sys.input_dim();
  const long panels = std::max(1L, std::lround(h / panel_width));
  const double w = h / static_cast<double>(panels);

  const DiscreteMap step = discretize(sys, w);
  Eigen::MatrixXd As = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd Bs = Eigen::MatrixXd::Zero(n, m);

  const auto node = [&](const Eigen::MatrixXd& A_s, const Eigen::MatrixXd& B_s) {
    Eigen::MatrixXd C(n, n + m);
    C << A_s, B_s;
    Eigen::MatrixXd G = C.transpose() * weights.Q * C;
    G.bottomRightCorner(m, m) += weights.R;
    return G;
  };

  Eigen::MatrixXd acc = 0.5 * node(As, Bs);
  for (long kpanel = 1; kpanel < panels; ++kpanel) {
    Bs = step.A * Bs + step.B;
    As = step.A * As;
    acc += node(As, Bs);
  }
  Bs = step.A * Bs + step.B;
  As = step.A * As;
  acc += 0.5 * node(As, Bs);
  return w * acc;
}

double continuous_cost_ode(const LinearSystem& sys, const CostWeights& weights,
                           const Eigen::MatrixXd& P_f, const Eigen::VectorXd& x0,
                           const std::vector<Eigen::VectorXd>& u_seq,
                           const std::vector<double>& intervals, double tol) {
  const int n = sys.state_dim();
  if (u_seq.size() != intervals.size()) {
    throw InvalidInputError("continuous_cost_ode: one interval per input");
  }
  State state(static_cast<std::size_t>(n) + 1, 0.0);
  Eigen::Map<Eigen::VectorXd>(state.data(), n) = x0;
  const Eigen::MatrixXd A = sys.A;

  for (std::size_t j = 0; j < u_seq.size(); ++j) {
    const Eigen::VectorXd drive = sys.B * u_seq[j];
    const double u_cost = u_seq[j].dot(weights.R * u_seq[j]);
    std::function<void(const State&, State&, double)> rhs = [&](const State& y, State& dy,
                                                                double) {
      Eigen::Map<const Eigen::VectorXd> Y(y.data(), n);
      dy.back() = Y.dot(weights.Q * Y) + u_cost;
      Eigen::Map<Eigen::VectorXd>(dy.data(), n) = A * Y + drive;
    };
    integrate_rkf78(rhs, state, intervals[j], tol);
  }
  const Eigen::Map<const Eigen::VectorXd> x_final(state.data(), n);
  return state.back() + x_final.dot(P_f * x_final);
}

GridSearchResult ocp_grid_search(const DiscretizationTable& table,
                                 const TerminalIngredients& terminal,
                                 const SamplingPattern& pattern, const Eigen::VectorXd& x0,
                                 double step) {
  const LinearSystem& sys = table.system();
  if (sys.input_dim() != 1 || sys.state_dim() != 1) {
    throw InvalidInputError("ocp_grid_search: scalar-corpus oracle (n = m = 1)");
  }
  const int N = pattern.steps;
  const double ubar = sys.u_bounds[0];
  const long npts = 2 * std::lround(ubar / step) + 1;
  const auto grid_value = [&](long idx) { return -ubar + static_cast<double>(idx) * step; };

  // Scalar per-step coefficients, so the millions of rollouts below stay
  // allocation-free. The route is independent of the condensed assembly.
  std::vector<double> amap(N), bmap(N), gxx(N), gxu(N), guu(N);
  for (int j = 0; j < N; ++j) {
    const int idx = j == 0 ? pattern.index : 1;
    amap[j] = table.map(idx).A(0, 0);
    bmap[j] = table.map(idx).B(0, 0);
    gxx[j] = table.kernel(idx)(0, 0);
    gxu[j] = table.kernel(idx)(0, 1);
    guu[j] = table.kernel(idx)(1, 1);
  }
  const double p_term = terminal.P_f(0, 0);
  const double x_init = x0[0];

  const auto run_cost = [&](const Eigen::VectorXd& z) {
    double cost = 0.0;
    double x = x_init;
    for (int j = 0; j < N; ++j) {
      const double u = z[j];
      cost += gxx[j] * x * x + 2.0 * gxu[j] * x * u + guu[j] * u * u;
      x = amap[j] * x + bmap[j] * u;
    }
    return cost + p_term * x * x;
  };
  const auto terminal_val = [&](const Eigen::VectorXd& z) {
    double x = x_init;
    for (int j = 0; j < N; ++j) x = amap[j] * x + bmap[j] * z[j];
    return p_term * x * x;
  };

  GridSearchResult best;
  best.cost = std::numeric_limits<double>::infinity();

  // Scan the outer coordinates literally; treat the last coordinate exactly:
  // both the cost and the terminal value are convex quadratics in it, so its
  // grid minimum over the feasible index window sits at one of at most four
  // candidate indices (window ends and the two neighbours of the vertex).
  const long outer_total = [&] {
    long total = 1;
    for (int j = 0; j < N - 1; ++j) total *= npts;
    return total;
  }();

  Eigen::VectorXd z(N);
  std::vector<long> digits(static_cast<std::size_t>(std::max(0, N - 1)), 0);
  for (long outer = 0; outer < outer_total; ++outer) {
    long rem = outer;
    for (int j = 0; j < N - 1; ++j) {
      digits[j] = rem % npts;
      rem /= npts;
      z[j] = grid_value(digits[j]);
    }

    // Reconstruct the two quadratics in the last coordinate from three grid
    // samples (exact for quadratics).
    const double u0 = grid_value(0), u1 = grid_value(npts / 2), u2 = grid_value(npts - 1);
    double c0, c1, c2, t0, t1, t2;
    z[N - 1] = u0;
    c0 = run_cost(z);
    t0 = terminal_val(z);
    z[N - 1] = u1;
    c1 = run_cost(z);
    t1 = terminal_val(z);
    z[N - 1] = u2;
    c2 = run_cost(z);
    t2 = terminal_val(z);
    const auto quad_coeffs = [&](double f0, double f1, double f2, double& a, double& b) {
      // f(u) = a u^2 + b u + c through (u0,f0),(u1,f1),(u2,f2)
      const double d01 = (f1 - f0) / (u1 - u0);
      const double d12 = (f2 - f1) / (u2 - u1);
      a = (d12 - d01) / (u2 - u0);
      b = d01 - a * (u0 + u1);
    };
    double ca, cb, ta, tb;
    quad_coeffs(c0, c1, c2, ca, cb);
    quad_coeffs(t0, t1, t2, ta, tb);

    // Feasible index window for the terminal constraint t(u) <= epsilon.
    long lo = 0, hi = npts - 1;
    if (ta > 1e-300) {
      const double tc = t1 - ta * u1 * u1 - tb * u1;
      const double disc = tb * tb - 4.0 * ta * (tc - terminal.epsilon);
      if (disc < 0.0) continue;  // no feasible last coordinate
      const double root = std::sqrt(disc);
      const double u_lo = (-tb - root) / (2.0 * ta);
      const double u_hi = (-tb + root) / (2.0 * ta);
      lo = std::max(lo, static_cast<long>(std::ceil((u_lo + ubar) / step - 1e-9)));
      hi = std::min(hi, static_cast<long>(std::floor((u_hi + ubar) / step + 1e-9)));
    } else if (std::abs(tb) > 1e-300) {
      const double tc = t1 - tb * u1;
      const double u_edge = (terminal.epsilon - tc) / tb;
      if (tb > 0.0) {
        hi = std::min(hi, static_cast<long>(std::floor((u_edge + ubar) / step + 1e-9)));
      } else {
        lo = std::max(lo, static_cast<long>(std::ceil((u_edge + ubar) / step - 1e-9)));
      }
    } else if (t1 > terminal.epsilon + 1e-12) {
      continue;
    }
    if (lo > hi) continue;
    // Guard the window edges against reconstruction round-off.
    while (lo <= hi) {
      z[N - 1] = grid_value(lo);
      if (terminal_val(z) <= terminal.epsilon + 1e-9) break;
      ++lo;
    }
    while (hi >= lo) {
      z[N - 1] = grid_value(hi);
      if (terminal_val(z) <= terminal.epsilon + 1e-9) break;
      --hi;
    }
    if (lo > hi) continue;

    long candidates[5];
    int n_cand = 0;
    candidates[n_cand++] = lo;
    candidates[n_cand++] = hi;
    if (ca > 1e-300) {
      const double vertex = -cb / (2.0 * ca);
      if (std::abs(vertex) < 2.0 * ubar + 1.0) {
        const long v_idx = std::lround((vertex + ubar) / step);
        for (long c : {v_idx - 1, v_idx, v_idx + 1}) {
          if (c > lo && c < hi) candidates[n_cand++] = c;
        }
      }
    }
    for (int c = 0; c < n_cand; ++c) {
      z[N - 1] = grid_value(candidates[c]);
      const double cost = run_cost(z);
      if (cost < best.cost) {
        best.feasible = true;
        best.cost = cost;
        best.z = z;
      }
    }
  }
  return best;
}

}  // namespace stmpc::reference
