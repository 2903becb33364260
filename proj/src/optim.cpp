#include "mfsolv/optim.hpp"

#include <cmath>
#include <deque>

namespace mfs {

namespace {

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double h, int& evals) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd probe = x;
    for (int i = 0; i < x.size(); ++i) {
        probe(i) = x(i) + h;
        double fp = f(probe);
        probe(i) = x(i) - h;
        double fm = f(probe);
        probe(i) = x(i);
        g(i) = (fp - fm) / (2.0 * h);
        evals += 2;
    }
    return g;
}

}  // namespace

OptResult bfgs_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                        Eigen::VectorXd x0, const BfgsOptions& opts) {
    const int dim = static_cast<int>(x0.size());
    OptResult res;
    res.x = std::move(x0);
    res.f = f(res.x);
    res.evals = 1;
    if (dim == 0) return res;

    Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(dim, dim);
    Eigen::VectorXd g = fd_gradient(f, res.x, opts.fd_step, res.evals);
    std::deque<double> history;

    for (int iter = 0; iter < opts.max_iters; ++iter) {
        res.iters = iter + 1;
        if (opts.f_target >= 0.0 && res.f <= opts.f_target) break;
        if (g.lpNorm<Eigen::Infinity>() < opts.grad_tol) break;

        Eigen::VectorXd dir = -(hinv * g);
        double slope = g.dot(dir);
        if (slope >= 0.0) {  // not a descent direction: restart from steepest
            hinv.setIdentity();
            dir = -g;
            slope = g.dot(dir);
        }

        double step = 1.0;
        double f_new = res.f;
        Eigen::VectorXd x_new;
        bool improved = false;
        for (int ls = 0; ls < 40; ++ls) {
            x_new = res.x + step * dir;
            f_new = f(x_new);
            ++res.evals;
            if (f_new <= res.f + 1e-4 * step * slope) {
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;

        Eigen::VectorXd g_new = fd_gradient(f, x_new, opts.fd_step, res.evals);
        Eigen::VectorXd s = x_new - res.x;
        Eigen::VectorXd y = g_new - g;
        double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            Eigen::VectorXd hy = hinv * y;
            double yhy = y.dot(hy);
            hinv += ((sy + yhy) / (sy * sy)) * (s * s.transpose());
            hinv -= (hy * s.transpose() + s * hy.transpose()) / sy;
        }
        res.x = std::move(x_new);
        res.f = f_new;
        g = std::move(g_new);

        if (opts.plateau_window > 0 && res.f > opts.plateau_above) {
            history.push_back(res.f);
            if (static_cast<int>(history.size()) > opts.plateau_window) {
                double before = history.front();
                history.pop_front();
                if (before - res.f < opts.plateau_rel * std::max(std::abs(before), 1e-30)) break;
            }
        }
    }
    return res;
}

OptResult gradient_descent_bb(const std::function<double(const Eigen::VectorXd&)>& f,
                              const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
                              Eigen::VectorXd x0, const GdOptions& opts) {
    OptResult res;
    res.x = std::move(x0);
    res.f = f(res.x);
    res.evals = 1;
    if (res.x.size() == 0) return res;

    Eigen::VectorXd g = grad(res.x);
    double step = 1.0 / std::max(1.0, g.norm());

    for (int iter = 0; iter < opts.max_iters; ++iter) {
        res.iters = iter + 1;
        if (opts.f_target >= 0.0 && res.f <= opts.f_target) break;
        if (g.lpNorm<Eigen::Infinity>() < opts.grad_tol) break;

        double trial = step;
        Eigen::VectorXd x_new;
        double f_new = res.f;
        bool improved = false;
        for (int ls = 0; ls < 30; ++ls) {
            x_new = res.x - trial * g;
            f_new = f(x_new);
            ++res.evals;
            if (f_new < res.f) {
                improved = true;
                break;
            }
            trial *= 0.5;
        }
        if (!improved) break;

        Eigen::VectorXd g_new = grad(x_new);
        Eigen::VectorXd s = x_new - res.x;
        Eigen::VectorXd y = g_new - g;
        res.x = std::move(x_new);
        res.f = f_new;
        g = std::move(g_new);

        double sy = s.dot(y);
        step = (sy > 1e-300) ? s.squaredNorm() / sy : trial * 2.0;
        if (!(step > 1e-12 && step < 1e6)) step = trial * 2.0;
    }
    return res;
}

}
