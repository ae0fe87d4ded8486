#include "tube/geometry.hpp"

#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "tube/errors.hpp"

namespace tube {

CurvatureProfile::CurvatureProfile(std::string name, Fn f, Fn df, Fn d2f)
    : name_(std::move(name)), f_(std::move(f)), df_(std::move(df)), d2f_(std::move(d2f)) {}

CurvatureProfile CurvatureProfile::constant(double value) {
    return {"constant", [value](double) { return value; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
}

CurvatureProfile CurvatureProfile::sine(double amplitude, double frequency, double phase) {
    return {"sine", [=](double s) { return amplitude * std::sin(frequency * s + phase); },
            [=](double s) { return amplitude * frequency * std::cos(frequency * s + phase); },
            [=](double s) { return -amplitude * frequency * frequency * std::sin(frequency * s + phase); }};
}

CurvatureProfile CurvatureProfile::bump(double amplitude, double center, double half_width) {
    if (!(half_width > 0.0)) throw PreconditionError("bump: half_width must be positive");
    // g(x) = exp(1 - 1/u), u = 1 - x^2
    auto g = [](double x) {
        const double u = 1.0 - x * x;
        return u > 0.0 ? std::exp(1.0 - 1.0 / u) : 0.0;
    };
    auto dg = [g](double x) {
        const double u = 1.0 - x * x;
        return u > 0.0 ? g(x) * (-2.0 * x / (u * u)) : 0.0;
    };
    auto d2g = [g](double x) {
        const double u = 1.0 - x * x;
        if (u <= 0.0) return 0.0;
        const double u2 = u * u;
        return g(x) * (4.0 * x * x / (u2 * u2) - 2.0 / u2 - 8.0 * x * x / (u2 * u));
    };
    const double w = half_width;
    return {"bump", [=](double s) { return amplitude * g((s - center) / w); },
            [=](double s) { return amplitude * dg((s - center) / w) / w; },
            [=](double s) { return amplitude * d2g((s - center) / w) / (w * w); }};
}

CurvatureProfile CurvatureProfile::sampled(const std::vector<double>& s, const std::vector<double>& values) {
    if (s.size() != values.size() || s.size() < 5)
        throw PreconditionError("sampled curvature: need at least 5 (s, value) pairs of equal length");
    const double step = (s.back() - s.front()) / static_cast<double>(s.size() - 1);
    if (!(step > 0.0)) throw PreconditionError("sampled curvature: s must be increasing");
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double expected = s.front() + static_cast<double>(i) * step;
        if (std::abs(s[i] - expected) > 1e-9 * std::max(1.0, std::abs(expected)))
            throw PreconditionError("sampled curvature: s samples must be uniformly spaced");
    }
    using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
    auto spline = std::make_shared<Spline>(values.data(), values.size(), s.front(), step);
    return {"sampled", [spline](double x) { return (*spline)(x); }, [spline](double x) { return spline->prime(x); },
            [spline](double x) { return spline->double_prime(x); }};
}

namespace {

constexpr std::size_t kNormSamples = 4001;

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw PreconditionError(std::string("CurveSpec: non-finite ") + what);
}

}  // namespace

CurveSpec::CurveSpec(std::size_t dim, double length, CurvatureProfile kappa1, std::vector<CurvatureProfile> higher,
                     std::optional<double> c_gamma)
    : dim_(dim), length_(length), kappa1_(std::move(kappa1)), higher_(std::move(higher)) {
    if (dim_ < 2) throw PreconditionError("CurveSpec: dimension must be at least 2");
    if (!(length_ > 0.0)) throw PreconditionError("CurveSpec: length must be positive");
    if (higher_.size() != dim_ - 2) throw PreconditionError("CurveSpec: need exactly dim-2 higher curvatures");

    double k0 = 0.0, k1 = 0.0, k2 = 0.0, hc = 0.0;
    for (std::size_t i = 0; i < kNormSamples; ++i) {
        const double s = length_ * static_cast<double>(i) / static_cast<double>(kNormSamples - 1);
        const double v = kappa1_.value(s), dv = kappa1_.derivative(s), d2v = kappa1_.second_derivative(s);
        require_finite(v, "kappa1");
        require_finite(dv, "kappa1'");
        require_finite(d2v, "kappa1''");
        k0 = std::max(k0, std::abs(v));
        k1 = std::max(k1, std::abs(dv));
        k2 = std::max(k2, std::abs(d2v));
        for (const auto& k : higher_) {
            const double w = k.value(s), dw = k.derivative(s);
            require_finite(w, "higher curvature");
            require_finite(dw, "higher curvature derivative");
            hc = std::max({hc, std::abs(w), std::abs(dw)});
        }
    }
    norms_.kappa1_c0 = k0;
    norms_.kappa1_c1 = std::max(k0, k1);
    norms_.kappa1_c2 = std::max({k0, k1, k2});
    norms_.higher_c1 = hc;
    const double measured = std::max(norms_.kappa1_c2, norms_.higher_c1);
    if (c_gamma) {
        if (!(*c_gamma >= 0.0)) throw PreconditionError("CurveSpec: c_gamma must be non-negative");
        if (measured > *c_gamma * (1.0 + 1e-12)) {
            std::ostringstream msg;
            msg << "CurveSpec: curvature norm " << measured << " exceeds c_gamma " << *c_gamma;
            throw PreconditionError(msg.str());
        }
        c_gamma_ = *c_gamma;
    } else {
        c_gamma_ = measured;
    }
}

double CurveSpec::kappa(std::size_t i, double s) const {
    if (i == 1) return kappa1_.value(s);
    if (i < 1 || i >= dim_) throw DomainError("CurveSpec::kappa: index out of range");
    return higher_[i - 2].value(s);
}

double CurveSpec::kappa_dot(std::size_t i, double s) const {
    if (i == 1) return kappa1_.derivative(s);
    if (i < 1 || i >= dim_) throw DomainError("CurveSpec::kappa_dot: index out of range");
    return higher_[i - 2].derivative(s);
}

namespace {

void check_arc_length(const CurveSpec& curve, double s) {
    const double slack = 1e-12 * curve.length();
    if (!(s >= -slack && s <= curve.length() + slack)) {
        std::ostringstream msg;
        msg << "arc length " << s << " outside [0, " << curve.length() << "]";
        throw DomainError(msg.str());
    }
}

FrenetMatrix skew_band(std::size_t d, auto&& entry) {
    FrenetMatrix k{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d))};
    for (std::size_t i = 0; i + 1 < d; ++i) {
        const double v = entry(i + 1);
        k.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = v;
        k.entries(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = -v;
    }
    return k;
}

}  // namespace

FrenetMatrix frenet_matrix(const CurveSpec& curve, double s) {
    check_arc_length(curve, s);
    return skew_band(curve.dim(), [&](std::size_t i) { return curve.kappa(i, s); });
}

FrenetMatrix frenet_matrix_derivative(const CurveSpec& curve, double s) {
    check_arc_length(curve, s);
    return skew_band(curve.dim(), [&](std::size_t i) { return curve.kappa_dot(i, s); });
}

Eigen::MatrixXd nearest_rotation(const Eigen::MatrixXd& r) {
    Eigen::MatrixXd x = r;
    const auto n = r.rows();
    for (int it = 0; it < 60; ++it) {
        Eigen::MatrixXd next = 0.5 * (x + x.inverse().transpose());
        const double change = (next - x).norm();
        x = std::move(next);
        if (change < 1e-15 * std::sqrt(static_cast<double>(n))) break;
    }
    return x;
}

RotationPath solve_tang_frame(const CurveSpec& curve, std::size_t n_steps) {
    if (n_steps < 2) throw PreconditionError("solve_tang_frame: need at least 2 steps");
    const auto m = static_cast<Eigen::Index>(curve.dim() - 1);
    const double L = curve.length();
    const double step = L / static_cast<double>(n_steps);
    auto generator = [&](double s) { return frenet_matrix(curve, std::clamp(s, 0.0, L)).lower_block(); };
    auto rhs = [&](double s, const Eigen::MatrixXd& r) -> Eigen::MatrixXd { return -r * generator(s); };

    RotationPath path;
    path.s.reserve(n_steps + 1);
    path.matrices.reserve(n_steps + 1);
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(m, m);
    path.s.push_back(0.0);
    path.matrices.push_back(r);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(m, m);
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double s = static_cast<double>(k) * step;
        const Eigen::MatrixXd k1 = rhs(s, r);
        const Eigen::MatrixXd k2 = rhs(s + 0.5 * step, r + 0.5 * step * k1);
        const Eigen::MatrixXd k3 = rhs(s + 0.5 * step, r + 0.5 * step * k2);
        const Eigen::MatrixXd k4 = rhs(s + step, r + step * k3);
        r += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        const double drift = (r * r.transpose() - eye).norm();
        path.max_drift = std::max(path.max_drift, drift);
        if (drift > 1e-6) {
            std::ostringstream msg;
            msg << "orthogonality drift " << drift << " at s=" << s + step << " before correction";
            path.warnings.push_back(msg.str());
        }
        if (drift > 1e-9) {
            r = nearest_rotation(r);
            ++path.corrections;
        }
        path.s.push_back(k + 1 == n_steps ? L : s + step);
        path.matrices.push_back(r);
    }
    return path;
}

ValidityReport check_immersion(double c_gamma, double omega_radius, double epsilon) {
    ValidityReport rep;
    const double ca = c_gamma * omega_radius;
    rep.lower = 1.0 - ca * epsilon;
    rep.upper = 1.0 + ca * epsilon;
    rep.threshold = ca > 0.0 ? 1.0 / ca : std::numeric_limits<double>::infinity();
    rep.pass = epsilon < rep.threshold;
    return rep;
}

JacobianField jacobian_field(const CurveSpec& curve, const RotationPath& rot, double epsilon, const TensorGrid& grid) {
    if (!(epsilon > 0.0)) throw PreconditionError("jacobian_field: epsilon must be positive");
    if (grid.dim() != curve.dim()) throw AssemblyError("jacobian_field: grid dimension differs from curve dimension");
    if (std::abs(grid.s().lo) > 0.0 || std::abs(grid.s().hi - curve.length()) > 1e-12 * curve.length())
        throw AssemblyError("jacobian_field: grid does not span [0, L]");
    if (rot.steps() != tang_frame_steps(grid) || std::abs(rot.s.back() - curve.length()) > 1e-12 * curve.length())
        throw AssemblyError("jacobian_field: rotation path is not sampled on the grid's nodes and midpoints");
    const ValidityReport validity = check_immersion(curve, grid.radius(), epsilon);
    if (!validity.pass) {
        std::ostringstream msg;
        msg << "jacobian_field: eps=" << epsilon << " violates eps < (C_Gamma a)^-1 = " << validity.threshold
            << "; h does not vanish in Omega only below that threshold";
        throw PreconditionError(msg.str());
    }

    const std::size_t ms = grid.s().count;
    const std::size_t nt = grid.transverse_count();
    const auto m = static_cast<Eigen::Index>(curve.dim() - 1);
    std::vector<Eigen::VectorXd> points(nt);
    for (std::size_t tau = 0; tau < nt; ++tau) {
        const auto p = grid.transverse_point(tau);
        points[tau] = Eigen::Map<const Eigen::VectorXd>(p.data(), m);
    }

    JacobianField jf;
    jf.grid = grid;
    jf.epsilon = epsilon;
    const auto total = static_cast<Eigen::Index>(grid.size());
    jf.h.resize(total);
    jf.d1h.resize(total);
    jf.d11h.resize(total);
    jf.grad_t_sq.resize(total);
    jf.lap_t = Eigen::VectorXd::Zero(total);
    jf.h_mid.resize(static_cast<Eigen::Index>(ms + 1), static_cast<Eigen::Index>(nt));

    for (std::size_t i = 0; i < ms; ++i) {
        const double s = grid.s().node(i);
        const Eigen::MatrixXd& r = rot.matrices[2 * (i + 1)];
        const FrenetMatrix k = frenet_matrix(curve, s);
        const FrenetMatrix kd = frenet_matrix_derivative(curve, s);
        const Eigen::MatrixXd kp = k.lower_block();
        const Eigen::MatrixXd kdp = kd.lower_block();
        const Eigen::VectorXd col = k.entries.col(0).tail(m);     // K_{nu 1}
        const Eigen::VectorXd dcol = kd.entries.col(0).tail(m);   // dK_{nu 1}/ds
        Eigen::VectorXd ddcol = Eigen::VectorXd::Zero(m);         // d2K_{nu 1}/ds2
        ddcol(0) = -curve.kappa1().second_derivative(s);

        const Eigen::VectorXd w1 = dcol - kp * col;
        const Eigen::VectorXd w2 = ddcol - kdp * col - 2.0 * kp * dcol + kp * (kp * col);
        const Eigen::VectorXd g = r.col(0);  // R_{mu 2}
        const Eigen::VectorXd c1 = r * w1;
        const Eigen::VectorXd c2 = r * w2;
        const double kappa1 = curve.kappa1().value(s);
        const double grad_sq = epsilon * epsilon * kappa1 * kappa1 * g.squaredNorm();
        for (std::size_t tau = 0; tau < nt; ++tau) {
            const auto idx = static_cast<Eigen::Index>(grid.index(i, tau));
            jf.h(idx) = 1.0 - epsilon * kappa1 * g.dot(points[tau]);
            jf.d1h(idx) = epsilon * c1.dot(points[tau]);
            jf.d11h(idx) = epsilon * c2.dot(points[tau]);
            jf.grad_t_sq(idx) = grad_sq;
        }
    }
    for (std::size_t k = 0; k <= ms; ++k) {
        const double s = grid.s().midpoint(k);
        const Eigen::VectorXd g = rot.matrices[2 * k + 1].col(0);
        const double kappa1 = curve.kappa1().value(s);
        for (std::size_t tau = 0; tau < nt; ++tau)
            jf.h_mid(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(tau)) =
                1.0 - epsilon * kappa1 * g.dot(points[tau]);
    }
    if (jf.h.minCoeff() <= 0.0 || jf.h_mid.minCoeff() <= 0.0)
        throw GeometryError("jacobian_field: h is not positive on the grid");
    return jf;
}

}  // namespace tube
