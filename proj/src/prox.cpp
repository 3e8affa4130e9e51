#include "pdsplit/prox.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace pdsplit {

namespace {

constexpr double kFeasSlack = 1e-9;

double sign(double t) { return (t > 0.0) - (t < 0.0); }

double soft(double t, double tau) { return sign(t) * std::max(std::abs(t) - tau, 0.0); }

}  // namespace

ProxFunction::ProxFunction(Space space, std::string name, ProxFn prox, ValueFn value,
                           ProxFn conjugate_prox, ValueFn conjugate_value)
    : space_(space), name_(std::move(name)), prox_(std::move(prox)), value_(std::move(value)),
      conjugate_prox_(std::move(conjugate_prox)), conjugate_value_(std::move(conjugate_value)) {
    if (!prox_) throw ConfigError("ProxFunction: missing prox closure");
}

Vector ProxFunction::prox(double gamma, const Vector& y) const {
    if (gamma <= 0.0) throw ConfigError("prox: gamma must be positive");
    if (y.space() != space_) throw ShapeError("prox: space mismatch");
    return prox_(gamma, y);
}

double ProxFunction::value(const Vector& x) const {
    if (!value_) throw UnsupportedEvaluationError("ProxFunction '" + name_ + "' has no value");
    return value_(x);
}

Vector ProxFunction::conjugate_prox(double gamma, const Vector& y) const {
    if (!conjugate_prox_) {
        throw UnsupportedEvaluationError("ProxFunction '" + name_ + "' has no conjugate prox");
    }
    return conjugate_prox_(gamma, y);
}

double ProxFunction::conjugate_value(const Vector& u) const {
    if (!conjugate_value_) {
        throw UnsupportedEvaluationError("ProxFunction '" + name_ + "' has no conjugate value");
    }
    return conjugate_value_(u);
}

SmoothFunction::SmoothFunction(Space space, std::string name, GradientFn gradient,
                               double lipschitz_constant, ValueFn value)
    : space_(space), name_(std::move(name)), gradient_(std::move(gradient)),
      lipschitz_(lipschitz_constant), value_(std::move(value)) {
    if (!gradient_) throw ConfigError("SmoothFunction: missing gradient closure");
    if (!(lipschitz_ >= 0.0)) throw ConfigError("SmoothFunction: negative Lipschitz constant");
}

Vector SmoothFunction::gradient(const Vector& x) const {
    if (x.space() != space_) throw ShapeError("gradient: space mismatch");
    return gradient_(x);
}

double SmoothFunction::value(const Vector& x) const {
    if (!value_) throw UnsupportedEvaluationError("SmoothFunction '" + name_ + "' has no value");
    return value_(x);
}

Vector prox_conjugate(const ProxFunction& f, double gamma, const Vector& y) {
    if (gamma <= 0.0) throw ConfigError("prox_conjugate: gamma must be positive");
    if (f.has_conjugate_prox()) return f.conjugate_prox(gamma, y);
    Vector p = f.prox(1.0 / gamma, (1.0 / gamma) * y);
    return y - gamma * p;
}

double subdifferential_check(const ProxFunction& f, double gamma, const Vector& y, int samples,
                             std::uint64_t seed) {
    Vector p = f.prox(gamma, y);
    double fp = f.value(p);
    Rng rng(seed);
    double worst = 0.0;
    double radius = 0.5 * (1.0 + norm(p));
    for (int k = 0; k < samples; ++k) {
        Vector w = p + radius * normal_vector(rng, f.space());
        double fw = f.value(w);
        if (fw == kPlusInfinity) {
            // Pull the candidate into the domain; a tiny-step prox is an
            // approximate projection.
            w = f.prox(1e-8, w);
            fw = f.value(w);
            if (fw == kPlusInfinity) continue;
        }
        double viol = fp + inner(y - p, w - p) / gamma - fw;
        worst = std::max(worst, viol);
    }
    return worst;
}

GradientCheckReport gradient_check(const SmoothFunction& h, int samples, std::uint64_t seed) {
    const double step = 1e-5;
    Rng rng(seed);
    GradientCheckReport rep;
    for (int k = 0; k < samples; ++k) {
        Vector x = normal_vector(rng, h.space());
        Vector g = h.gradient(x);
        Vector fd(h.space());
        for (int i = 0; i < h.space().dim; ++i) {
            Vector xp = x;
            Vector xm = x;
            xp[i] += step;
            xm[i] -= step;
            fd[i] = (h.value(xp) - h.value(xm)) / (2.0 * step);
        }
        double rel = norm(g - fd) / (1.0 + norm(g));
        rep.max_rel_error = std::max(rep.max_rel_error, rel);
    }
    rep.ok = rep.max_rel_error <= 1e-6;
    return rep;
}

ResolventOperator to_resolvent(const ProxFunction& f) {
    ResolventFn res = [f](double gamma, const Vector& y) { return f.prox(gamma, y); };
    ResolventFn inv = nullptr;
    if (f.has_conjugate_prox()) {
        inv = [f](double gamma, const Vector& y) { return f.conjugate_prox(gamma, y); };
    }
    return ResolventOperator(f.space(), std::move(res), std::move(inv));
}

// ----- catalog --------------------------------------------------------------

ProxFunction zero_function(Space s) {
    return ProxFunction(
        s, "zero",
        [](double, const Vector& y) { return y; },
        [](const Vector&) { return 0.0; },
        [s](double, const Vector&) { return Vector(s); },
        [](const Vector& u) {
            // conjugate is the indicator of {0}
            for (std::size_t i = 0; i < u.size(); ++i) {
                if (std::abs(u[i]) > kFeasSlack) return kPlusInfinity;
            }
            return 0.0;
        });
}

ProxFunction linear_function(Space s, Vector a) {
    if (a.space() != s) throw ShapeError("linear_function: coefficient space mismatch");
    return ProxFunction(
        s, "linear",
        [a](double gamma, const Vector& y) { return y - gamma * a; },
        [a](const Vector& x) { return inner(x, a); },
        [a](double, const Vector&) { return a; },
        [a](const Vector& u) {
            double tol = kFeasSlack * (1.0 + norm(a));
            return norm(u - a) <= tol ? 0.0 : kPlusInfinity;
        });
}

ProxFunction diagonal_quadratic(Space s, Vector m_diag, Vector b) {
    if (m_diag.space() != s || b.space() != s) {
        throw ShapeError("diagonal_quadratic: parameter space mismatch");
    }
    auto value = [m_diag, b](const Vector& x) {
        double v = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double ri = m_diag[i] * x[i] - b[i];
            v += 0.5 * ri * ri;
        }
        return v;
    };
    auto prox = [m_diag, b](double gamma, const Vector& y) {
        Vector p(y.space());
        for (std::size_t i = 0; i < y.size(); ++i) {
            p[i] = (y[i] + gamma * m_diag[i] * b[i]) / (1.0 + gamma * m_diag[i] * m_diag[i]);
        }
        return p;
    };
    bool invertible = true;
    for (std::size_t i = 0; i < m_diag.size(); ++i) {
        if (m_diag[i] == 0.0) invertible = false;
    }
    ProxFn cprox = nullptr;
    ValueFn cvalue = nullptr;
    if (invertible) {
        cprox = [m_diag, b](double gamma, const Vector& y) {
            Vector p(y.space());
            for (std::size_t i = 0; i < y.size(); ++i) {
                double m2 = m_diag[i] * m_diag[i];
                p[i] = m2 * (y[i] - gamma * b[i] / m_diag[i]) / (m2 + gamma);
            }
            return p;
        };
        cvalue = [m_diag, b](const Vector& u) {
            double v = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) {
                double m2 = m_diag[i] * m_diag[i];
                v += 0.5 * u[i] * u[i] / m2 + u[i] * b[i] / m_diag[i];
            }
            return v;
        };
    }
    return ProxFunction(s, "diagonal_quadratic", prox, value, cprox, cvalue);
}

ProxFunction l1_norm(Space s, double weight) {
    if (weight <= 0.0) throw ConfigError("l1_norm: weight must be positive");
    return ProxFunction(
        s, "l1",
        [weight](double gamma, const Vector& y) {
            Vector p(y.space());
            for (std::size_t i = 0; i < y.size(); ++i) p[i] = soft(y[i], gamma * weight);
            return p;
        },
        [weight](const Vector& x) {
            double v = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) v += std::abs(x[i]);
            return weight * v;
        },
        [weight](double, const Vector& y) {
            Vector p(y.space());
            for (std::size_t i = 0; i < y.size(); ++i) p[i] = std::clamp(y[i], -weight, weight);
            return p;
        },
        [weight](const Vector& u) {
            double tol = kFeasSlack * (1.0 + weight);
            for (std::size_t i = 0; i < u.size(); ++i) {
                if (std::abs(u[i]) > weight + tol) return kPlusInfinity;
            }
            return 0.0;
        });
}

ProxFunction euclidean_norm(Space s, double weight) {
    if (weight <= 0.0) throw ConfigError("euclidean_norm: weight must be positive");
    return ProxFunction(
        s, "euclidean",
        [weight](double gamma, const Vector& y) {
            double n = norm(y);
            if (n <= gamma * weight) return Vector(y.space());
            return (1.0 - gamma * weight / n) * y;
        },
        [weight](const Vector& x) { return weight * norm(x); },
        [weight](double, const Vector& y) {
            double n = norm(y);
            if (n <= weight) return y;
            return (weight / n) * y;
        },
        [weight](const Vector& u) {
            double tol = kFeasSlack * (1.0 + weight);
            return norm(u) <= weight + tol ? 0.0 : kPlusInfinity;
        });
}

ProxFunction box_indicator(Space s, Vector lo, Vector hi) {
    if (lo.space() != s || hi.space() != s) throw ShapeError("box_indicator: bound space mismatch");
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (lo[i] > hi[i]) throw ConfigError("box_indicator: lo > hi");
    }
    return ProxFunction(
        s, "box",
        [lo, hi](double, const Vector& y) {
            Vector p(y.space());
            for (std::size_t i = 0; i < y.size(); ++i) p[i] = std::clamp(y[i], lo[i], hi[i]);
            return p;
        },
        [lo, hi](const Vector& x) {
            for (std::size_t i = 0; i < x.size(); ++i) {
                double tol = kFeasSlack * (1.0 + std::abs(lo[i]) + std::abs(hi[i]));
                if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return kPlusInfinity;
            }
            return 0.0;
        },
        nullptr,
        [lo, hi](const Vector& u) {
            // support function of the box
            double v = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) v += std::max(lo[i] * u[i], hi[i] * u[i]);
            return v;
        });
}

ProxFunction ball_indicator(Space s, Vector center, double radius) {
    if (center.space() != s) throw ShapeError("ball_indicator: center space mismatch");
    if (radius <= 0.0) throw ConfigError("ball_indicator: radius must be positive");
    return ProxFunction(
        s, "ball",
        [center, radius](double, const Vector& y) {
            Vector d = y - center;
            double n = norm(d);
            if (n <= radius) return y;
            return center + (radius / n) * d;
        },
        [center, radius](const Vector& x) {
            double tol = kFeasSlack * (1.0 + radius);
            return norm(x - center) <= radius + tol ? 0.0 : kPlusInfinity;
        },
        nullptr,
        [center, radius](const Vector& u) { return inner(u, center) + radius * norm(u); });
}

ProxFunction hyperplane_indicator(Space s, Vector a, double b) {
    if (a.space() != s) throw ShapeError("hyperplane_indicator: normal space mismatch");
    double a2 = inner(a, a);
    if (a2 == 0.0) throw ConfigError("hyperplane_indicator: zero normal");
    return ProxFunction(
        s, "hyperplane",
        [a, b, a2](double, const Vector& y) { return y - ((inner(a, y) - b) / a2) * a; },
        [a, b](const Vector& x) {
            double tol = kFeasSlack * (1.0 + std::abs(b) + norm(a) * norm(x));
            return std::abs(inner(a, x) - b) <= tol ? 0.0 : kPlusInfinity;
        },
        nullptr,
        [a, b, a2](const Vector& u) {
            // conjugate is finite only on span{a}: value t*b at u = t*a
            double t = inner(u, a) / a2;
            double tol = kFeasSlack * (1.0 + norm(u));
            return norm(u - t * a) <= tol ? t * b : kPlusInfinity;
        });
}

ProxFunction nonnegative_indicator(Space s) {
    return ProxFunction(
        s, "nonneg",
        [](double, const Vector& y) {
            Vector p(y.space());
            for (std::size_t i = 0; i < y.size(); ++i) p[i] = std::max(y[i], 0.0);
            return p;
        },
        [](const Vector& x) {
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (x[i] < -kFeasSlack * (1.0 + std::abs(x[i]))) return kPlusInfinity;
            }
            return 0.0;
        },
        [](double, const Vector& y) {
            Vector p(y.space());
            for (std::size_t i = 0; i < y.size(); ++i) p[i] = std::min(y[i], 0.0);
            return p;
        },
        [](const Vector& u) {
            for (std::size_t i = 0; i < u.size(); ++i) {
                if (u[i] > kFeasSlack * (1.0 + std::abs(u[i]))) return kPlusInfinity;
            }
            return 0.0;
        });
}

ProxFunction zero_point_indicator(Space s) {
    return ProxFunction(
        s, "zero_point",
        [s](double, const Vector&) { return Vector(s); },
        [](const Vector& x) {
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (std::abs(x[i]) > kFeasSlack) return kPlusInfinity;
            }
            return 0.0;
        },
        [](double, const Vector& y) { return y; },
        [](const Vector&) { return 0.0; });
}

ProxFunction huber_function(Space s, double delta) {
    if (delta <= 0.0) throw ConfigError("huber_function: delta must be positive");
    return ProxFunction(
        s, "huber",
        [delta](double gamma, const Vector& y) {
            Vector p(y.space());
            for (std::size_t i = 0; i < y.size(); ++i) {
                double t = y[i];
                p[i] = std::abs(t) <= delta + gamma ? t * delta / (delta + gamma)
                                                    : t - gamma * sign(t);
            }
            return p;
        },
        [delta](const Vector& x) {
            double v = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                double t = std::abs(x[i]);
                v += t <= delta ? t * t / (2.0 * delta) : t - delta / 2.0;
            }
            return v;
        },
        [delta](double gamma, const Vector& y) {
            Vector p(y.space());
            for (std::size_t i = 0; i < y.size(); ++i) {
                p[i] = std::clamp(y[i] / (1.0 + delta * gamma), -1.0, 1.0);
            }
            return p;
        },
        [delta](const Vector& u) {
            double v = 0.0;
            for (std::size_t i = 0; i < u.size(); ++i) {
                if (std::abs(u[i]) > 1.0 + kFeasSlack) return kPlusInfinity;
                v += 0.5 * delta * u[i] * u[i];
            }
            return v;
        });
}

SmoothFunction zero_smooth(Space s) {
    return SmoothFunction(s, "zero", [s](const Vector&) { return Vector(s); }, 0.0,
                          [](const Vector&) { return 0.0; });
}

SmoothFunction linear_smooth(Space s, Vector a) {
    if (a.space() != s) throw ShapeError("linear_smooth: coefficient space mismatch");
    return SmoothFunction(s, "linear", [a](const Vector&) { return a; }, 0.0,
                          [a](const Vector& x) { return inner(x, a); });
}

SmoothFunction quadratic_smooth(Space s, double weight, Vector center) {
    if (center.space() != s) throw ShapeError("quadratic_smooth: center space mismatch");
    if (weight < 0.0) throw ConfigError("quadratic_smooth: weight must be >= 0");
    return SmoothFunction(
        s, "quadratic", [weight, center](const Vector& x) { return weight * (x - center); },
        weight, [weight, center](const Vector& x) {
            Vector d = x - center;
            return 0.5 * weight * inner(d, d);
        });
}

SmoothFunction diagonal_quadratic_smooth(Space s, Vector m_diag, Vector b) {
    if (m_diag.space() != s || b.space() != s) {
        throw ShapeError("diagonal_quadratic_smooth: parameter space mismatch");
    }
    double lip = 0.0;
    for (std::size_t i = 0; i < m_diag.size(); ++i) {
        lip = std::max(lip, m_diag[i] * m_diag[i]);
    }
    return SmoothFunction(
        s, "diagonal_quadratic",
        [m_diag, b](const Vector& x) {
            Vector g(x.space());
            for (std::size_t i = 0; i < x.size(); ++i) {
                g[i] = m_diag[i] * (m_diag[i] * x[i] - b[i]);
            }
            return g;
        },
        lip,
        [m_diag, b](const Vector& x) {
            double v = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                double ri = m_diag[i] * x[i] - b[i];
                v += 0.5 * ri * ri;
            }
            return v;
        });
}

SmoothFunction huber_smooth(Space s, double delta) {
    if (delta <= 0.0) throw ConfigError("huber_smooth: delta must be positive");
    return SmoothFunction(
        s, "huber",
        [delta](const Vector& x) {
            Vector g(x.space());
            for (std::size_t i = 0; i < x.size(); ++i) {
                g[i] = std::clamp(x[i] / delta, -1.0, 1.0);
            }
            return g;
        },
        1.0 / delta,
        [delta](const Vector& x) {
            double v = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                double t = std::abs(x[i]);
                v += t <= delta ? t * t / (2.0 * delta) : t - delta / 2.0;
            }
            return v;
        });
}

std::vector<ProxFunction> catalog_for_space(Space s) {
    Rng rng(0xC0FFEEull + static_cast<std::uint64_t>(s.dim));
    Vector a = normal_vector(rng, s);
    Vector m = uniform_vector(rng, s, 0.5, 2.0);
    Vector b = normal_vector(rng, s);
    Vector lo = uniform_vector(rng, s, -2.0, -0.5);
    Vector hi = uniform_vector(rng, s, 0.5, 2.0);
    Vector c = normal_vector(rng, s);
    std::vector<ProxFunction> cat;
    cat.push_back(zero_function(s));
    cat.push_back(linear_function(s, a));
    cat.push_back(diagonal_quadratic(s, m, b));
    cat.push_back(l1_norm(s, 1.0));
    cat.push_back(l1_norm(s, 0.35));
    cat.push_back(euclidean_norm(s, 1.2));
    cat.push_back(box_indicator(s, lo, hi));
    cat.push_back(ball_indicator(s, c, 1.5));
    cat.push_back(hyperplane_indicator(s, a, 0.7));
    cat.push_back(nonnegative_indicator(s));
    cat.push_back(zero_point_indicator(s));
    cat.push_back(huber_function(s, 0.8));
    return cat;
}

}  // namespace pdsplit
