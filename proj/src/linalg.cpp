#include "pdsplit/linalg.hpp"

#include <cmath>
#include <memory>
#include <string>
#include <utility>

#include "pdsplit/kernels.hpp"

namespace pdsplit {

namespace {

void require_same_space(Space a, Space b, const char* what) {
    if (a != b) {
        throw ShapeError(std::string(what) + ": space mismatch (" + std::to_string(a.dim) +
                         " vs " + std::to_string(b.dim) + ")");
    }
}

}  // namespace

Vector::Vector(Space s, std::vector<double> entries) : space_(s), e_(std::move(entries)) {
    if (e_.size() != static_cast<std::size_t>(s.dim)) {
        throw ShapeError("Vector: " + std::to_string(e_.size()) + " entries for dimension " +
                         std::to_string(s.dim));
    }
    for (double x : e_) {
        if (!std::isfinite(x)) throw ShapeError("Vector: non-finite entry");
    }
}

Vector& Vector::operator+=(const Vector& o) {
    require_same_space(space_, o.space_, "Vector +=");
    kernels::axpy(1.0, o.data(), data(), size());
    return *this;
}

Vector& Vector::operator-=(const Vector& o) {
    require_same_space(space_, o.space_, "Vector -=");
    kernels::axpy(-1.0, o.data(), data(), size());
    return *this;
}

Vector& Vector::operator*=(double a) {
    kernels::scal(a, data(), size());
    return *this;
}

Vector operator+(Vector a, const Vector& b) { return a += b; }
Vector operator-(Vector a, const Vector& b) { return a -= b; }
Vector operator*(double a, Vector v) { return v *= a; }
Vector operator-(Vector v) { return v *= -1.0; }

void axpy_inplace(double alpha, const Vector& x, Vector& y) {
    require_same_space(x.space(), y.space(), "axpy");
    kernels::axpy(alpha, x.data(), y.data(), y.size());
}

double inner(const Vector& u, const Vector& v) {
    require_same_space(u.space(), v.space(), "inner");
    return kernels::dot(u.data(), v.data(), u.size());
}

double norm(const Vector& v) { return std::sqrt(inner(v, v)); }

bool all_finite(const Vector& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) return false;
    }
    return true;
}

bool BlockVector::same_structure(const BlockVector& o) const {
    if (blocks_.size() != o.blocks_.size()) return false;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        if (blocks_[i].space() != o.blocks_[i].space()) return false;
    }
    return true;
}

BlockVector& BlockVector::operator+=(const BlockVector& o) {
    if (!same_structure(o)) throw ShapeError("BlockVector +=: structure mismatch");
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += o.blocks_[i];
    return *this;
}

BlockVector& BlockVector::operator-=(const BlockVector& o) {
    if (!same_structure(o)) throw ShapeError("BlockVector -=: structure mismatch");
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= o.blocks_[i];
    return *this;
}

BlockVector& BlockVector::operator*=(double a) {
    for (auto& b : blocks_) b *= a;
    return *this;
}

BlockVector operator+(BlockVector a, const BlockVector& b) { return a += b; }
BlockVector operator-(BlockVector a, const BlockVector& b) { return a -= b; }
BlockVector operator*(double a, BlockVector v) { return v *= a; }

double block_inner(const BlockVector& u, const BlockVector& v) {
    if (!u.same_structure(v)) throw ShapeError("block_inner: structure mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < u.block_count(); ++i) s += inner(u.block(i), v.block(i));
    return s;
}

double block_norm(const BlockVector& v) { return std::sqrt(block_inner(v, v)); }

bool all_finite(const BlockVector& v) {
    for (const auto& b : v.blocks()) {
        if (!all_finite(b)) return false;
    }
    return true;
}

void axpy_inplace(double alpha, const BlockVector& x, BlockVector& y) {
    if (!x.same_structure(y)) throw ShapeError("block axpy: structure mismatch");
    for (std::size_t i = 0; i < y.block_count(); ++i) {
        axpy_inplace(alpha, x.block(i), y.block(i));
    }
}

LinearOperator::LinearOperator(Space domain, Space codomain, Apply apply, Apply apply_adjoint)
    : domain_(domain), codomain_(codomain), apply_(std::move(apply)),
      adjoint_(std::move(apply_adjoint)) {
    if (!apply_ || !adjoint_) throw ConfigError("LinearOperator: missing apply closure");
}

Vector LinearOperator::apply(const Vector& x) const {
    require_same_space(x.space(), domain_, "LinearOperator::apply");
    Vector y = apply_(x);
    require_same_space(y.space(), codomain_, "LinearOperator::apply result");
    return y;
}

Vector LinearOperator::apply_adjoint(const Vector& y) const {
    require_same_space(y.space(), codomain_, "LinearOperator::apply_adjoint");
    Vector x = adjoint_(y);
    require_same_space(x.space(), domain_, "LinearOperator::apply_adjoint result");
    return x;
}

LinearOperator LinearOperator::identity(Space s) {
    auto id = [](const Vector& x) { return x; };
    return LinearOperator(s, s, id, id);
}

LinearOperator LinearOperator::scaled_identity(Space s, double a) {
    auto f = [a](const Vector& x) { return a * x; };
    return LinearOperator(s, s, f, f);
}

LinearOperator LinearOperator::diagonal(Space s, std::vector<double> d) {
    if (d.size() != static_cast<std::size_t>(s.dim)) {
        throw ShapeError("diagonal operator: wrong number of entries");
    }
    auto f = [d](const Vector& x) {
        Vector y(x.space());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = d[i] * x[i];
        return y;
    };
    return LinearOperator(s, s, f, f);
}

LinearOperator LinearOperator::dense(Space domain, Space codomain, std::vector<double> row_major) {
    const auto rows = static_cast<std::size_t>(codomain.dim);
    const auto cols = static_cast<std::size_t>(domain.dim);
    if (row_major.size() != rows * cols) {
        throw ShapeError("dense operator: expected " + std::to_string(rows * cols) +
                         " entries, got " + std::to_string(row_major.size()));
    }
    auto data = std::make_shared<std::vector<double>>(std::move(row_major));
    auto fwd = [data, rows, cols, codomain](const Vector& x) {
        Vector y(codomain);
        kernels::gemv(data->data(), rows, cols, x.data(), y.data());
        return y;
    };
    auto adj = [data, rows, cols, domain](const Vector& y) {
        Vector x(domain);
        kernels::gemv_t(data->data(), rows, cols, y.data(), x.data());
        return x;
    };
    return LinearOperator(domain, codomain, fwd, adj);
}

double operator_norm(const LinearOperator& op, double tol, int max_iter) {
    if (tol <= 0.0) throw ConfigError("operator_norm: tol must be positive");
    // Power iteration on L*L, restarted from a different seeded direction if a
    // start lands in the kernel.
    double best = 0.0;
    for (std::uint64_t restart = 0; restart < 3; ++restart) {
        Rng rng(0x9e3779b97f4a7c15ull + restart);
        Vector v = unit_vector(rng, op.domain());
        double lambda_prev = -1.0;
        for (int it = 0; it < max_iter; ++it) {
            Vector w = op.apply_adjoint(op.apply(v));
            double lambda = inner(v, w);
            double wn = norm(w);
            if (wn == 0.0) break;  // v in the kernel of L*L; restart
            w *= 1.0 / wn;
            v = w;
            if (lambda_prev >= 0.0 &&
                std::abs(lambda - lambda_prev) <= tol * std::max(lambda, 1e-300)) {
                return std::sqrt(std::max(lambda, 0.0)) * 1.01;
            }
            lambda_prev = lambda;
            best = std::max(best, std::sqrt(std::max(lambda, 0.0)));
        }
        if (lambda_prev < 0.0) continue;  // immediate kernel hit; try another start
        throw EstimationError("operator_norm: power iteration did not converge", best * 1.01);
    }
    // Every start was annihilated: the operator is (numerically) zero.
    return 0.0;
}

double adjoint_defect(const LinearOperator& op, int samples, std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        Vector x = normal_vector(rng, op.domain());
        Vector y = normal_vector(rng, op.codomain());
        double lhs = inner(op.apply(x), y);
        double rhs = inner(x, op.apply_adjoint(y));
        double scale = 1.0 + norm(x) * norm(y);
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return worst;
}

double linearity_defect(const LinearOperator& op, int samples, std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        Vector x = normal_vector(rng, op.domain());
        Vector y = normal_vector(rng, op.domain());
        double a = rng.uniform(-2.0, 2.0);
        Vector lhs = op.apply(a * x + y);
        Vector rhs = a * op.apply(x) + op.apply(y);
        double scale = 1.0 + norm(lhs) + norm(rhs);
        worst = std::max(worst, norm(lhs - rhs) / scale);
    }
    return worst;
}

Vector normal_vector(Rng& rng, Space s) {
    Vector v(s);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = rng.normal();
    return v;
}

Vector uniform_vector(Rng& rng, Space s, double lo, double hi) {
    Vector v(s);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = rng.uniform(lo, hi);
    return v;
}

Vector unit_vector(Rng& rng, Space s) {
    Vector v = normal_vector(rng, s);
    double n = norm(v);
    while (n < 1e-12) {
        v = normal_vector(rng, s);
        n = norm(v);
    }
    v *= 1.0 / n;
    return v;
}

}  // namespace pdsplit
