#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <vector>

#include "pdsplit/errors.hpp"
#include "pdsplit/rng.hpp"

// Finite-dimensional real Hilbert-space primitives: vectors, block vectors
// over product spaces, linear operators with adjoints, and operator-norm
// estimation by power iteration.

namespace pdsplit {

/// A real coordinate space, identified by its dimension.
struct Space {
    explicit Space(int d) : dim(d) {
        if (d < 1) throw ShapeError("Space dimension must be >= 1");
    }
    int dim;
    friend bool operator==(Space a, Space b) { return a.dim == b.dim; }
    friend bool operator!=(Space a, Space b) { return a.dim != b.dim; }
};

class Vector {
public:
    /// Zero vector of the given space.
    explicit Vector(Space s) : space_(s), e_(static_cast<std::size_t>(s.dim), 0.0) {}

    /// From user-provided entries; validates length and finiteness.
    Vector(Space s, std::vector<double> entries);
    Vector(Space s, std::initializer_list<double> entries)
        : Vector(s, std::vector<double>(entries)) {}

    Space space() const { return space_; }
    int dim() const { return space_.dim; }
    std::size_t size() const { return e_.size(); }

    double& operator[](std::size_t i) { return e_[i]; }
    double operator[](std::size_t i) const { return e_[i]; }
    double* data() { return e_.data(); }
    const double* data() const { return e_.data(); }
    const std::vector<double>& entries() const { return e_; }

    Vector& operator+=(const Vector& o);
    Vector& operator-=(const Vector& o);
    Vector& operator*=(double a);

private:
    Space space_;
    std::vector<double> e_;
};

Vector operator+(Vector a, const Vector& b);
Vector operator-(Vector a, const Vector& b);
Vector operator*(double a, Vector v);
Vector operator-(Vector v);

/// y += alpha * x
void axpy_inplace(double alpha, const Vector& x, Vector& y);

double inner(const Vector& u, const Vector& v);
double norm(const Vector& v);
bool all_finite(const Vector& v);

/// Element of the product space H (+) G_1 (+) ... (+) G_m. Block 0 lives in H.
class BlockVector {
public:
    BlockVector() = default;
    explicit BlockVector(std::vector<Vector> blocks) : blocks_(std::move(blocks)) {}

    std::size_t block_count() const { return blocks_.size(); }
    Vector& block(std::size_t i) { return blocks_[i]; }
    const Vector& block(std::size_t i) const { return blocks_[i]; }
    std::vector<Vector>& blocks() { return blocks_; }
    const std::vector<Vector>& blocks() const { return blocks_; }

    bool same_structure(const BlockVector& o) const;

    BlockVector& operator+=(const BlockVector& o);
    BlockVector& operator-=(const BlockVector& o);
    BlockVector& operator*=(double a);

private:
    std::vector<Vector> blocks_;
};

BlockVector operator+(BlockVector a, const BlockVector& b);
BlockVector operator-(BlockVector a, const BlockVector& b);
BlockVector operator*(double a, BlockVector v);

/// Sum of per-block inner products, accumulated in block order.
double block_inner(const BlockVector& u, const BlockVector& v);
double block_norm(const BlockVector& v);
bool all_finite(const BlockVector& v);

/// y += alpha * x, blockwise.
void axpy_inplace(double alpha, const BlockVector& x, BlockVector& y);

/// A bounded linear map together with its adjoint.
class LinearOperator {
public:
    using Apply = std::function<Vector(const Vector&)>;

    LinearOperator(Space domain, Space codomain, Apply apply, Apply apply_adjoint);

    Space domain() const { return domain_; }
    Space codomain() const { return codomain_; }

    Vector apply(const Vector& x) const;
    Vector apply_adjoint(const Vector& y) const;

    static LinearOperator identity(Space s);
    static LinearOperator scaled_identity(Space s, double a);
    static LinearOperator diagonal(Space s, std::vector<double> d);
    /// Dense row-major matrix (codomain.dim x domain.dim).
    static LinearOperator dense(Space domain, Space codomain, std::vector<double> row_major);

private:
    Space domain_;
    Space codomain_;
    Apply apply_;
    Apply adjoint_;
};

/// Largest-singular-value estimate by power iteration on L*L, multiplied by a
/// 1.01 safety factor so the estimate upper-bounds the true norm. Throws
/// EstimationError (carrying the best iterate) on non-convergence.
double operator_norm(const LinearOperator& op, double tol = 1e-10, int max_iter = 5000);

/// Max adjoint defect |<Lx,y> - <x,L*y>| / (1 + |x||y|) over sampled pairs.
double adjoint_defect(const LinearOperator& op, int samples, std::uint64_t seed);

/// Max additivity/homogeneity defect over sampled pairs, relative scale.
double linearity_defect(const LinearOperator& op, int samples, std::uint64_t seed);

// Seeded sampling helpers used throughout the property tests.
Vector normal_vector(Rng& rng, Space s);
Vector uniform_vector(Rng& rng, Space s, double lo, double hi);
Vector unit_vector(Rng& rng, Space s);

}  // namespace pdsplit
