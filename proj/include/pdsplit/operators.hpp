#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "pdsplit/linalg.hpp"

// Monotone-operator calculus: set-valued operators accessed through their
// resolvents, single-valued Lipschitz monotone operators evaluated forward,
// and the derived constructions (inverse resolvent, Yosida approximation,
// parallel-sum pairing) built on them.

namespace pdsplit {

using ResolventFn = std::function<Vector(double, const Vector&)>;

/// A maximally monotone operator B exposed through y -> J_{gamma B}(y).
/// Optionally carries a directly supplied resolvent of the inverse,
/// y -> J_{gamma B^{-1}}(y); otherwise that map is derived from the identity
/// J_{gamma B^{-1}}(y) = y - gamma J_{B/gamma}(y/gamma).
class ResolventOperator {
public:
    ResolventOperator(Space space, ResolventFn resolvent)
        : ResolventOperator(space, std::move(resolvent), nullptr) {}
    ResolventOperator(Space space, ResolventFn resolvent, ResolventFn inverse_resolvent);

    Space space() const { return space_; }
    Vector resolvent(double gamma, const Vector& y) const;
    bool has_direct_inverse_resolvent() const { return static_cast<bool>(inverse_resolvent_); }
    /// Direct closure when supplied, derived identity otherwise.
    Vector inverse_resolvent(double gamma, const Vector& y) const;

private:
    Space space_;
    ResolventFn resolvent_;
    ResolventFn inverse_resolvent_;
};

/// A monotone operator evaluated forward, with a declared Lipschitz constant.
/// A constant of 0 is accepted (constant operators, e.g. the zero map).
class LipschitzOperator {
public:
    using Apply = std::function<Vector(const Vector&)>;

    LipschitzOperator(Space space, Apply apply, double lipschitz_constant);

    Space space() const { return space_; }
    double lipschitz_constant() const { return lipschitz_; }
    Vector apply(const Vector& x) const;

private:
    Space space_;
    Apply apply_;
    double lipschitz_;
};

/// J_{gamma B^{-1}}(y) = y - gamma J_{B/gamma}(y/gamma), always via the
/// identity (never the direct closure); used to cross-check supplied ones.
Vector resolvent_of_inverse(const ResolventOperator& B, double gamma, const Vector& y);

/// Yosida approximation of index rho: (y - J_{rho B}(y)) / rho.
Vector yosida(const ResolventOperator& B, double rho, const Vector& y);

/// The (B, D^{-1}) pair representing B parallel-sum D. The solver never
/// evaluates the parallel sum itself; it only needs J_{gamma B^{-1}} and
/// forward evaluations of D^{-1}.
struct ParallelSumPair {
    ResolventOperator b;
    LipschitzOperator d_inv;
};

ParallelSumPair parallel_sum_resolvent_pair(ResolventOperator B, LipschitzOperator D_inv);

struct MonotonicityReport {
    double min_inner = 0.0;   // min <x-y, Tx-Ty> over samples
    double max_ratio = 0.0;   // max |Tx-Ty| / |x-y| over samples
    bool monotone_ok = true;  // min_inner >= -1e-9
    bool lipschitz_ok = true; // max_ratio <= constant + 1e-9
    int samples = 0;
};

MonotonicityReport check_monotone(const LipschitzOperator& T, int samples, std::uint64_t seed);

/// Firm-nonexpansiveness defect of a resolvent map over sampled pairs:
/// max over samples of |Jy - Jy'|^2 - <y - y', Jy - Jy'>.
double firm_nonexpansiveness_defect(const ResolventOperator& B, int samples, std::uint64_t seed);

// Basic operator factories.
ResolventOperator zero_map_operator(Space s);      // B = {0}:   J_{gamma B} = Id
ResolventOperator identity_map_operator(Space s);  // B = Id:    J_{gamma B} = y/(1+gamma)
LipschitzOperator zero_lipschitz(Space s);
LipschitzOperator scaled_identity_lipschitz(Space s, double a);  // a >= 0

}  // namespace pdsplit
