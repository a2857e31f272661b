#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <gmpxx.h>

#include "lpp/forms.hpp"

namespace lpp {

// normal . x <= offset
struct Halfspace {
    std::vector<mpq_class> normal;
    mpq_class offset;
};

// H-representation polytope inside the box [-N, N]^d. The box constraints are
// implicitly part of the body; feasibility is not required (empty bodies have
// volume 0).
class ConvexBody {
public:
    ConvexBody(std::size_t d, long long bound, std::vector<Halfspace> halfspaces = {});

    std::size_t d() const { return d_; }
    long long bound() const { return bound_; }
    const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }

    // halfspaces plus the box rows +-x_j <= N
    std::vector<Halfspace> all_constraints() const;

    bool contains(const std::vector<mpq_class>& x) const;
    bool contains_int(const std::vector<mpz_class>& x) const;

    // {x + shift : x in K}; the old box travels along as explicit halfspaces
    // and the bound grows to keep the promise K subset [-N', N']^d.
    ConvexBody translated(const std::vector<mpz_class>& shift) const;

    // body scaled by the integer factor s >= 1
    ConvexBody scaled(std::uint64_t s) const;

private:
    std::size_t d_;
    long long bound_;
    std::vector<Halfspace> halfspaces_;
};

// All integer points of the body, via exact Fourier-Motzkin projections:
// each coordinate interval is computed from the projected constraint set, so
// the stream is exactly Z^d cap K with no postfiltering.
std::vector<std::vector<mpz_class>> lattice_points(const ConvexBody& body);
void for_each_lattice_point(const ConvexBody& body,
                            const std::function<void(const std::vector<std::int64_t>&)>& fn);
std::uint64_t lattice_point_count(const ConvexBody& body);

struct VolumeEstimate {
    double value = 0.0;
    double error_bound = 0.0;
};

// Counts points of (1/s)Z^d in K divided by s^d. Exact for d = 1. The error
// bound counts unit cells of the scaled body that can straddle the boundary.
VolumeEstimate volume(const ConvexBody& body, std::uint64_t resolution);

// Vol(K cap Psi^{-1}(R_+^t)): volume after appending psi_i(x) >= 0 cuts.
VolumeEstimate beta_infinity(const ConvexBody& body, const AffineSystem& sys,
                             std::uint64_t resolution = 128);
ConvexBody positivity_cut(const ConvexBody& body, const AffineSystem& sys);

struct BoxDecomposition {
    long long m = 1;
    std::vector<std::vector<long long>> inner;     // grid corners with box subset K
    std::vector<std::vector<long long>> boundary;  // boxes meeting K but not inner
};

// Classifies the boxes of the grid (MZ)^d meeting [-N, N]^d. Inner boxes have
// all 2^d vertices in K (hence lie in K by convexity); boundary boxes meet K
// without being inner. For lattice-point bookkeeping the cells are the
// half-open c + (0, M]^d, which partition Z^d.
BoxDecomposition box_decomposition(const ConvexBody& body, long long M,
                                   std::uint64_t box_budget = 10'000'000);

namespace detail {

// Exact elimination of the last variable; keeps one tightest constraint per
// normal direction. A zero normal with negative offset marks infeasibility.
std::vector<Halfspace> fourier_motzkin_eliminate_last(const std::vector<Halfspace>& cs,
                                                      std::size_t k);

// projections[k] = constraints on the first k variables, k = 1..d
std::vector<std::vector<Halfspace>> projection_chain(const ConvexBody& body);

struct IntInterval {
    bool empty = true;
    std::int64_t lo = 0;
    std::int64_t hi = -1;
};

// Integer range of variable k given the first k-1 coordinates.
IntInterval next_var_interval(const std::vector<Halfspace>& proj_k,
                              const std::vector<std::int64_t>& prefix);

// int64 view of one projection level; falls back to the rational path when a
// constraint does not fit
struct FastRow {
    std::vector<std::int64_t> normal;
    std::int64_t num = 0;  // offset = num / den, den > 0
    std::int64_t den = 1;
};
struct FastLevel {
    bool usable = false;
    std::vector<FastRow> rows;
};

struct CompiledChain {
    std::vector<std::vector<Halfspace>> generic;  // index 1..d
    std::vector<FastLevel> fast;
};

CompiledChain compile_chain(const ConvexBody& body);
IntInterval chain_interval(const CompiledChain& chain, std::size_t level,
                           const std::vector<std::int64_t>& prefix);

bool feasible(std::vector<Halfspace> cs, std::size_t k);

}  // namespace detail

}  // namespace lpp
