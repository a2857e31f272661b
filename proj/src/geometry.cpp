#include "lpp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "lpp/errors.hpp"

namespace lpp {

ConvexBody::ConvexBody(std::size_t d, long long bound, std::vector<Halfspace> halfspaces)
    : d_(d), bound_(bound), halfspaces_(std::move(halfspaces)) {
    if (d_ == 0) throw ArgumentError("ConvexBody: dimension must be positive");
    if (bound_ < 1) throw ArgumentError("ConvexBody: bound must be positive");
    for (const auto& h : halfspaces_)
        if (h.normal.size() != d_) throw ArgumentError("ConvexBody: halfspace dimension mismatch");
}

std::vector<Halfspace> ConvexBody::all_constraints() const {
    std::vector<Halfspace> cs = halfspaces_;
    for (std::size_t j = 0; j < d_; ++j) {
        Halfspace up{std::vector<mpq_class>(d_, 0), mpq_class(static_cast<long>(bound_))};
        up.normal[j] = 1;
        Halfspace down{std::vector<mpq_class>(d_, 0), mpq_class(static_cast<long>(bound_))};
        down.normal[j] = -1;
        cs.push_back(std::move(up));
        cs.push_back(std::move(down));
    }
    return cs;
}

bool ConvexBody::contains(const std::vector<mpq_class>& x) const {
    if (x.size() != d_) throw ArgumentError("contains: point dimension mismatch");
    for (std::size_t j = 0; j < d_; ++j)
        if (x[j] > static_cast<long>(bound_) || x[j] < -mpq_class(static_cast<long>(bound_))) return false;
    for (const auto& h : halfspaces_) {
        mpq_class dot = 0;
        for (std::size_t j = 0; j < d_; ++j) dot += h.normal[j] * x[j];
        if (dot > h.offset) return false;
    }
    return true;
}

bool ConvexBody::contains_int(const std::vector<mpz_class>& x) const {
    std::vector<mpq_class> q(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) q[j] = x[j];
    return contains(q);
}

ConvexBody ConvexBody::translated(const std::vector<mpz_class>& shift) const {
    if (shift.size() != d_) throw ArgumentError("translated: shift dimension mismatch");
    std::vector<Halfspace> hs;
    hs.reserve(halfspaces_.size() + 2 * d_);
    for (const auto& h : halfspaces_) {
        Halfspace moved = h;
        for (std::size_t j = 0; j < d_; ++j) moved.offset += h.normal[j] * mpq_class(shift[j]);
        hs.push_back(std::move(moved));
    }
    long long grow = 0;
    for (std::size_t j = 0; j < d_; ++j) {
        // old box |x_j| <= N becomes explicit |x_j - shift_j| <= N
        Halfspace up{std::vector<mpq_class>(d_, 0), mpq_class(static_cast<long>(bound_)) + mpq_class(shift[j])};
        up.normal[j] = 1;
        Halfspace down{std::vector<mpq_class>(d_, 0), mpq_class(static_cast<long>(bound_)) - mpq_class(shift[j])};
        down.normal[j] = -1;
        hs.push_back(std::move(up));
        hs.push_back(std::move(down));
        const mpz_class a = abs(shift[j]);
        if (!a.fits_slong_p()) throw ResourceError("translated: shift too large");
        grow = std::max(grow, static_cast<long long>(a.get_si()));
    }
    return ConvexBody(d_, bound_ + grow, std::move(hs));
}

ConvexBody ConvexBody::scaled(std::uint64_t s) const {
    if (s == 0) throw ArgumentError("scaled: factor must be positive");
    const auto ss = static_cast<long long>(s);
    if (bound_ > std::numeric_limits<long long>::max() / ss)
        throw ResourceError("scaled: bound overflow");
    std::vector<Halfspace> hs = halfspaces_;
    for (auto& h : hs) h.offset *= static_cast<long>(ss);
    return ConvexBody(d_, bound_ * ss, std::move(hs));
}

namespace detail {

namespace {

// Scales so the normal is a primitive integer vector; offsets scale along.
Halfspace canonical(const Halfspace& h, std::size_t k) {
    Halfspace out{std::vector<mpq_class>(h.normal.begin(), h.normal.begin() + k), h.offset};
    mpz_class lcm = 1;
    for (const auto& a : out.normal)
        mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), a.get_den().get_mpz_t());
    mpz_class gcd = 0;
    for (const auto& a : out.normal) {
        mpz_class scaled = a.get_num() * (lcm / a.get_den());
        mpz_gcd(gcd.get_mpz_t(), gcd.get_mpz_t(), scaled.get_mpz_t());
    }
    if (gcd == 0) {
        for (auto& a : out.normal) a = 0;
        return out;  // zero normal; only the offset sign matters
    }
    const mpq_class scale(lcm, gcd);
    for (auto& a : out.normal) {
        a *= scale;
        a.canonicalize();
    }
    out.offset *= scale;
    out.offset.canonicalize();
    return out;
}

std::string normal_key(const std::vector<mpq_class>& n) {
    std::string key;
    for (const auto& a : n) {
        key += a.get_str();
        key += ';';
    }
    return key;
}

// Keep only the tightest constraint per normal direction.
std::vector<Halfspace> dedupe(std::vector<Halfspace> cs, std::size_t k) {
    std::map<std::string, Halfspace> best;
    for (auto& h : cs) {
        Halfspace c = canonical(h, k);
        const std::string key = normal_key(c.normal);
        auto it = best.find(key);
        if (it == best.end())
            best.emplace(key, std::move(c));
        else if (c.offset < it->second.offset)
            it->second.offset = c.offset;
    }
    std::vector<Halfspace> out;
    out.reserve(best.size());
    for (auto& [key, h] : best) out.push_back(std::move(h));
    return out;
}

}  // namespace

std::vector<Halfspace> fourier_motzkin_eliminate_last(const std::vector<Halfspace>& cs,
                                                      std::size_t k) {
    if (k == 0) throw ArgumentError("fourier_motzkin: no variable to eliminate");
    std::vector<Halfspace> carried, pos, neg;
    for (const auto& h : cs) {
        const mpq_class& a = h.normal[k - 1];
        if (a == 0) {
            Halfspace c{std::vector<mpq_class>(h.normal.begin(), h.normal.begin() + (k - 1)),
                        h.offset};
            carried.push_back(std::move(c));
        } else if (a > 0) {
            pos.push_back(h);
        } else {
            neg.push_back(h);
        }
    }
    for (const auto& hp : pos)
        for (const auto& hn : neg) {
            const mpq_class ap = hp.normal[k - 1];
            const mpq_class an = -hn.normal[k - 1];
            Halfspace c{std::vector<mpq_class>(k - 1), an * hp.offset + ap * hn.offset};
            for (std::size_t j = 0; j + 1 < k; ++j)
                c.normal[j] = an * hp.normal[j] + ap * hn.normal[j];
            carried.push_back(std::move(c));
        }
    return dedupe(std::move(carried), k - 1);
}

std::vector<std::vector<Halfspace>> projection_chain(const ConvexBody& body) {
    const std::size_t d = body.d();
    std::vector<std::vector<Halfspace>> chain(d + 1);
    chain[d] = dedupe(body.all_constraints(), d);
    for (std::size_t k = d; k >= 2; --k)
        chain[k - 1] = fourier_motzkin_eliminate_last(chain[k], k);
    return chain;
}

struct RatInterval {
    bool empty = false;
    mpq_class lo, hi;
};

static RatInterval rational_interval(const std::vector<Halfspace>& proj_k,
                                     const std::vector<std::int64_t>& prefix) {
    const std::size_t k = prefix.size() + 1;
    RatInterval out;
    bool has_lo = false, has_hi = false;
    for (const auto& h : proj_k) {
        mpq_class rest = 0;
        for (std::size_t j = 0; j + 1 < k; ++j)
            if (h.normal[j] != 0) rest += h.normal[j] * static_cast<long>(prefix[j]);
        const mpq_class& a = h.normal[k - 1];
        if (a == 0) {
            if (rest > h.offset) {
                out.empty = true;
                return out;
            }
            continue;
        }
        mpq_class bound = (h.offset - rest) / a;
        if (a > 0) {
            if (!has_hi || bound < out.hi) out.hi = bound;
            has_hi = true;
        } else {
            if (!has_lo || bound > out.lo) out.lo = bound;
            has_lo = true;
        }
    }
    if (!has_lo || !has_hi)
        throw std::logic_error("rational_interval: box constraints must bound every variable");
    if (out.lo > out.hi) out.empty = true;
    return out;
}

IntInterval next_var_interval(const std::vector<Halfspace>& proj_k,
                              const std::vector<std::int64_t>& prefix) {
    IntInterval out;
    const RatInterval r = rational_interval(proj_k, prefix);
    if (r.empty) return out;
    mpz_class lo, hi;
    mpz_cdiv_q(lo.get_mpz_t(), r.lo.get_num().get_mpz_t(), r.lo.get_den().get_mpz_t());
    mpz_fdiv_q(hi.get_mpz_t(), r.hi.get_num().get_mpz_t(), r.hi.get_den().get_mpz_t());
    if (lo > hi) return out;
    if (!lo.fits_slong_p() || !hi.fits_slong_p())
        throw ResourceError("next_var_interval: coordinate range exceeds int64");
    out.empty = false;
    out.lo = lo.get_si();
    out.hi = hi.get_si();
    return out;
}

namespace {

std::int64_t floor_div_i128(__int128 p, __int128 q) {
    // q > 0
    __int128 r = p / q;
    if (p % q != 0 && p < 0) --r;
    return static_cast<std::int64_t>(r);
}

std::int64_t ceil_div_i128(__int128 p, __int128 q) {
    __int128 r = p / q;
    if (p % q != 0 && p > 0) ++r;
    return static_cast<std::int64_t>(r);
}

}  // namespace

CompiledChain compile_chain(const ConvexBody& body) {
    CompiledChain chain;
    chain.generic = projection_chain(body);
    chain.fast.resize(chain.generic.size());
    for (std::size_t k = 1; k < chain.generic.size(); ++k) {
        FastLevel& lvl = chain.fast[k];
        lvl.usable = true;
        for (const auto& h : chain.generic[k]) {
            FastRow row;
            row.normal.resize(h.normal.size());
            bool ok = true;
            for (std::size_t j = 0; j < h.normal.size(); ++j) {
                if (h.normal[j].get_den() != 1 || !h.normal[j].get_num().fits_slong_p()) {
                    ok = false;
                    break;
                }
                row.normal[j] = h.normal[j].get_num().get_si();
            }
            if (!ok || !h.offset.get_num().fits_slong_p() ||
                !h.offset.get_den().fits_slong_p()) {
                lvl.usable = false;
                lvl.rows.clear();
                break;
            }
            row.num = h.offset.get_num().get_si();
            row.den = h.offset.get_den().get_si();
            lvl.rows.push_back(std::move(row));
        }
    }
    return chain;
}

IntInterval chain_interval(const CompiledChain& chain, std::size_t level,
                           const std::vector<std::int64_t>& prefix) {
    if (!chain.fast[level].usable) return next_var_interval(chain.generic[level], prefix);
    IntInterval out;
    bool has_lo = false, has_hi = false;
    std::int64_t lo = 0, hi = 0;
    for (const auto& row : chain.fast[level].rows) {
        __int128 rest = 0;
        for (std::size_t j = 0; j + 1 < row.normal.size(); ++j)
            rest += static_cast<__int128>(row.normal[j]) * prefix[j];
        const std::int64_t a = row.normal.back();
        const __int128 p = static_cast<__int128>(row.num) - rest * row.den;
        if (a == 0) {
            if (p < 0) return out;  // rest > offset
            continue;
        }
        const __int128 q = static_cast<__int128>(row.den) * a;
        if (a > 0) {
            const std::int64_t b = floor_div_i128(p, q);
            if (!has_hi || b < hi) hi = b;
            has_hi = true;
        } else {
            const std::int64_t b = ceil_div_i128(-p, -q);
            if (!has_lo || b > lo) lo = b;
            has_lo = true;
        }
    }
    if (!has_lo || !has_hi)
        throw std::logic_error("chain_interval: box constraints must bound every variable");
    if (lo > hi) return out;
    out.empty = false;
    out.lo = lo;
    out.hi = hi;
    return out;
}

bool feasible(std::vector<Halfspace> cs, std::size_t k) {
    cs = dedupe(std::move(cs), k);
    for (std::size_t v = k; v >= 1; --v) {
        for (const auto& h : cs) {
            bool zero = true;
            for (const auto& a : h.normal)
                if (a != 0) {
                    zero = false;
                    break;
                }
            if (zero && h.offset < 0) return false;
        }
        cs = fourier_motzkin_eliminate_last(cs, v);
    }
    for (const auto& h : cs)
        if (h.offset < 0) return false;
    return true;
}

namespace {

void enumerate_rec(const CompiledChain& chain, std::size_t level,
                   std::size_t d, std::vector<std::int64_t>& prefix,
                   const std::function<void(const std::vector<std::int64_t>&)>& fn) {
    const IntInterval iv = chain_interval(chain, level, prefix);
    if (iv.empty) return;
    prefix.push_back(iv.lo);
    for (std::int64_t x = iv.lo; x <= iv.hi; ++x) {
        prefix.back() = x;
        if (level == d)
            fn(prefix);
        else
            enumerate_rec(chain, level + 1, d, prefix, fn);
    }
    prefix.pop_back();
}

std::uint64_t count_rec(const CompiledChain& chain, std::size_t level,
                        std::size_t d, std::vector<std::int64_t>& prefix) {
    const IntInterval iv = chain_interval(chain, level, prefix);
    if (iv.empty) return 0;
    if (level == d)
        return static_cast<std::uint64_t>(iv.hi - iv.lo + 1);
    std::uint64_t total = 0;
    prefix.push_back(iv.lo);
    for (std::int64_t x = iv.lo; x <= iv.hi; ++x) {
        prefix.back() = x;
        total += count_rec(chain, level + 1, d, prefix);
    }
    prefix.pop_back();
    return total;
}

}  // namespace

}  // namespace detail

void for_each_lattice_point(const ConvexBody& body,
                            const std::function<void(const std::vector<std::int64_t>&)>& fn) {
    const auto chain = detail::compile_chain(body);
    std::vector<std::int64_t> prefix;
    prefix.reserve(body.d());
    detail::enumerate_rec(chain, 1, body.d(), prefix, fn);
}

std::vector<std::vector<mpz_class>> lattice_points(const ConvexBody& body) {
    std::vector<std::vector<mpz_class>> out;
    for_each_lattice_point(body, [&](const std::vector<std::int64_t>& x) {
        std::vector<mpz_class> p(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) p[j] = static_cast<long>(x[j]);
        out.push_back(std::move(p));
    });
    return out;
}

std::uint64_t lattice_point_count(const ConvexBody& body) {
    const auto chain = detail::compile_chain(body);
    std::vector<std::int64_t> prefix;
    prefix.reserve(body.d());
    return detail::count_rec(chain, 1, body.d(), prefix);
}

namespace {

// offset adjustment so corners c count cells [c, c+1]^d subset/meeting the body
ConvexBody corner_body(const ConvexBody& scaled, bool expanded) {
    std::vector<Halfspace> hs;
    for (const auto& h : scaled.all_constraints()) {
        Halfspace c = h;
        mpq_class adj = 0;
        for (const auto& a : h.normal) {
            if (expanded)
                adj += std::min(mpq_class(0), a);
            else
                adj += std::max(mpq_class(0), a);
        }
        c.offset -= adj;
        hs.push_back(std::move(c));
    }
    return ConvexBody(scaled.d(), scaled.bound() + 1, std::move(hs));
}

}  // namespace

VolumeEstimate volume(const ConvexBody& body, std::uint64_t resolution) {
    if (resolution == 0) throw ArgumentError("volume: resolution must be positive");
    VolumeEstimate est;
    if (body.d() == 1) {
        const auto chain = detail::projection_chain(body);
        const auto iv = detail::rational_interval(chain[1], {});
        if (!iv.empty && iv.hi > iv.lo) est.value = mpq_class(iv.hi - iv.lo).get_d();
        est.error_bound = 0.0;  // exact in one dimension
        return est;
    }
    const double cells =
        std::pow(2.0 * static_cast<double>(resolution) * static_cast<double>(body.bound()) + 3.0,
                 static_cast<double>(body.d() - 1));
    if (cells > 2e9) throw ResourceError("volume: refinement grid too large, lower resolution");

    const ConvexBody fine = body.scaled(resolution);
    const double sd = std::pow(static_cast<double>(resolution), static_cast<double>(body.d()));
    est.value = static_cast<double>(lattice_point_count(fine)) / sd;
    const std::uint64_t meet = lattice_point_count(corner_body(fine, true));
    const std::uint64_t inside = lattice_point_count(corner_body(fine, false));
    est.error_bound = static_cast<double>(meet - inside) / sd;
    return est;
}

ConvexBody positivity_cut(const ConvexBody& body, const AffineSystem& sys) {
    if (sys.d() != body.d()) throw ArgumentError("positivity_cut: dimension mismatch");
    std::vector<Halfspace> hs = body.halfspaces();
    for (std::size_t i = 0; i < sys.t(); ++i) {
        Halfspace h{std::vector<mpq_class>(body.d()), mpq_class(sys.constant()[i])};
        for (std::size_t j = 0; j < body.d(); ++j) h.normal[j] = -mpq_class(sys.linear()(i, j));
        hs.push_back(std::move(h));
    }
    return ConvexBody(body.d(), body.bound(), std::move(hs));
}

VolumeEstimate beta_infinity(const ConvexBody& body, const AffineSystem& sys,
                             std::uint64_t resolution) {
    return volume(positivity_cut(body, sys), resolution);
}

BoxDecomposition box_decomposition(const ConvexBody& body, long long M,
                                   std::uint64_t box_budget) {
    if (M < 1) throw ArgumentError("box_decomposition: M must be positive");
    BoxDecomposition out;
    out.m = M;
    const long long kmax = body.bound() / M;
    const long long kmin = -kmax - 1;
    const double boxes = std::pow(static_cast<double>(kmax - kmin + 1),
                                  static_cast<double>(body.d()));
    if (boxes > static_cast<double>(box_budget))
        throw ResourceError("box_decomposition: grid box count exceeds budget");

    const std::size_t d = body.d();
    std::vector<long long> k(d, kmin);
    std::vector<mpz_class> vertex(d);
    const auto base_cs = body.all_constraints();
    for (;;) {
        std::vector<long long> corner(d);
        for (std::size_t j = 0; j < d; ++j) corner[j] = k[j] * M;

        bool inner = true;
        for (std::uint32_t mask = 0; mask < (1u << d) && inner; ++mask) {
            for (std::size_t j = 0; j < d; ++j)
                vertex[j] = static_cast<long>(corner[j] + ((mask >> j & 1) ? M : 0));
            if (!body.contains_int(vertex)) inner = false;
        }
        if (inner) {
            out.inner.push_back(corner);
        } else {
            // meets test: feasibility of K cap [corner, corner + M]^d
            std::vector<Halfspace> cs = base_cs;
            for (std::size_t j = 0; j < d; ++j) {
                Halfspace up{std::vector<mpq_class>(d, 0), mpq_class(static_cast<long>(corner[j] + M))};
                up.normal[j] = 1;
                Halfspace down{std::vector<mpq_class>(d, 0), mpq_class(static_cast<long>(-corner[j]))};
                down.normal[j] = -1;
                cs.push_back(std::move(up));
                cs.push_back(std::move(down));
            }
            if (detail::feasible(std::move(cs), d)) out.boundary.push_back(corner);
        }

        std::size_t j = 0;
        while (j < d && k[j] == kmax) {
            k[j] = kmin;
            ++j;
        }
        if (j == d) break;
        ++k[j];
    }
    return out;
}

}  // namespace lpp
