#include "lpp/arithmetic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "lpp/errors.hpp"

namespace lpp {

namespace {

std::uint64_t isqrt_u64(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

}  // namespace

PrimeTable PrimeTable::sieve(std::uint64_t limit, std::size_t segment,
                             std::uint64_t memory_budget_bytes) {
    if (limit < 2) throw ArgumentError("sieve: limit must be at least 2");
    if (limit > std::uint64_t{0xFFFFFFFF})
        throw ResourceError("sieve: limit exceeds the 32-bit spf entry range");
    const std::uint64_t bytes = (limit + 1) * sizeof(std::uint32_t);
    if (bytes > memory_budget_bytes)
        throw ResourceError("sieve: limit " + std::to_string(limit) + " needs " +
                            std::to_string(bytes) + " bytes, budget is " +
                            std::to_string(memory_budget_bytes));
    if (segment == 0) segment = kDefaultSegment;

    PrimeTable t;
    t.limit_ = limit;
    t.spf_.assign(limit + 1, 0);
    t.spf_[1] = 1;

    // Base primes up to sqrt(limit) by a plain sieve.
    const std::uint64_t root = isqrt_u64(limit);
    std::vector<bool> composite(root + 1, false);
    std::vector<std::uint32_t> base;
    for (std::uint64_t p = 2; p <= root; ++p) {
        if (composite[p]) continue;
        base.push_back(static_cast<std::uint32_t>(p));
        for (std::uint64_t m = p * p; m <= root; m += p) composite[m] = true;
    }

    // Mark composites segment by segment, ascending p, so the first mark wins.
    for (std::uint64_t lo = 2; lo <= limit; lo += segment) {
        const std::uint64_t hi = std::min(limit, lo + segment - 1);
        for (std::uint32_t p : base) {
            const std::uint64_t p2 = std::uint64_t{p} * p;
            if (p2 > hi) break;
            std::uint64_t start = std::max(p2, ((lo + p - 1) / p) * p);
            for (std::uint64_t m = start; m <= hi; m += p)
                if (t.spf_[m] == 0) t.spf_[m] = p;
        }
    }
    t.rebuild_prime_list();
    return t;
}

void PrimeTable::rebuild_prime_list() {
    primes_.clear();
    for (std::uint64_t n = 2; n <= limit_; ++n) {
        if (spf_[n] == 0) spf_[n] = static_cast<std::uint32_t>(n);
        if (spf_[n] == n) primes_.push_back(n);
    }
}

std::uint32_t PrimeTable::smallest_prime_factor(std::uint64_t n) const {
    if (n == 0 || n > limit_)
        throw RangeError("smallest_prime_factor: n = " + std::to_string(n) +
                         " outside table limit " + std::to_string(limit_));
    return spf_[n];
}

bool PrimeTable::is_prime(std::uint64_t n) const {
    return n >= 2 && smallest_prime_factor(n) == n;
}

std::vector<PrimePower> PrimeTable::factor(std::uint64_t n) const {
    if (n == 0 || n > limit_)
        throw RangeError("factor: n = " + std::to_string(n) + " outside table limit " +
                         std::to_string(limit_));
    std::vector<PrimePower> out;
    while (n > 1) {
        const std::uint32_t p = spf_[n];
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.push_back({p, e});
    }
    return out;
}

double PrimeTable::von_mangoldt(std::uint64_t n) const {
    if (n == 0 || n > limit_)
        throw RangeError("von_mangoldt: n outside table limit");
    if (n == 1) return 0.0;
    const std::uint32_t p = spf_[n];
    while (n % p == 0) n /= p;
    return n == 1 ? std::log(static_cast<double>(p)) : 0.0;
}

double PrimeTable::lambda_prime(std::uint64_t n) const {
    if (n == 0 || n > limit_)
        throw RangeError("lambda_prime: n outside table limit");
    return (n >= 2 && spf_[n] == n) ? std::log(static_cast<double>(n)) : 0.0;
}

int PrimeTable::moebius(std::uint64_t n) const {
    if (n == 0 || n > limit_) throw RangeError("moebius: n outside table limit");
    int k = 0;
    while (n > 1) {
        const std::uint32_t p = spf_[n];
        n /= p;
        if (n % p == 0) return 0;
        ++k;
    }
    return (k % 2 == 0) ? 1 : -1;
}

std::uint64_t PrimeTable::euler_phi(std::uint64_t n) const {
    if (n == 0 || n > limit_) throw RangeError("euler_phi: n outside table limit");
    std::uint64_t phi = 1;
    while (n > 1) {
        const std::uint32_t p = spf_[n];
        std::uint64_t pk = 1;
        while (n % p == 0) {
            n /= p;
            pk *= p;
        }
        phi *= pk - pk / p;
    }
    return phi;
}

bool PrimeTable::is_squarefree(std::uint64_t n) const { return moebius(n) != 0; }

void PrimeTable::save_spf_cache(const std::string& path) const {
    static_assert(std::endian::native == std::endian::little,
                  "spf cache writer assumes a little-endian host");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ResourceError("save_spf_cache: cannot open " + path);
    f.write("SPF1", 4);
    const std::uint64_t lim = limit_;
    f.write(reinterpret_cast<const char*>(&lim), sizeof lim);
    f.write(reinterpret_cast<const char*>(spf_.data() + 1),
            static_cast<std::streamsize>(limit_ * sizeof(std::uint32_t)));
    if (!f) throw ResourceError("save_spf_cache: write failed for " + path);
}

std::optional<PrimeTable> PrimeTable::load_spf_cache(const std::string& path,
                                                     std::uint64_t min_limit) {
    static_assert(std::endian::native == std::endian::little,
                  "spf cache reader assumes a little-endian host");
    std::ifstream f(path, std::ios::binary);
    if (!f) return std::nullopt;
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, "SPF1", 4) != 0) return std::nullopt;
    std::uint64_t lim = 0;
    f.read(reinterpret_cast<char*>(&lim), sizeof lim);
    if (!f || lim < min_limit || lim > std::uint64_t{0xFFFFFFFF}) return std::nullopt;
    PrimeTable t;
    t.limit_ = lim;
    t.spf_.assign(lim + 1, 0);
    t.spf_[1] = 1;
    f.read(reinterpret_cast<char*>(t.spf_.data() + 1),
           static_cast<std::streamsize>(lim * sizeof(std::uint32_t)));
    if (!f) return std::nullopt;
    t.primes_.clear();
    for (std::uint64_t n = 2; n <= lim; ++n)
        if (t.spf_[n] == n) t.primes_.push_back(n);
    return t;
}

std::vector<PrimePower> factor_u64(std::uint64_t n) {
    std::vector<PrimePower> out;
    if (n <= 1) return out;
    for (std::uint64_t p = 2; p * p <= n; p += (p == 2) ? 1 : 2) {
        if (n % p) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.push_back({p, e});
    }
    if (n > 1) out.push_back({n, 1});
    return out;
}

std::uint64_t euler_phi_u64(std::uint64_t n) {
    std::uint64_t phi = n;
    for (const auto& [p, e] : factor_u64(n)) phi -= phi / p;
    return phi;
}

mpq_class lambda_q(std::uint64_t q, const mpz_class& n) {
    if (q == 0) throw ArgumentError("lambda_q: q must be positive");
    if (q == 1) return mpq_class(1);
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), mpz_class(q).get_mpz_t());
    if (g != 1) return mpq_class(0);
    mpq_class r(q, euler_phi_u64(q));
    r.canonicalize();
    return r;
}

namespace {

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

mpz_class primorial(std::uint64_t w) {
    mpz_class r = 1;
    if (w < 2) return r;
    std::vector<bool> composite(w + 1, false);
    for (std::uint64_t p = 2; p <= w; ++p) {
        if (composite[p]) continue;
        r *= static_cast<unsigned long>(p);
        for (std::uint64_t m = p * p; m <= w; m += p) composite[m] = true;
    }
    return r;
}

}  // namespace lpp
