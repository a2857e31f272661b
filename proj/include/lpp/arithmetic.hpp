#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace lpp {

struct PrimePower {
    std::uint64_t p;
    int e;
};

// Sieve-backed table of smallest prime factors for 1..limit plus the list of
// primes <= limit. Immutable after construction, safe for concurrent reads.
class PrimeTable {
public:
    static constexpr std::size_t kDefaultSegment = std::size_t{1} << 20;
    static constexpr std::uint64_t kDefaultMemoryBudget = std::uint64_t{6} << 30;

    // Segmented smallest-prime-factor sieve. The table itself needs 4 bytes
    // per entry; transient sieving state is O(sqrt(limit) + segment).
    static PrimeTable sieve(std::uint64_t limit,
                            std::size_t segment = kDefaultSegment,
                            std::uint64_t memory_budget_bytes = kDefaultMemoryBudget);

    std::uint64_t limit() const { return limit_; }
    const std::vector<std::uint64_t>& primes() const { return primes_; }

    // Least prime dividing n (n >= 2); 1 for n = 1.
    std::uint32_t smallest_prime_factor(std::uint64_t n) const;
    bool is_prime(std::uint64_t n) const;
    std::vector<PrimePower> factor(std::uint64_t n) const;

    double von_mangoldt(std::uint64_t n) const;  // log p if n = p^k, else 0
    double lambda_prime(std::uint64_t n) const;  // log n if n prime, else 0
    int moebius(std::uint64_t n) const;
    std::uint64_t euler_phi(std::uint64_t n) const;
    bool is_squarefree(std::uint64_t n) const;

    // Flat on-disk cache: magic "SPF1", little-endian u64 limit, then
    // little-endian u32 spf[n] for n = 1..limit.
    void save_spf_cache(const std::string& path) const;
    static std::optional<PrimeTable> load_spf_cache(const std::string& path,
                                                    std::uint64_t min_limit);

private:
    PrimeTable() = default;
    void rebuild_prime_list();

    std::uint64_t limit_ = 0;
    std::vector<std::uint32_t> spf_;  // index 0 unused; spf_[1] = 1
    std::vector<std::uint64_t> primes_;
};

// q/phi(q) if gcd(n, q) = 1, else 0, as an exact rational. q is factored by
// trial division, so no table is needed.
mpq_class lambda_q(std::uint64_t q, const mpz_class& n);

// Deterministic Miller-Rabin, valid for all 64-bit n. Independent of tables.
bool is_prime_u64(std::uint64_t n);

// prod_{p <= w} p.
mpz_class primorial(std::uint64_t w);

// Factor a u64 by trial division.
std::vector<PrimePower> factor_u64(std::uint64_t n);
std::uint64_t euler_phi_u64(std::uint64_t n);

}  // namespace lpp
