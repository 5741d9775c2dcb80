#ifndef ONEBIT_RNG_HPP
#define ONEBIT_RNG_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace onebit {

// splitmix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Hierarchical seed: a master seed plus a path of (label, index) steps.
///
/// The derived 64-bit key is a keyed mix over the whole path, so the stream
/// of a node depends only on (master, path) and never on how many siblings
/// were drawn before it. Trials therefore get identical randomness whether
/// they run on one worker or many.
class SeedTree {
public:
    struct Step {
        std::string label;
        std::uint64_t index = 0;
    };

    explicit SeedTree(std::uint64_t master_seed) : master_(master_seed), key_(mix64(master_seed ^ 0x6A09E667F3BCC909ULL)) {}

    [[nodiscard]] SeedTree child(std::string_view label, std::uint64_t index = 0) const {
        SeedTree c = *this;
        c.path_.push_back({std::string(label), index});
        std::uint64_t k = key_ ^ mix64(fnv1a(label) + 0x9E3779B97F4A7C15ULL);
        k = mix64(k);
        k ^= mix64(index ^ 0xD1B54A32D192ED03ULL);
        c.key_ = mix64(k + 0x9E3779B97F4A7C15ULL);
        return c;
    }

    [[nodiscard]] std::uint64_t master() const noexcept { return master_; }
    [[nodiscard]] std::uint64_t key() const noexcept { return key_; }
    [[nodiscard]] const std::vector<Step>& path() const noexcept { return path_; }

    /// e.g. "42:cell.3/trial.17"
    [[nodiscard]] std::string path_string() const {
        std::string out = std::to_string(master_) + ":";
        for (std::size_t i = 0; i < path_.size(); ++i) {
            if (i) out += '/';
            out += path_[i].label;
            out += '.';
            out += std::to_string(path_[i].index);
        }
        return out;
    }

private:
    std::uint64_t master_;
    std::uint64_t key_;
    std::vector<Step> path_;
};

/// xoshiro256** seeded from a SeedTree key through splitmix64.
class Engine {
public:
    using result_type = std::uint64_t;

    explicit Engine(std::uint64_t seed) noexcept {
        std::uint64_t sm = seed;
        for (auto& w : s_) {
            sm += 0x9E3779B97F4A7C15ULL;
            w = mix64(sm);
        }
    }
    explicit Engine(const SeedTree& seed) noexcept : Engine(seed.key()) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound) without modulo bias.
    std::uint64_t below(std::uint64_t bound) noexcept {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = (*this)();
            if (r >= threshold) return r % bound;
        }
    }

    /// Standard normal via the Marsaglia polar method (no cached spare).
    double normal() noexcept {
        for (;;) {
            const double u = 2.0 * uniform01() - 1.0;
            const double v = 2.0 * uniform01() - 1.0;
            const double r2 = u * u + v * v;
            if (r2 > 0.0 && r2 < 1.0) return u * std::sqrt(-2.0 * std::log(r2) / r2);
        }
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

enum class Family { gaussian, rademacher, uniform_pm, student_t };

inline std::string_view to_string(Family f) {
    switch (f) {
        case Family::gaussian: return "gaussian";
        case Family::rademacher: return "rademacher";
        case Family::uniform_pm: return "uniform_pm";
        case Family::student_t: return "student_t";
    }
    return "?";
}

inline Family family_from_string(std::string_view s) {
    if (s == "gaussian") return Family::gaussian;
    if (s == "rademacher") return Family::rademacher;
    if (s == "uniform_pm") return Family::uniform_pm;
    if (s == "student_t") return Family::student_t;
    throw std::invalid_argument("unknown distribution family '" + std::string(s) + "'");
}

/// Coordinate law `mean + scale * Z` where Z is centred with unit variance.
/// For student_t, Z is a t-variate with `df` degrees of freedom rescaled to
/// unit variance, which requires df > 2.
struct Distribution {
    Family family = Family::gaussian;
    double mean = 0.0;
    double scale = 1.0;
    double df = 3.0;

    static Distribution standard(Family f) { return {f, 0.0, 1.0, 3.0}; }

    [[nodiscard]] bool subgaussian() const noexcept { return family != Family::student_t; }

    /// Standard deviation of the centred part.
    [[nodiscard]] double centred_sd() const noexcept { return scale; }

    void validate() const {
        if (!std::isfinite(mean)) throw std::invalid_argument("distribution mean must be finite");
        if (!std::isfinite(scale) || scale < 0.0)
            throw std::invalid_argument("distribution scale must be finite and >= 0");
        if (family == Family::student_t && !(df > 2.0))
            throw std::invalid_argument("student_t requires df > 2 for unit-variance normalization");
    }
};

namespace detail {

inline double draw_unit(Family f, double df, Engine& eng, std::gamma_distribution<double>* chi) {
    switch (f) {
        case Family::gaussian: return eng.normal();
        case Family::rademacher: return (eng() >> 63) ? 1.0 : -1.0;
        case Family::uniform_pm: return std::sqrt(3.0) * (2.0 * eng.uniform01() - 1.0);
        case Family::student_t: {
            const double z = eng.normal();
            const double v = 2.0 * (*chi)(eng);  // chi-square with df degrees
            return z / std::sqrt(v / df) * std::sqrt((df - 2.0) / df);
        }
    }
    return 0.0;
}

}  // namespace detail

/// n iid draws of `dist`, reproducible from `seed`.
inline std::vector<double> sample_vector(const Distribution& dist, std::size_t n, const SeedTree& seed) {
    dist.validate();
    if (n == 0) throw std::invalid_argument("sample_vector: n must be >= 1");
    Engine eng(seed);
    std::gamma_distribution<double> chi(dist.df / 2.0, 1.0);
    std::vector<double> out(n);
    for (auto& v : out) v = dist.mean + dist.scale * detail::draw_unit(dist.family, dist.df, eng, &chi);
    return out;
}

/// Bernoulli(m/n) row selectors; returns the sorted selected indices.
inline std::vector<std::size_t> sample_selectors(std::size_t n, std::size_t m, const SeedTree& seed) {
    if (m < 1 || m > n) throw std::invalid_argument("sample_selectors: need 1 <= m <= n");
    std::vector<std::size_t> rows;
    if (m == n) {
        rows.resize(n);
        for (std::size_t i = 0; i < n; ++i) rows[i] = i;
        return rows;
    }
    const double p = static_cast<double>(m) / static_cast<double>(n);
    Engine eng(seed);
    rows.reserve(m + m / 2);
    for (std::size_t i = 0; i < n; ++i)
        if (eng.uniform01() < p) rows.push_back(i);
    return rows;
}

/// iid Uniform[-lambda, lambda] thresholds.
inline std::vector<double> sample_dither(std::size_t count, double lambda, const SeedTree& seed) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("sample_dither: lambda must be > 0");
    Engine eng(seed);
    std::vector<double> out(count);
    for (auto& v : out) v = lambda * (2.0 * eng.uniform01() - 1.0);
    return out;
}

/// k distinct indices from [0, n), uniformly, in draw order.
inline std::vector<std::size_t> sample_subset(std::size_t n, std::size_t k, Engine& eng) {
    if (k > n) throw std::invalid_argument("sample_subset: k > n");
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + eng.below(n - i)]);
    idx.resize(k);
    return idx;
}

/// Unit-norm s-sparse vector: uniform support, spherically uniform values.
inline std::vector<double> random_sparse_unit(std::size_t n, std::size_t s, const SeedTree& seed) {
    if (s < 1 || s > n) throw std::invalid_argument("random_sparse_unit: need 1 <= s <= n");
    Engine eng(seed);
    const auto support = sample_subset(n, s, eng);
    std::vector<double> x(n, 0.0);
    double nrm = 0.0;
    while (nrm == 0.0) {
        for (std::size_t i : support) {
            x[i] = eng.normal();
            nrm += x[i] * x[i];
        }
    }
    nrm = std::sqrt(nrm);
    for (std::size_t i : support) x[i] /= nrm;
    return x;
}

}  // namespace onebit

#endif  // ONEBIT_RNG_HPP
