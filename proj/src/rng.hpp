#pragma once

#include <cmath>
#include <cstdint>

namespace conewalk {

namespace detail {
inline uint64_t mix64(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}
inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace detail

/// Derives a 64-bit key for a child stream. Used for nested estimators:
/// the inner estimate at outer sample i runs on seed derive_key(seed, stream, i).
inline uint64_t derive_key(uint64_t seed, uint64_t stream, uint64_t index) {
    uint64_t k = detail::mix64(seed + 0x9E3779B97F4A7C15ULL * (stream + 1));
    return detail::mix64(k ^ (index + 0x2545F4914F6CDD1DULL));
}

/// Counter-based random stream: the generator state is a pure function of
/// (seed, stream_id, sample_index), so sample i always sees the same draws
/// no matter which thread runs it or in which order. xoshiro256++ core.
class Rng {
  public:
    Rng(uint64_t seed, uint64_t stream, uint64_t index) {
        uint64_t k = derive_key(seed, stream, index);
        s_[0] = detail::mix64(k += 0x9E3779B97F4A7C15ULL);
        s_[1] = detail::mix64(k += 0x9E3779B97F4A7C15ULL);
        s_[2] = detail::mix64(k += 0x9E3779B97F4A7C15ULL);
        s_[3] = detail::mix64(k += 0x9E3779B97F4A7C15ULL);
    }

    uint64_t next_u64() {
        uint64_t* s = s_;
        const uint64_t result = detail::rotl(s[0] + s[3], 23) + s[0];
        const uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = detail::rotl(s[3], 45);
        return result;
    }

    /// Uniform in [0,1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in (0,1]; safe as a log() argument.
    double uniform_pos() { return 1.0 - uniform(); }

    /// One standard normal draw (Box-Muller; the sine companion is discarded,
    /// so consumption is two uniforms per call and fully deterministic).
    double normal() {
        double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        return r * std::cos(6.283185307179586476925286766559 * uniform());
    }

    /// A pair of independent standard normals from one Box-Muller transform.
    void normal_pair(double& a, double& b) {
        double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        double t = 6.283185307179586476925286766559 * uniform();
        a = r * std::cos(t);
        b = r * std::sin(t);
    }

  private:
    uint64_t s_[4];
};

}  // namespace conewalk
