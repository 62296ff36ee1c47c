#include "bubble/rng.hpp"

#include <cmath>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace bubble {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

inline Philox4x32::Block round(const Philox4x32::Block& ctr, const Philox4x32::Key& key) noexcept {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

const double kSqrt3 = std::sqrt(3.0);

}  // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept : seed_(seed), stream_(stream) {}

Philox4x32::Block Philox4x32::generate(Block counter, Key key) noexcept {
    for (int r = 0; r < 9; ++r) {
        counter = round(counter, key);
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return round(counter, key);
}

void Philox4x32::refill() noexcept {
    const Block counter{static_cast<std::uint32_t>(next_block_), static_cast<std::uint32_t>(next_block_ >> 32),
                        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    const Key key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    buffer_ = generate(counter, key);
    ++next_block_;
    pos_ = 0;
}

void Philox4x32::discard(std::uint64_t n) noexcept {
    const std::uint64_t buffered = static_cast<std::uint64_t>(4 - pos_);
    if (n <= buffered) {
        pos_ += static_cast<int>(n);
        return;
    }
    n -= buffered;
    next_block_ += n / 4;
    pos_ = 4;
    const auto rest = static_cast<int>(n % 4);
    if (rest != 0) {
        refill();
        pos_ = rest;
    }
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

NoiseSource::NoiseSource(const NoiseSpec& spec) noexcept : engine_(spec.seed, spec.stream), family_(spec.family) {}

double NoiseSource::next() noexcept {
    if (family_ == NoiseFamily::Gaussian) {
        boost::random::normal_distribution<double> normal;
        return normal(engine_);
    }
    boost::random::uniform_real_distribution<double> uniform(-kSqrt3, kSqrt3);
    return uniform(engine_);
}

void NoiseSource::fill(std::span<double> out) noexcept {
    if (family_ == NoiseFamily::Gaussian) {
        boost::random::normal_distribution<double> normal;
        for (double& v : out) {
            v = normal(engine_);
        }
    } else {
        boost::random::uniform_real_distribution<double> uniform(-kSqrt3, kSqrt3);
        for (double& v : out) {
            v = uniform(engine_);
        }
    }
}

std::vector<double> brownian_path(const NoiseSpec& spec, double sigma, double dt, std::size_t steps) {
    std::vector<double> increments(steps);
    NoiseSource source(spec);
    source.fill(increments);
    const double scale = sigma * std::sqrt(dt);
    for (double& v : increments) {
        v *= scale;
    }
    return increments;
}

}  // namespace bubble
