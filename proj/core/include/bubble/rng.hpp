#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace bubble {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 64-bit seed is the key. The 128-bit counter is split into a 64-bit
/// block index (low words) and a 64-bit stream id (high words), so
/// (seed, stream) names an independent sequence and any position in it can
/// be reached without touching other streams. Satisfies
/// UniformRandomBitGenerator.
class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return 0xFFFFFFFFu; }

    result_type operator()() noexcept {
        if (pos_ == 4) {
            refill();
        }
        return buffer_[pos_++];
    }

    /// Skip n 32-bit outputs.
    void discard(std::uint64_t n) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    /// The bijection itself: ten rounds over `counter` under `key`.
    static Block generate(Block counter, Key key) noexcept;

private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t next_block_ = 0;
    Block buffer_{};
    int pos_ = 4;
};

/// splitmix64 finalizer, used to derive well-mixed seeds from small integers.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

enum class NoiseFamily { Gaussian, UniformCentered };

/// Noise stream description. Increments have mean 0 and variance sigma^2 dt
/// for either family; UniformCentered draws from [-sqrt(3 dt) sigma, +sqrt(3 dt) sigma].
struct NoiseSpec {
    NoiseFamily family = NoiseFamily::Gaussian;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    bool operator==(const NoiseSpec&) const = default;
};

/// Unit-variance i.i.d. draws from one (seed, stream) sequence. Gaussian
/// draws use the ziggurat sampler from Boost.Random on top of Philox.
class NoiseSource {
public:
    explicit NoiseSource(const NoiseSpec& spec) noexcept;

    double next() noexcept;
    void fill(std::span<double> out) noexcept;

private:
    Philox4x32 engine_;
    NoiseFamily family_;
};

/// Scaled increments sigma * dB_k for k = 0..steps-1.
std::vector<double> brownian_path(const NoiseSpec& spec, double sigma, double dt, std::size_t steps);

}  // namespace bubble
