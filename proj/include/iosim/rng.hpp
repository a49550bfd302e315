#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace iosim {

// Deterministic random helpers on top of std::mt19937_64. The transforms
// are written out here instead of using <random> distributions, whose
// streams differ between standard libraries; this way a seed identifies
// one stream of draws everywhere.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe as a log argument.
    double uniform_pos01() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // Standard normal via Box-Muller, second value cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_pos01()));
        const double theta = 2.0 * std::numbers::pi * uniform01();
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // Exponential inter-arrival time with the given rate.
    double exponential(double rate) { return -std::log(uniform_pos01()) / rate; }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace iosim
