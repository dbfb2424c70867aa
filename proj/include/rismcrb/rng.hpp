// SPDX-License-Identifier: Apache-2.0
//
// rismcrb - localization bounds under RIS amplitude-model mismatch
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RISMCRB_RNG_HPP
#define RISMCRB_RNG_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace rismcrb
{
    // SplitMix64 finalizer. Used both as a counter-based generator (hash of key
    // and counter) and to derive independent stream keys.
    constexpr std::uint64_t mix64(std::uint64_t z) noexcept
    {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Derives a stream key from a master seed and a path of indices, e.g.
    // derive_key(master, {profile_index, trial_index}).
    constexpr std::uint64_t derive_key(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept
    {
        std::uint64_t k = mix64(master);
        for (auto i : path)
            k = mix64(k ^ mix64(i + 0x632BE59BD9B4E019ULL));
        return k;
    }

    // Uniform in [0, 1) with 53 random bits.
    constexpr double to_unit(std::uint64_t bits) noexcept
    {
        return static_cast<double>(bits >> 11) * 0x1.0p-53;
    }

    // Counter-based draw: the value depends only on (key, counter).
    constexpr double uniform_at(std::uint64_t key, std::uint64_t counter) noexcept
    {
        return to_unit(mix64(key ^ mix64(counter)));
    }

    // Sequential stream with an explicit key. Normal variates use Box-Muller on
    // the library's own uniforms so output is identical across standard
    // library implementations.
    class Stream
    {
    public:
        explicit Stream(std::uint64_t key) noexcept : key_(key) {}

        std::uint64_t key() const noexcept { return key_; }

        double uniform() noexcept { return uniform_at(key_, counter_++); }

        double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

        double normal() noexcept
        {
            if (has_spare_)
            {
                has_spare_ = false;
                return spare_;
            }
            double u1 = uniform();
            while (u1 <= 0.0)
                u1 = uniform();
            const double u2 = uniform();
            const double r = std::sqrt(-2.0 * std::log(u1));
            const double a = 2.0 * std::numbers::pi * u2;
            spare_ = r * std::sin(a);
            has_spare_ = true;
            return r * std::cos(a);
        }

    private:
        std::uint64_t key_;
        std::uint64_t counter_ = 0;
        double spare_ = 0.0;
        bool has_spare_ = false;
    };
}

#endif
