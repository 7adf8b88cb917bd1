// SPDX-License-Identifier: Apache-2.0
//
// nsmimo: non-stationary massive MIMO channel simulation library
// Copyright (C) 2026 The nsmimo authors
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

#include "nsmimo/rng.hpp"

#include <cmath>

std::uint64_t nsmimo::splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

nsmimo::Rng nsmimo::Rng::substream(std::uint64_t seed, std::uint64_t index)
{
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL)));
}

double nsmimo::Rng::uniform()
{
    return double(engine_() >> 11) * 0x1.0p-53;
}

double nsmimo::Rng::uniform(double lo, double hi)
{
    return lo + (hi - lo) * uniform();
}

double nsmimo::Rng::uniform_open()
{
    // (k + 0.5) / 2^53 never hits 0 or 1
    return (double(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double nsmimo::Rng::normal()
{
    if (has_spare_)
    {
        has_spare_ = false;
        return spare_normal_;
    }
    double u, v, s;
    do
    {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * f;
    has_spare_ = true;
    return u * f;
}

double nsmimo::Rng::normal(double mean, double stddev)
{
    return mean + stddev * normal();
}

double nsmimo::Rng::exponential(double mean)
{
    return -mean * std::log(uniform_open());
}

bool nsmimo::Rng::bernoulli(double probability)
{
    return uniform() < probability;
}
