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

#ifndef nsmimo_rng_H
#define nsmimo_rng_H

#include <cstdint>
#include <random>

namespace nsmimo
{
    // Random stream used by every generator in the library.
    // The engine (mt19937_64) is fully specified by the standard; the variate transforms below are
    // written out explicitly because std::*_distribution output is implementation-defined.
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed = 1) : engine_(seed) {}

        // Independent stream for task `index` of a run seeded with `seed` (SplitMix64 mixing)
        static Rng substream(std::uint64_t seed, std::uint64_t index);

        std::uint64_t next_u64() { return engine_(); }

        double uniform();                               // [0, 1), 53 random bits
        double uniform(double lo, double hi);           // [lo, hi)
        double uniform_open();                          // (0, 1)
        double normal();                                // N(0, 1), Marsaglia polar method
        double normal(double mean, double stddev);      // N(mean, stddev^2)
        double exponential(double mean);                // Exp with given mean
        bool bernoulli(double probability);

    private:
        std::mt19937_64 engine_;
        double spare_normal_ = 0.0;
        bool has_spare_ = false;
    };

    std::uint64_t splitmix64(std::uint64_t x);
}

#endif
