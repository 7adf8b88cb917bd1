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

#ifndef nsmimo_tensor_H
#define nsmimo_tensor_H

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace nsmimo
{
    // Dense row-major complex tensor, last index fastest
    template <std::size_t Rank>
    class ComplexTensor
    {
    public:
        using value_type = std::complex<double>;
        using shape_type = std::array<std::size_t, Rank>;

        ComplexTensor() { shape_.fill(0); }
        explicit ComplexTensor(const shape_type &shape) : shape_(shape), data_(count(shape)) {}

        static std::size_t count(const shape_type &shape)
        {
            std::size_t n = 1;
            for (auto s : shape)
                n *= s;
            return n;
        }

        const shape_type &shape() const { return shape_; }
        std::size_t size() const { return data_.size(); }

        template <typename... I>
        value_type &operator()(I... idx) { return data_[offset({std::size_t(idx)...})]; }
        template <typename... I>
        const value_type &operator()(I... idx) const { return data_[offset({std::size_t(idx)...})]; }

        std::span<value_type> data() { return data_; }
        std::span<const value_type> data() const { return data_; }

        std::size_t offset(const std::array<std::size_t, Rank> &idx) const
        {
            std::size_t o = 0;
            for (std::size_t k = 0; k < Rank; ++k)
            {
                if (idx[k] >= shape_[k])
                    throw std::out_of_range("Tensor index out of range.");
                o = o * shape_[k] + idx[k];
            }
            return o;
        }

    private:
        shape_type shape_;
        std::vector<value_type> data_;
    };
}

#endif
