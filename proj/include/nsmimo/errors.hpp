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

#ifndef nsmimo_errors_H
#define nsmimo_errors_H

#include <stdexcept>
#include <string>

namespace nsmimo
{
    // Invalid configuration value; `key_path` is the dotted location in the config file
    class ConfigError : public std::runtime_error
    {
    public:
        ConfigError(std::string key_path, const std::string &message)
            : std::runtime_error(key_path.empty() ? message : key_path + ": " + message),
              key_path_(std::move(key_path)) {}

        const std::string &key_path() const noexcept { return key_path_; }

    private:
        std::string key_path_;
    };

    // A requested tensor would exceed the memory budget
    class ResourceError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Too few samples for a statistical estimator
    class EstimatorError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };
}

#endif
