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


#ifndef nsmimo_doa_H
#define nsmimo_doa_H

#include "nsmimo/channel.hpp"

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace nsmimo
{
    // Angles are measured between the ray and the BS array axis, psi in (0, pi).
    // A ULA cannot tell the two sides of its axis apart, so psi = |wrap(aod - tilt)|.
    double array_angle(double aod, double tilt);

    // 0.25 deg steps strictly inside (0, pi)
    std::vector<double> default_angle_grid(double step_deg = 0.25);

    struct MusicConfig
    {
        int window_size = 12;                            // Antennas per window
        int window_step = 1;                             // Shift between windows
        std::vector<double> angle_grid = default_angle_grid(); // [rad], strictly increasing
        int num_sources = -1;                            // -1 = auto (eigenvalue threshold)
        int snapshots = 0;                               // Time samples used, 0 = all
        double source_threshold = 1e-3;                  // Auto mode: eigenvalues above threshold * largest
        double diagonal_loading = 1e-6;                  // Relative to the mean eigenvalue trace / W
        int tap = -1;                                    // -1 = sum over all taps

        void validate(int num_elements) const;
    };

    // Sample covariance (1/N) sum_t x(t) x(t)^H of the BS antennas window_start .. window_start + W - 1
    Eigen::MatrixXcd window_covariance(const ChannelRealization &realization, int q, int window_start,
                                       const MusicConfig &cfg);

    // Plane-wave response of a W-element window, phase referenced to the window centre
    Eigen::VectorXcd steering_vector(int window_size, double spacing, double wavelength, double psi);

    struct MusicSpectrum
    {
        std::vector<double> power;       // Linear pseudo-spectrum over cfg.angle_grid
        int num_sources = 0;             // Signal subspace dimension used
        std::vector<double> eigenvalues; // Ascending, before diagonal loading
    };

    MusicSpectrum music_spectrum(const Eigen::MatrixXcd &cov, const MusicConfig &cfg, double spacing,
                                 double wavelength);

    struct ApsResult
    {
        std::vector<int> window_starts;  // First antenna (1-based) of each window
        std::vector<double> angles;      // [rad]
        std::vector<double> spectrum_db; // Row-major (window, angle), normalized to a global max of 0 dB
        std::vector<int> num_sources;    // Per window
        bool rank_deficient = false;     // Fewer snapshots than window elements

        std::size_t num_windows() const { return window_starts.size(); }
        double at(std::size_t window, std::size_t angle) const { return spectrum_db[window * angles.size() + angle]; }
        std::span<const double> row(std::size_t window) const
        {
            return {spectrum_db.data() + window * angles.size(), angles.size()};
        }
    };

    // MUSIC over windows starting at 1, 1 + step, ... while the window fits
    ApsResult sliding_aps(const ChannelRealization &realization, int q, const MusicConfig &cfg);

    // Indices of local maxima, strongest first
    std::vector<std::size_t> find_peaks(std::span<const double> values);

    // Location of the global maximum refined by a three-point parabola [same unit as grid]
    double peak_location(std::span<const double> values, std::span<const double> grid);
}

#endif
