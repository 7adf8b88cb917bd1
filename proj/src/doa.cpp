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


#include "nsmimo/doa.hpp"
#include "nsmimo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

double nsmimo::array_angle(double aod, double tilt)
{
    return std::abs(wrap_angle(aod - tilt));
}

std::vector<double> nsmimo::default_angle_grid(double step_deg)
{
    if (!(step_deg > 0.0) || step_deg >= 180.0)
        throw std::domain_error("Angle step must be in (0, 180) degrees.");
    std::vector<double> grid;
    for (int k = 1; k * step_deg < 180.0 - 1e-9; ++k)
        grid.push_back(double(k) * step_deg * pi / 180.0);
    return grid;
}

void nsmimo::MusicConfig::validate(int num_elements) const
{
    if (window_size < 2)
        throw std::domain_error("MUSIC window needs at least 2 antennas.");
    if (window_size > num_elements)
        throw std::domain_error("MUSIC window of " + std::to_string(window_size) + " exceeds the " +
                                std::to_string(num_elements) + "-element array.");
    if (window_step < 1)
        throw std::domain_error("Window step must be at least 1.");
    if (angle_grid.empty())
        throw std::domain_error("Angle grid is empty.");
    for (std::size_t i = 1; i < angle_grid.size(); ++i)
        if (!(angle_grid[i] > angle_grid[i - 1]))
            throw std::domain_error("Angle grid must be strictly increasing.");
    if (num_sources >= window_size)
        throw std::domain_error("Number of sources must be smaller than the window size.");
    if (num_sources < -1)
        throw std::domain_error("Number of sources must be -1 (auto) or non-negative.");
    if (snapshots < 0)
        throw std::domain_error("Snapshot count cannot be negative.");
    if (!(source_threshold > 0.0 && source_threshold < 1.0))
        throw std::domain_error("Source threshold must be in (0, 1).");
    if (!(diagonal_loading >= 0.0))
        throw std::domain_error("Diagonal loading cannot be negative.");
}

Eigen::MatrixXcd nsmimo::window_covariance(const ChannelRealization &r, int q, int window_start,
                                           const MusicConfig &cfg)
{
    const int W = cfg.window_size;
    const int M = r.tx_array.num_elements;
    if (window_start < 1 || window_start + W - 1 > M)
        throw std::domain_error("Window starting at antenna " + std::to_string(window_start) +
                                " does not fit in the array.");
    const int T = r.grid.count;
    const int N = cfg.snapshots > 0 ? cfg.snapshots : T;
    if (N > T)
        throw std::domain_error("Requested " + std::to_string(N) + " snapshots but the realization has " +
                                std::to_string(T) + ".");
    if (cfg.tap >= r.num_taps())
        throw std::out_of_range("Tap " + std::to_string(cfg.tap) + " not in the realization.");

    const std::size_t qs = std::size_t(r.rx_slot(q));
    Eigen::MatrixXcd X(W, N);
    for (int i = 0; i < W; ++i)
    {
        const std::size_t ps = std::size_t(r.tx_slot(window_start + i));
        for (int t = 0; t < N; ++t)
        {
            if (cfg.tap >= 0)
                X(i, t) = r.gains(qs, ps, std::size_t(cfg.tap), std::size_t(t));
            else
            {
                std::complex<double> sum = 0.0;
                for (int c = 0; c < r.num_taps(); ++c)
                    sum += r.gains(qs, ps, std::size_t(c), std::size_t(t));
                X(i, t) = sum;
            }
        }
    }
    Eigen::MatrixXcd R = X * X.adjoint() / double(N);
    return 0.5 * (R + R.adjoint()); // Exact Hermitian symmetry
}

Eigen::VectorXcd nsmimo::steering_vector(int window_size, double spacing, double wavelength, double psi)
{
    const double kappa = wavenumber(wavelength);
    Eigen::VectorXcd a(window_size);
    for (int i = 0; i < window_size; ++i)
    {
        double offset = double(window_size - 2 * i - 1) * spacing * 0.5; // Same convention as element_offset
        a[i] = std::polar(1.0, kappa * offset * std::cos(psi));
    }
    return a;
}

nsmimo::MusicSpectrum nsmimo::music_spectrum(const Eigen::MatrixXcd &cov, const MusicConfig &cfg, double spacing,
                                             double wavelength)
{
    const int W = int(cov.rows());
    if (cov.cols() != W || W < 2)
        throw std::domain_error("Covariance must be square with at least 2 rows.");
    if (cfg.num_sources >= W)
        throw std::domain_error("Number of sources (" + std::to_string(cfg.num_sources) +
                                ") must be smaller than the window size (" + std::to_string(W) + ").");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(cov);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("Hermitian eigendecomposition failed.");
    const Eigen::VectorXd &ev = eig.eigenvalues(); // Ascending

    MusicSpectrum out;
    out.eigenvalues.assign(ev.data(), ev.data() + W);

    // Loading shifts every eigenvalue equally; it only matters for the source count
    const double trace = std::max(ev.sum(), 0.0);
    const double load = cfg.diagonal_loading * trace / double(W);
    const double largest = ev[W - 1] + load;

    int sources = cfg.num_sources;
    if (sources < 0)
    {
        sources = 0;
        if (largest > 0.0)
            for (int k = 0; k < W; ++k)
                if (ev[k] + load > cfg.source_threshold * largest)
                    ++sources;
        sources = std::min(sources, W - 1);
    }
    out.num_sources = sources;

    const Eigen::MatrixXcd En = eig.eigenvectors().leftCols(W - sources);
    out.power.reserve(cfg.angle_grid.size());
    for (double psi : cfg.angle_grid)
    {
        Eigen::VectorXcd a = steering_vector(W, spacing, wavelength, psi);
        double denom = (En.adjoint() * a).squaredNorm();
        out.power.push_back(1.0 / std::max(denom, std::numeric_limits<double>::min()));
    }
    return out;
}

nsmimo::ApsResult nsmimo::sliding_aps(const ChannelRealization &r, int q, const MusicConfig &cfg)
{
    const int M = r.tx_array.num_elements;
    cfg.validate(M);
    const int N = cfg.snapshots > 0 ? cfg.snapshots : r.grid.count;

    ApsResult out;
    out.angles = cfg.angle_grid;
    out.rank_deficient = N < cfg.window_size;
    std::vector<double> linear;
    for (int start = 1; start + cfg.window_size - 1 <= M; start += cfg.window_step)
    {
        auto spec = music_spectrum(window_covariance(r, q, start, cfg), cfg, r.tx_array.spacing, r.wavelength);
        out.window_starts.push_back(start);
        out.num_sources.push_back(spec.num_sources);
        linear.insert(linear.end(), spec.power.begin(), spec.power.end());
    }

    const double peak = *std::max_element(linear.begin(), linear.end());
    out.spectrum_db.reserve(linear.size());
    for (double v : linear)
        out.spectrum_db.push_back(10.0 * std::log10(v / peak));
    return out;
}

std::vector<std::size_t> nsmimo::find_peaks(std::span<const double> v)
{
    std::vector<std::size_t> peaks;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i)
    {
        bool left = i == 0 || v[i] > v[i - 1];
        bool right = i + 1 == n || v[i] >= v[i + 1];
        if (left && right && n > 1)
            peaks.push_back(i);
    }
    std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
    return peaks;
}

double nsmimo::peak_location(std::span<const double> v, std::span<const double> grid)
{
    if (v.empty() || v.size() != grid.size())
        throw std::invalid_argument("Values and grid must be non-empty and of equal length.");
    std::size_t i = std::size_t(std::max_element(v.begin(), v.end()) - v.begin());
    if (i == 0 || i + 1 == v.size())
        return grid[i];
    double y0 = v[i - 1], y1 = v[i], y2 = v[i + 1];
    double denom = y0 - 2.0 * y1 + y2;
    if (denom >= 0.0)
        return grid[i];
    double shift = 0.5 * (y0 - y2) / denom; // In (-0.5, 0.5) grid steps
    double h = shift >= 0 ? grid[i + 1] - grid[i] : grid[i] - grid[i - 1];
    return grid[i] + shift * h;
}
