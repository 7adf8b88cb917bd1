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

#include "nsmimo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace
{
    void check_index(const nsmimo::ArraySpec &array, int index)
    {
        if (index < 1 || index > array.num_elements)
            throw std::domain_error("Antenna index " + std::to_string(index) + " outside 1.." +
                                    std::to_string(array.num_elements) + ".");
    }

    void check_positive(double value, const char *what)
    {
        if (!(value > 0.0))
            throw std::domain_error(std::string(what) + " must be positive.");
    }
}

double nsmimo::wrap_angle(double angle)
{
    double a = std::remainder(angle, two_pi); // [-pi, pi]
    if (a <= -pi)
        a += two_pi;
    return a;
}

nsmimo::ArraySpec::ArraySpec(int num_elements_, double spacing_, double tilt_)
    : num_elements(num_elements_), spacing(spacing_), tilt(wrap_angle(tilt_))
{
    if (num_elements < 1)
        throw std::invalid_argument("Array needs at least one element.");
    if (!(spacing >= 0.0) || !std::isfinite(spacing))
        throw std::invalid_argument("Element spacing must be finite and non-negative.");
}

nsmimo::Placement::Placement(double range_, double azimuth_tx_, double azimuth_rx_)
    : range(range_), azimuth_tx(wrap_angle(azimuth_tx_)), azimuth_rx(wrap_angle(azimuth_rx_))
{
    if (!(range > 0.0))
        throw std::invalid_argument("Range must be positive.");
}

nsmimo::Motion::Motion(double speed_, double heading_) : speed(speed_), heading(wrap_angle(heading_))
{
    if (!(speed >= 0.0))
        throw std::invalid_argument("Speed cannot be negative.");
}

double nsmimo::element_offset(const ArraySpec &array, int index)
{
    check_index(array, index);
    return double(array.num_elements - 2 * index + 1) * array.spacing * 0.5;
}

double nsmimo::distance_exact(double cluster_range, double cluster_azimuth_tx, const ArraySpec &array, int p)
{
    check_positive(cluster_range, "Cluster range");
    double d = element_offset(array, p);
    double c = std::cos(cluster_azimuth_tx - array.tilt);
    double r2 = cluster_range * cluster_range + d * d - 2.0 * d * cluster_range * c;
    return std::sqrt(std::max(r2, 0.0));
}

double nsmimo::distance_parabolic(double cluster_range, double cluster_azimuth_tx, const ArraySpec &array, int p)
{
    check_positive(cluster_range, "Cluster range");
    double d = element_offset(array, p);
    double c = std::cos(cluster_azimuth_tx - array.tilt);
    double s = std::sin(cluster_azimuth_tx - array.tilt);
    return cluster_range - d * c + d * d * s * s / (2.0 * cluster_range);
}

double nsmimo::parabolic_error(double cluster_range, double cluster_azimuth_tx, const ArraySpec &array, int p)
{
    check_positive(cluster_range, "Cluster range");
    double R = cluster_range;
    double d = element_offset(array, p);
    double c = std::cos(cluster_azimuth_tx - array.tilt);
    double s = std::sin(cluster_azimuth_tx - array.tilt);

    // Both distances minus R, without forming R + small
    double exact = std::sqrt(std::max(R * R + d * d - 2.0 * d * R * c, 0.0));
    double exact_minus_R = (d * d - 2.0 * d * R * c) / (exact + R);
    double parabolic_minus_R = -d * c + d * d * s * s / (2.0 * R);
    return parabolic_minus_R - exact_minus_R;
}

double nsmimo::parabolic_error_bound(double cluster_range, const ArraySpec &array, int p)
{
    check_positive(cluster_range, "Cluster range");
    double d = std::abs(element_offset(array, p));
    return d * d * d / (2.0 * cluster_range * cluster_range);
}

double nsmimo::wavenumber(double wavelength)
{
    check_positive(wavelength, "Wavelength");
    return two_pi / wavelength;
}

double nsmimo::wavelength_of(double carrier_frequency)
{
    check_positive(carrier_frequency, "Carrier frequency");
    return speed_of_light / carrier_frequency;
}

double nsmimo::phase_planar(double aod, double aoa, const ArraySpec &tx, const ArraySpec &rx, int p, int q,
                            double wavelength)
{
    double kappa = wavenumber(wavelength);
    return kappa * (element_offset(tx, p) * std::cos(aod - tx.tilt) + element_offset(rx, q) * std::cos(aoa - rx.tilt));
}

double nsmimo::phase_parabolic(double aod, double cluster_range, const ArraySpec &tx, int p, double wavelength)
{
    check_positive(cluster_range, "Cluster range");
    double kappa = wavenumber(wavelength);
    double d = element_offset(tx, p);
    double s = std::sin(aod - tx.tilt);
    return -kappa * d * d * s * s / (2.0 * cluster_range);
}

double nsmimo::max_doppler(const Motion &motion, double wavelength)
{
    check_positive(wavelength, "Wavelength");
    return motion.speed / wavelength;
}

double nsmimo::doppler_nlos(double aoa, const Motion &motion, double wavelength)
{
    return max_doppler(motion, wavelength) * std::cos(aoa - motion.heading);
}

double nsmimo::los_aoa_drift(double los_aod, const ArraySpec &tx, int p, double d_tr)
{
    check_positive(d_tr, "BS-MS distance");
    return pi + los_aod + std::sin(los_aod - tx.tilt) * element_offset(tx, p) / d_tr;
}

double nsmimo::doppler_los(double los_aod, const ArraySpec &tx, int p, double d_tr, const Motion &motion,
                           double wavelength)
{
    return max_doppler(motion, wavelength) * std::cos(los_aoa_drift(los_aod, tx, p, d_tr) - motion.heading);
}
