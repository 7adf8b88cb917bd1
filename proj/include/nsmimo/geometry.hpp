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

#ifndef nsmimo_geometry_H
#define nsmimo_geometry_H

#include <numbers>

namespace nsmimo
{
    inline constexpr double pi = std::numbers::pi;
    inline constexpr double two_pi = 2.0 * std::numbers::pi;
    inline constexpr double speed_of_light = 299792458.0; // [m/s]

    // Maps any angle into (-pi, pi]
    double wrap_angle(double angle);

    // Uniform linear array. Element i (1-based) sits at (M - 2i + 1) * spacing / 2 along the array axis,
    // so the reference point is the array center.
    struct ArraySpec
    {
        int num_elements = 1; // M_t or M_r
        double spacing = 0.0; // Element spacing in [m]
        double tilt = 0.0;    // Axis angle w.r.t. the x-axis in [rad], in (-pi, pi]

        ArraySpec() = default;
        ArraySpec(int num_elements, double spacing, double tilt); // Validates and wraps the tilt

        double aperture() const { return double(num_elements - 1) * spacing; }
        bool operator==(const ArraySpec &) const = default;
    };

    // Polar position of a cluster (or of the MS for the LOS path)
    struct Placement
    {
        double range = 1.0;      // R_c or D_TR in [m]
        double azimuth_tx = 0.0; // Seen from the BS array center [rad]
        double azimuth_rx = 0.0; // Seen from the MS array center [rad]

        Placement() = default;
        Placement(double range, double azimuth_tx, double azimuth_rx);
        bool operator==(const Placement &) const = default;
    };

    struct Motion
    {
        double speed = 0.0;   // [m/s]
        double heading = 0.0; // alpha_v, w.r.t. the x-axis [rad]

        Motion() = default;
        Motion(double speed, double heading);
        bool operator==(const Motion &) const = default;
    };

    // Signed position of element `index` (1-based) along the array axis [m]
    double element_offset(const ArraySpec &array, int index);

    // Distance from a cluster at (range, azimuth_tx) to BS element p, law of cosines
    double distance_exact(double cluster_range, double cluster_azimuth_tx, const ArraySpec &array, int p);

    // Second-order (parabolic) expansion of distance_exact in the element offset.
    // Total in its arguments; use parabolic_error / parabolic_error_bound to judge the approximation.
    double distance_parabolic(double cluster_range, double cluster_azimuth_tx, const ArraySpec &array, int p);

    // distance_parabolic - distance_exact, evaluated relative to the range so that no precision is lost
    // when the range is many orders of magnitude larger than the array
    double parabolic_error(double cluster_range, double cluster_azimuth_tx, const ArraySpec &array, int p);

    // Third-order remainder bound |d|^3 / (2 R^2)
    double parabolic_error_bound(double cluster_range, const ArraySpec &array, int p);

    double wavenumber(double wavelength); // 2 pi / lambda
    double wavelength_of(double carrier_frequency);

    // Plane-wave phase of the p-q link relative to the array centers [rad]
    double phase_planar(double aod, double aoa, const ArraySpec &tx, const ArraySpec &rx, int p, int q,
                        double wavelength);

    // Wavefront-curvature phase at BS element p; negative, vanishes as the range grows [rad]
    double phase_parabolic(double aod, double cluster_range, const ArraySpec &tx, int p, double wavelength);

    double max_doppler(const Motion &motion, double wavelength); // speed / lambda [Hz]

    // Doppler shift of a scattered ray arriving at `aoa`; the same for every antenna pair [Hz]
    double doppler_nlos(double aoa, const Motion &motion, double wavelength);

    // LOS arrival angle seen from BS element p: pi + aod + sin(aod - tilt) * offset_p / D_TR [rad, unwrapped]
    double los_aoa_drift(double los_aod, const ArraySpec &tx, int p, double d_tr);

    // LOS Doppler shift for BS element p; depends on p but not on the MS element [Hz]
    double doppler_los(double los_aod, const ArraySpec &tx, int p, double d_tr, const Motion &motion,
                       double wavelength);
}

#endif
