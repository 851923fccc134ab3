// SPDX-License-Identifier: Apache-2.0
//
// cfris - joint time-delay and RIS precoding for wideband THz cell-free MIMO
// Copyright (C) 2026 The cfris authors
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

#ifndef CFRIS_ARRAY_GEOMETRY_HPP
#define CFRIS_ARRAY_GEOMETRY_HPP

#include "cfris/types.hpp"

#include <cstddef>
#include <vector>

namespace cfris
{
    // OFDM subcarrier layout around the carrier. Storage is 0-based; subcarrier m (1-based)
    // sits at f_c + (B/M) * (m - 1 - (M-1)/2).
    struct SubcarrierGrid
    {
        double carrier_hz = 0.0;
        double bandwidth_hz = 0.0;
        int count = 0;
        std::vector<double> frequencies; // Hz, strictly increasing
        std::vector<double> eta;         // frequencies[m] / carrier_hz

        double spacing_hz() const { return bandwidth_hz / double(count); }
        double carrier_period_s() const { return 1.0 / carrier_hz; }
    };

    // Throws std::invalid_argument on a non-positive carrier, count, or any non-positive frequency.
    SubcarrierGrid make_subcarrier_grid(double carrier_hz, double bandwidth_hz, int count);

    // Half-wavelength uniform linear array with elements 0 .. N-1 along its axis
    class UlaGeometry
    {
    public:
        explicit UlaGeometry(int elements);
        int elements() const { return elements_; }

    private:
        int elements_;
    };

    // Half-wavelength uniform planar array, x-index major (Kronecker order x (x) y)
    class UpaGeometry
    {
    public:
        UpaGeometry(int nx, int ny);
        int nx() const { return nx_; }
        int ny() const { return ny_; }
        int elements() const { return nx_ * ny_; }

    private:
        int nx_;
        int ny_;
    };

    // Beam-split-affected ULA response: entry n = exp(-j pi eta n sin(phi)) / sqrt(N)
    CVec ula_arv(double phi, double eta, const UlaGeometry &geom);

    // Beam-split-affected UPA response:
    // (1/sqrt(N_X N_Y)) exp(-j pi eta n_x sin(vt) cos(vp)) (x) exp(-j pi eta n_y sin(vt) sin(vp))
    CVec upa_arv(double vartheta, double varphi, double eta, const UpaGeometry &geom);
}

#endif
