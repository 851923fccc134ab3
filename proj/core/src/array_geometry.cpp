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
#include "cfris/array_geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cfris
{
    SubcarrierGrid make_subcarrier_grid(double carrier_hz, double bandwidth_hz, int count)
    {
        if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz))
            throw std::invalid_argument("Carrier frequency must be positive, got " + std::to_string(carrier_hz));
        if (count < 1)
            throw std::invalid_argument("Subcarrier count must be positive, got " + std::to_string(count));
        if (!(bandwidth_hz >= 0.0) || !std::isfinite(bandwidth_hz))
            throw std::invalid_argument("Bandwidth must be non-negative, got " + std::to_string(bandwidth_hz));

        SubcarrierGrid grid;
        grid.carrier_hz = carrier_hz;
        grid.bandwidth_hz = bandwidth_hz;
        grid.count = count;
        grid.frequencies.resize(count);
        grid.eta.resize(count);

        const double spacing = bandwidth_hz / double(count);
        const double center = double(count - 1) / 2.0;
        for (int m = 0; m < count; ++m)
        {
            const double f = carrier_hz + spacing * (double(m) - center);
            if (!(f > 0.0))
                throw std::invalid_argument("Subcarrier grid contains a non-positive frequency (bandwidth "
                                            + std::to_string(bandwidth_hz) + " Hz too wide for the carrier)");
            grid.frequencies[m] = f;
            grid.eta[m] = f / carrier_hz;
        }
        return grid;
    }

    UlaGeometry::UlaGeometry(int elements) : elements_(elements)
    {
        if (elements < 1)
            throw std::invalid_argument("ULA needs at least one element");
    }

    UpaGeometry::UpaGeometry(int nx, int ny) : nx_(nx), ny_(ny)
    {
        if (nx < 1 || ny < 1)
            throw std::invalid_argument("UPA needs at least one element per axis");
    }

    CVec ula_arv(double phi, double eta, const UlaGeometry &geom)
    {
        const int n = geom.elements();
        const double scale = 1.0 / std::sqrt(double(n));
        const double step = -pi * eta * std::sin(phi);
        CVec out(n);
        for (int i = 0; i < n; ++i)
            out[i] = scale * unit_phasor(step * double(i));
        return out;
    }

    CVec upa_arv(double vartheta, double varphi, double eta, const UpaGeometry &geom)
    {
        const int nx = geom.nx(), ny = geom.ny();
        const double scale = 1.0 / std::sqrt(double(nx * ny));
        const double step_x = -pi * eta * std::sin(vartheta) * std::cos(varphi);
        const double step_y = -pi * eta * std::sin(vartheta) * std::sin(varphi);
        CVec out(nx * ny);
        for (int ix = 0; ix < nx; ++ix)
            for (int iy = 0; iy < ny; ++iy)
                out[ix * ny + iy] = scale * unit_phasor(step_x * double(ix) + step_y * double(iy));
        return out;
    }
}
