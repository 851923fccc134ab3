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
#include "cfris/link_metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cfris
{
    namespace
    {
        std::vector<double> broadcast(std::vector<double> values, std::size_t n, const char *what)
        {
            if (values.size() == 1 && n > 1)
                values.assign(n, values.front());
            if (values.size() != n)
                throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(n) + " values, got "
                                            + std::to_string(values.size()));
            return values;
        }
    }

    LinkModel::LinkModel(const ChannelRealization &channels, const AnalogPrecoder &precoder, std::vector<double> weights,
                         std::vector<double> noise_w, std::vector<double> power_budget_w)
        : channels_(&channels), precoder_(&precoder)
    {
        if (precoder.aps() != channels.aps())
            throw std::invalid_argument("LinkModel: precoder and channel AP counts differ");
        if (precoder.antennas() != channels.ap_antennas())
            throw std::invalid_argument("LinkModel: precoder and channel antenna counts differ");
        if (precoder.subcarriers() != channels.subcarriers())
            throw std::invalid_argument("LinkModel: precoder and channel subcarrier counts differ");

        const std::size_t K = std::size_t(channels.ues()), M = std::size_t(channels.subcarriers());
        weights_ = broadcast(std::move(weights), K, "UE weights");
        noise_ = broadcast(std::move(noise_w), K * M, "noise powers");
        power_ = broadcast(std::move(power_budget_w), std::size_t(channels.aps()), "power budgets");

        for (double v : weights_)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("UE weights must be non-negative");
        for (double v : noise_)
            if (!(v > 0.0) || !std::isfinite(v))
                throw std::invalid_argument("Noise power must be positive");
        for (double v : power_)
            if (!(v > 0.0) || !std::isfinite(v))
                throw std::invalid_argument("Power budgets must be positive");
    }

    Eigen::Index LinkModel::w_size() const
    {
        return Eigen::Index(aps()) * ues() * subcarriers() * rf_chains();
    }

    Eigen::Index LinkModel::w_offset(int a, int k, int m) const
    {
        return ((Eigen::Index(m) * ues() + k) * aps() + a) * rf_chains();
    }

    CMat analog_channels(const LinkModel &model, const RisConfiguration &ris, int m)
    {
        const int A = model.aps(), K = model.ues(), Nrf = model.rf_chains();
        CMat out(A * Nrf, K);
        for (int k = 0; k < K; ++k)
            for (int a = 0; a < A; ++a)
                out.block(a * Nrf, k, Nrf, 1).noalias() =
                    model.precoder().fbar(a, m).adjoint() * effective_channel(model.channels(), ris, a, k, m);
        return out;
    }

    CMat beam_gains(const LinkModel &model, const PrecoderVariables &vars, int m)
    {
        if (vars.w.size() != model.w_size())
            throw std::invalid_argument("beam_gains: w has the wrong length");
        const int K = model.ues();
        const Eigen::Index len = Eigen::Index(model.aps()) * model.rf_chains();
        const CMat g = analog_channels(model, vars.ris, m);
        CMat W(len, K);
        for (int j = 0; j < K; ++j)
            W.col(j) = vars.w.segment(model.w_block_offset(j, m), len);
        return g.adjoint() * W;
    }

    namespace
    {
        double sinr_from_gains(const CMat &B, int k, double noise)
        {
            double interference = 0.0;
            for (Eigen::Index j = 0; j < B.cols(); ++j)
                if (j != k)
                    interference += std::norm(B(k, j));
            return std::norm(B(k, k)) / (interference + noise);
        }
    }

    double sinr(const LinkModel &model, const PrecoderVariables &vars, int k, int m)
    {
        if (k < 0 || k >= model.ues() || m < 0 || m >= model.subcarriers())
            throw std::out_of_range("sinr: index out of range");
        return sinr_from_gains(beam_gains(model, vars, m), k, model.noise(k, m));
    }

    UeScReal sinr_all(const LinkModel &model, const PrecoderVariables &vars)
    {
        const int K = model.ues(), M = model.subcarriers();
        UeScReal out(K, M);
        for (int m = 0; m < M; ++m)
        {
            const CMat B = beam_gains(model, vars, m);
            for (int k = 0; k < K; ++k)
                out(k, m) = sinr_from_gains(B, k, model.noise(k, m));
        }
        return out;
    }

    double wsr_from_sinr(const LinkModel &model, const UeScReal &sinr_values)
    {
        double total = 0.0;
        for (int k = 0; k < model.ues(); ++k)
            for (int m = 0; m < model.subcarriers(); ++m)
                total += model.weight(k) * std::log2(1.0 + sinr_values(k, m));
        return total;
    }

    double wsr(const LinkModel &model, const PrecoderVariables &vars)
    {
        return wsr_from_sinr(model, sinr_all(model, vars));
    }

    std::vector<double> per_ap_power(const LinkModel &model, const CVec &w)
    {
        if (w.size() != model.w_size())
            throw std::invalid_argument("per_ap_power: w has the wrong length");
        const int Nrf = model.rf_chains();
        std::vector<double> out(std::size_t(model.aps()), 0.0);
        for (int m = 0; m < model.subcarriers(); ++m)
            for (int k = 0; k < model.ues(); ++k)
                for (int a = 0; a < model.aps(); ++a)
                    out[a] += (model.precoder().fbar(a, m) * w.segment(model.w_offset(a, k, m), Nrf)).squaredNorm();
        return out;
    }

    UeScReal update_rho(const LinkModel &model, const PrecoderVariables &vars)
    {
        return sinr_all(model, vars);
    }

    UeScReal compute_varsigma(const LinkModel &model, const UeScReal &rho)
    {
        UeScReal out(model.ues(), model.subcarriers());
        for (int k = 0; k < model.ues(); ++k)
            for (int m = 0; m < model.subcarriers(); ++m)
            {
                if (rho(k, m) < 0.0)
                    throw std::invalid_argument("compute_varsigma: rho must be non-negative");
                out(k, m) = std::sqrt(model.weight(k) * (1.0 + rho(k, m)));
            }
        return out;
    }

    UeScComplex update_auxiliary(const LinkModel &model, const PrecoderVariables &vars, const UeScReal &varsigma,
                                 AuxiliaryForm form)
    {
        const int K = model.ues(), M = model.subcarriers();
        UeScComplex out(K, M);
        for (int m = 0; m < M; ++m)
        {
            const CMat B = beam_gains(model, vars, m);
            for (int k = 0; k < K; ++k)
            {
                const double total = B.row(k).squaredNorm() + model.noise(k, m);
                if (form == AuxiliaryForm::complex_maximizer)
                    out(k, m) = varsigma(k, m) * B(k, k) / total;
                else
                {
                    const double s = sinr_from_gains(B, k, model.noise(k, m));
                    out(k, m) = s > 0.0 ? varsigma(k, m) / (1.0 + 1.0 / s) : 0.0;
                }
            }
        }
        return out;
    }

    double ldr_objective(const LinkModel &model, const PrecoderVariables &vars, const UeScReal &rho)
    {
        double total = 0.0;
        for (int m = 0; m < model.subcarriers(); ++m)
        {
            const CMat B = beam_gains(model, vars, m);
            for (int k = 0; k < model.ues(); ++k)
            {
                const double w = model.weight(k), p = rho(k, m);
                const double g2 = std::norm(B(k, k)) / (B.row(k).squaredNorm() + model.noise(k, m));
                total += w * std::log1p(p) - w * p + w * (1.0 + p) * g2;
            }
        }
        return total;
    }

    double mcqt_surrogate(const LinkModel &model, const PrecoderVariables &vars, const UeScComplex &aux,
                          const UeScReal &varsigma)
    {
        double total = 0.0;
        for (int m = 0; m < model.subcarriers(); ++m)
        {
            const CMat B = beam_gains(model, vars, m);
            for (int k = 0; k < model.ues(); ++k)
            {
                const cplx x = aux(k, m);
                total += 2.0 * varsigma(k, m) * std::real(std::conj(x) * B(k, k))
                         - std::norm(x) * (B.row(k).squaredNorm() + model.noise(k, m));
            }
        }
        return total;
    }
}
