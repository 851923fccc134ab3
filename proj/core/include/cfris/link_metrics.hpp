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
#ifndef CFRIS_LINK_METRICS_HPP
#define CFRIS_LINK_METRICS_HPP

#include "cfris/channel_model.hpp"
#include "cfris/td_precoder.hpp"
#include "cfris/types.hpp"

#include <vector>

namespace cfris
{
    // Decision variables. w stacks w_{k,m} in the order (m major, k minor), and each w_{k,m} stacks
    // the per-AP baseband vectors w_{a,k,m} of length N_RF.
    struct PrecoderVariables
    {
        CVec w;
        RisConfiguration ris;
    };

    // Real K x M array (rho) and complex K x M arrays (lambda, omega, gamma)
    using UeScReal = Eigen::MatrixXd;
    using UeScComplex = Eigen::MatrixXcd;

    struct AuxiliaryVariables
    {
        UeScReal rho;
        UeScComplex lambda;
        UeScComplex omega;
        UeScComplex gamma;
    };

    // Closed form used for lambda / omega / gamma
    enum class AuxiliaryForm
    {
        complex_maximizer, // varsigma * b_kk / (sum_j |b_kj|^2 + sigma^2)
        printed_real,      // varsigma / (1 + 1/SINR)
    };

    // Everything the optimizer needs besides its decision variables. Holds references to the channel
    // realization and analog precoder; both must outlive the model.
    class LinkModel
    {
    public:
        // noise_w: K*M values indexed k*M + m (or a single value for all); weights: K values;
        // power_budget_w: A values (or a single value for all)
        LinkModel(const ChannelRealization &channels, const AnalogPrecoder &precoder, std::vector<double> weights,
                  std::vector<double> noise_w, std::vector<double> power_budget_w);

        const ChannelRealization &channels() const { return *channels_; }
        const AnalogPrecoder &precoder() const { return *precoder_; }

        int aps() const { return channels_->aps(); }
        int ues() const { return channels_->ues(); }
        int subcarriers() const { return channels_->subcarriers(); }
        int rf_chains() const { return precoder_->rf_chains(); }
        int ris_total_elements() const { return channels_->ris() * channels_->ris_elements(); }

        double weight(int k) const { return weights_[k]; }
        double noise(int k, int m) const { return noise_[k * subcarriers() + m]; }
        double power_budget(int a) const { return power_[a]; }
        const std::vector<double> &power_budgets() const { return power_; }

        // Length of the stacked baseband vector: A K M N_RF
        Eigen::Index w_size() const;
        // Offset of w_{a,k,m} inside w
        Eigen::Index w_offset(int a, int k, int m) const;
        // Offset of w_{k,m} (length A N_RF) inside w
        Eigen::Index w_block_offset(int k, int m) const { return w_offset(0, k, m); }

    private:
        const ChannelRealization *channels_;
        const AnalogPrecoder *precoder_;
        std::vector<double> weights_;
        std::vector<double> noise_;
        std::vector<double> power_;
    };

    // (A N_RF) x K; column k is F_bar_m^H h_{k,m}
    CMat analog_channels(const LinkModel &model, const RisConfiguration &ris, int m);

    // K x K; entry (k, j) is h_{k,m}^H F_bar_m w_{j,m}
    CMat beam_gains(const LinkModel &model, const PrecoderVariables &vars, int m);

    double sinr(const LinkModel &model, const PrecoderVariables &vars, int k, int m);
    UeScReal sinr_all(const LinkModel &model, const PrecoderVariables &vars);

    // sum_k sum_m weight_k log2(1 + SINR_{k,m})
    double wsr(const LinkModel &model, const PrecoderVariables &vars);
    double wsr_from_sinr(const LinkModel &model, const UeScReal &sinr_values);

    // sum_{k,m} || F_bar_{a,m} w_{a,k,m} ||^2 for every AP
    std::vector<double> per_ap_power(const LinkModel &model, const CVec &w);

    // rho* = SINR at the current variables
    UeScReal update_rho(const LinkModel &model, const PrecoderVariables &vars);

    // varsigma_{k,m} = sqrt(weight_k (1 + rho_{k,m}))
    UeScReal compute_varsigma(const LinkModel &model, const UeScReal &rho);

    // Maximizer of the quadratic-transform surrogate over its auxiliary. The same closed form serves
    // lambda (w block), omega (theta block) and gamma (RIS TD block); only the evaluation point differs.
    UeScComplex update_auxiliary(const LinkModel &model, const PrecoderVariables &vars, const UeScReal &varsigma,
                                 AuxiliaryForm form = AuxiliaryForm::complex_maximizer);

    // Lagrangian dual reformulation objective (natural log), see update_rho
    double ldr_objective(const LinkModel &model, const PrecoderVariables &vars, const UeScReal &rho);

    // Direct sum form of the quadratic-transform surrogate:
    // sum_{k,m} 2 varsigma Re{aux^* b_kk} - |aux|^2 (sum_j |b_kj|^2 + sigma^2)
    double mcqt_surrogate(const LinkModel &model, const PrecoderVariables &vars, const UeScComplex &aux,
                          const UeScReal &varsigma);
}

#endif
