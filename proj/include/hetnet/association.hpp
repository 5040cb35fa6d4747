#pragma once

#include <array>
#include <utility>
#include <vector>

#include "hetnet/core_model.hpp"
#include "hetnet/quadrature.hpp"

namespace hetnet {

/// One ball of a serving tier in one link state, parameterised by serving distance r.
///
/// Under l = kappa * r^alpha the intensity density becomes Lambda'(l) dl = weight * r dr
/// on [r_inner, r_outer). `r_breaks` are the distances at which some tier's
/// association exponent Lambda_j(ratio_j * l) has a kink or jump.
struct ServingPiece {
    std::size_t ball = 0;
    double r_inner = 0.0;
    double r_outer = 0.0;
    double kappa = 1.0;
    double alpha = 2.0;
    double weight = 0.0;  // 2 * pi * lambda_k * P(state)
    std::vector<double> r_breaks;

    double path_loss(double r) const;
};

std::vector<ServingPiece> serving_pieces(const NetworkConfig& cfg, std::size_t k, LinkState s);

/// (P_j G_j B_j) / (P_k G_k B_k) with intended-link gains.
double association_ratio(const NetworkConfig& cfg, std::size_t j, std::size_t k);

/// sum_j Lambda_j([0, ratio_jk * l)): expected count of BSs beating a tier-k BS at path loss l.
double association_exponent(const NetworkConfig& cfg, std::size_t k, double l);

struct AssociationTable {
    std::vector<std::array<double, 2>> prob;  // [k][state_index(s)]
    double outage_prob = 0.0;
    double error = 0.0;
    bool converged = true;

    double tier(std::size_t k) const { return prob[k][0] + prob[k][1]; }
    double at(std::size_t k, LinkState s) const { return prob[k][state_index(s)]; }
};

/// Probability that the typical UE is served by a state-s BS of tier k.
QuadratureResult association_integral(const NetworkConfig& cfg, std::size_t k, LinkState s,
                                      const Tolerance& tol = {});

double association_prob(const NetworkConfig& cfg, std::size_t k, LinkState s, const Tolerance& tol = {});

/// Every (k, s) entry plus the outage probability exp(-pi sum_k lambda_k R_kD^2).
AssociationTable association_table(const NetworkConfig& cfg, const Tolerance& tol = {});

/// Closed-form LOS association probabilities for two single-ball, all-LOS, alpha = 2 tiers.
/// Throws std::invalid_argument when the configuration is outside that family.
std::pair<double, double> association_closed_form_2tier(const NetworkConfig& cfg);

/// Large-radius limit lambda_k P_k G_k B_k / sum_j lambda_j P_j G_j B_j.
double association_approx(const NetworkConfig& cfg, std::size_t k);

/// Mean number of UEs sharing a tier-k BS, 1 + 1.28 lambda_u A_k / lambda_k.
double mean_load(const NetworkConfig& cfg, std::size_t k, double tier_association);
std::vector<double> mean_loads(const NetworkConfig& cfg, const AssociationTable& table);

}  // namespace hetnet
