#pragma once

#include <span>

#include <nlohmann/json.hpp>

#include "tolldag/codag.hpp"
#include "tolldag/dynamics.hpp"

namespace tolldag::detail {

inline nlohmann::json json_array(std::span<const double> v) {
    nlohmann::json out = nlohmann::json::array();
    for (double x : v) out.push_back(x);
    return out;
}

inline nlohmann::json sim_config_to_json(const SimConfig& cfg) {
    return {{"beta", cfg.beta},
            {"gamma", cfg.gamma},
            {"eta_low", cfg.eta_low},
            {"eta_high", cfg.eta_high},
            {"K", json_array(cfg.K)},
            {"horizon", cfg.horizon},
            {"seed", cfg.seed},
            {"xi0", json_array(cfg.xi0)},
            {"p0", json_array(cfg.p0)},
            {"toll_rule", cfg.toll_rule == TollRule::affine ? "affine" : "marginal"}};
}

inline nlohmann::json codag_arcs_to_json(const CoDag& codag) {
    nlohmann::json arcs = nlohmann::json::array();
    for (std::size_t a = 0; a < codag.num_arcs(); ++a) {
        const CoDagArc& arc = codag.arc(a);
        arcs.push_back({{"id", codag.arc_id(a)},
                        {"tail", codag.node_label(arc.tail)},
                        {"head", codag.node_label(arc.head)},
                        {"original", codag.network().arcs[arc.original].id},
                        {"height", codag.height(a)}});
    }
    return arcs;
}

}  // namespace tolldag::detail
