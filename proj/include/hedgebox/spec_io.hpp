// SPDX-License-Identifier: Apache-2.0
//
// Market-spec file parsing and JSON serialization. A spec file is a single
// JSON document with "space", "assets", optional "claims", and optional
// "options" blocks; payoff expressions are nested arrays like
// ["posp", ["sub", ["coord", 0], ["const", 0.5]]]. Parse failures carry the
// JSON path (or byte offset) of the offending element.

#pragma once

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hedgebox/ftap.hpp"
#include "hedgebox/hedging.hpp"
#include "hedgebox/market.hpp"
#include "hedgebox/options.hpp"
#include "hedgebox/viability.hpp"

namespace hedgebox {

using json = nlohmann::json;

class spec_error : public std::runtime_error {
public:
    spec_error(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

// ---------------------------------------------------------------------------
// Payoff expressions <-> nested arrays

inline PayoffExpr parse_expr(const json& node, const std::string& path) {
    if (node.is_number()) return PayoffExpr::constant(node.get<double>());
    if (!node.is_array() || node.empty() || !node[0].is_string())
        throw spec_error(path, "expression must be a number or [\"kind\", ...] array");
    const std::string kind = node[0].get<std::string>();
    auto arity = [&](std::size_t want) {
        if (node.size() != want + 1)
            throw spec_error(path, "\"" + kind + "\" expects " + std::to_string(want) +
                                       " argument(s), got " + std::to_string(node.size() - 1));
    };
    auto sub = [&](std::size_t i) { return parse_expr(node[i], path + "[" + std::to_string(i) + "]"); };

    if (kind == "const") {
        arity(1);
        if (!node[1].is_number()) throw spec_error(path + "[1]", "\"const\" needs a number");
        return PayoffExpr::constant(node[1].get<double>());
    }
    if (kind == "coord") {
        arity(1);
        if (!node[1].is_number_unsigned())
            throw spec_error(path + "[1]", "\"coord\" needs a nonnegative integer index");
        return PayoffExpr::coord(node[1].get<std::size_t>());
    }
    if (kind == "add") { arity(2); return sub(1) + sub(2); }
    if (kind == "sub") { arity(2); return sub(1) - sub(2); }
    if (kind == "mul") { arity(2); return sub(1) * sub(2); }
    if (kind == "scale") {
        arity(2);
        if (!node[1].is_number()) throw spec_error(path + "[1]", "\"scale\" needs a number");
        return PayoffExpr::scale(node[1].get<double>(), sub(2));
    }
    if (kind == "min") { arity(2); return PayoffExpr::min_of(sub(1), sub(2)); }
    if (kind == "max") { arity(2); return PayoffExpr::max_of(sub(1), sub(2)); }
    if (kind == "posp") { arity(1); return PayoffExpr::pos_part(sub(1)); }
    if (kind == "abs") { arity(1); return PayoffExpr::abs_of(sub(1)); }
    if (kind == "exp") { arity(1); return PayoffExpr::exp_of(sub(1)); }
    throw spec_error(path, "unknown expression kind \"" + kind + "\"");
}

inline json expr_to_json(const detail::ExprNode* n) {
    switch (n->kind) {
        case NodeKind::Const: return json::array({"const", n->value});
        case NodeKind::Coord: return json::array({"coord", n->coord});
        case NodeKind::Add: return json::array({"add", expr_to_json(n->a.get()), expr_to_json(n->b.get())});
        case NodeKind::Sub: return json::array({"sub", expr_to_json(n->a.get()), expr_to_json(n->b.get())});
        case NodeKind::Mul: return json::array({"mul", expr_to_json(n->a.get()), expr_to_json(n->b.get())});
        case NodeKind::Scale: return json::array({"scale", n->value, expr_to_json(n->a.get())});
        case NodeKind::Min: return json::array({"min", expr_to_json(n->a.get()), expr_to_json(n->b.get())});
        case NodeKind::Max: return json::array({"max", expr_to_json(n->a.get()), expr_to_json(n->b.get())});
        case NodeKind::PosPart: return json::array({"posp", expr_to_json(n->a.get())});
        case NodeKind::Abs: return json::array({"abs", expr_to_json(n->a.get())});
        case NodeKind::Exp: return json::array({"exp", expr_to_json(n->a.get())});
    }
    throw std::logic_error("expr_to_json: unknown node kind");
}

inline json expr_to_json(const PayoffExpr& e) { return expr_to_json(e.root()); }

// ---------------------------------------------------------------------------
// State spaces, measures, portfolios

inline json to_json(const StateSpace& sp) {
    return json{{"dim", sp.dimension()}, {"lo", sp.lo()}, {"hi", sp.hi()}};
}

inline StateSpace space_from_json(const json& node, const std::string& path) {
    if (!node.is_object()) throw spec_error(path, "\"space\" must be an object");
    if (!node.contains("lo") || !node.contains("hi"))
        throw spec_error(path, "\"space\" needs \"lo\" and \"hi\" arrays");
    std::vector<double> lo, hi;
    try {
        lo = node.at("lo").get<std::vector<double>>();
        hi = node.at("hi").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw spec_error(path, e.what());
    }
    if (node.contains("dim") && node.at("dim").get<std::size_t>() != lo.size())
        throw spec_error(path + ".dim", "\"dim\" disagrees with the bound arrays");
    try {
        return StateSpace(std::move(lo), std::move(hi));
    } catch (const std::invalid_argument& e) {
        throw spec_error(path, e.what());
    }
}

inline json to_json(const AtomicMeasure& mu) {
    json atoms = json::array();
    for (const auto& a : mu.atoms()) atoms.push_back(json{{"state", a.state}, {"weight", a.weight}});
    return json{{"atoms", std::move(atoms)}};
}

inline AtomicMeasure measure_from_json(const json& node, const std::string& path) {
    if (!node.is_object() || !node.contains("atoms"))
        throw spec_error(path, "measure must be {\"atoms\": [...]}");
    std::vector<Atom> atoms;
    const json& list = node.at("atoms");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string p = path + ".atoms[" + std::to_string(i) + "]";
        try {
            atoms.push_back(
                {list[i].at("state").get<State>(), list[i].at("weight").get<double>()});
        } catch (const json::exception& e) {
            throw spec_error(p, e.what());
        }
    }
    return AtomicMeasure(std::move(atoms));
}

inline json to_json(const Portfolio& pi) { return json(pi.holdings); }

// ---------------------------------------------------------------------------
// The market-spec file

struct MarketSpec {
    Market market;
    std::vector<std::pair<std::string, Claim>> claims; // sorted by name
    SolverOptions options;
};

namespace detail {

inline SolverOptions options_from_json(const json& node, const std::string& path) {
    SolverOptions opt;
    if (node.is_null()) return opt;
    if (!node.is_object()) throw spec_error(path, "\"options\" must be an object");
    auto num = [&](const char* key, double& slot) {
        if (node.contains(key)) {
            if (!node.at(key).is_number()) throw spec_error(path + "." + key, "expected a number");
            slot = node.at(key).get<double>();
        }
    };
    auto count = [&](const char* key, std::size_t& slot) {
        if (node.contains(key)) {
            if (!node.at(key).is_number_unsigned())
                throw spec_error(path + "." + key, "expected a nonnegative integer");
            slot = node.at(key).get<std::size_t>();
        }
    };
    count("grid", opt.grid_per_dim);
    num("feas_tol", opt.feas_tol);
    num("cs_tol", opt.cs_tol);
    num("strict_tol", opt.strict_tol);
    num("eps_pos", opt.eps_pos);
    count("max_cuts", opt.max_cuts);
    count("audit_per_dim", opt.audit_per_dim);
    count("audit_total_cap", opt.audit_total_cap);
    count("claim_audit_states", opt.claim_audit_states);
    num("guard_bound", opt.guard_bound);
    if (node.contains("polish_rounds")) opt.polish_rounds = node.at("polish_rounds").get<int>();
    return opt;
}

inline bool is_const_one(const PayoffExpr& e) {
    return e.root()->kind == NodeKind::Const && e.root()->value == 1.0;
}

} // namespace detail

/// Parse a market-spec document. The assets array lists risky assets; the
/// riskless asset is implicit unless the first entry is exactly the payoff
/// ["const", 1] at price 1, which is accepted as an explicit riskless slot.
inline MarketSpec parse_market_spec(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw spec_error("(byte " + std::to_string(e.byte) + ")", e.what());
    }
    if (!doc.is_object()) throw spec_error("$", "spec must be a JSON object");
    if (!doc.contains("space")) throw spec_error("$", "missing \"space\" block");
    StateSpace space = space_from_json(doc.at("space"), "$.space");

    if (!doc.contains("assets") || !doc.at("assets").is_array())
        throw spec_error("$", "missing \"assets\" array");
    std::vector<PayoffExpr> payoffs;
    std::vector<double> prices;
    const json& assets = doc.at("assets");
    for (std::size_t i = 0; i < assets.size(); ++i) {
        const std::string p = "$.assets[" + std::to_string(i) + "]";
        if (!assets[i].is_object() || !assets[i].contains("payoff") || !assets[i].contains("price"))
            throw spec_error(p, "asset needs \"payoff\" and \"price\"");
        payoffs.push_back(parse_expr(assets[i].at("payoff"), p + ".payoff"));
        if (!assets[i].at("price").is_number()) throw spec_error(p + ".price", "expected a number");
        prices.push_back(assets[i].at("price").get<double>());
        if (payoffs.back().min_dimension() > space.dimension())
            throw spec_error(p + ".payoff", "coordinate index outside the state space");
    }

    const bool explicit_riskless =
        !payoffs.empty() && detail::is_const_one(payoffs[0]) && prices[0] == 1.0;
    MarketSpec out{explicit_riskless
                       ? Market(space, std::move(payoffs), std::move(prices))
                       : Market::with_riskless(space, std::move(payoffs), std::move(prices)),
                   {},
                   detail::options_from_json(doc.contains("options") ? doc.at("options") : json(),
                                             "$.options")};

    if (doc.contains("claims")) {
        const json& claims = doc.at("claims");
        if (!claims.is_object()) throw spec_error("$.claims", "\"claims\" must be an object");
        for (auto it = claims.begin(); it != claims.end(); ++it) {
            const std::string p = "$.claims." + it.key();
            PayoffExpr e = parse_expr(it.value(), p);
            try {
                out.claims.emplace_back(it.key(),
                                        Claim(e, space, out.options.claim_audit_states));
            } catch (const std::invalid_argument& err) {
                throw spec_error(p, err.what());
            }
        }
    }
    return out;
}

inline MarketSpec load_market_spec(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw spec_error(filename, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_market_spec(buf.str());
}

// ---------------------------------------------------------------------------
// Result serialization (machine-readable report blocks)

inline json to_json(const Market& m) {
    json assets = json::array();
    for (std::size_t d = 0; d < m.num_assets(); ++d)
        assets.push_back(json{{"payoff", expr_to_json(m.payoff(d))}, {"price", m.price(d)}});
    return json{{"space", to_json(m.space())}, {"assets", std::move(assets)}};
}

inline json to_json(const ArbitrageCertificate& c) {
    return json{{"portfolio", to_json(c.portfolio)},
                {"cost", c.cost},
                {"witness", c.witness},
                {"witness_payoff", c.witness_payoff},
                {"lattice_min_payoff", c.lattice_min_payoff}};
}

inline json to_json(const MeasureReport& r) {
    return json{{"mass_error", r.mass_error},
                {"moment_errors", r.moment_errors},
                {"max_moment_error", r.max_moment_error},
                {"min_weight", r.min_weight},
                {"fill_distance", r.fill_distance},
                {"atoms_in_box", r.atoms_in_box}};
}

inline json to_json(const FtapVerdict& v) {
    json out{{"grid", v.grid_resolution}, {"fill_distance", v.grid_fill_distance}};
    switch (v.status) {
        case FtapStatus::ArbitrageFree:
            out["verdict"] = "arbitrage-free";
            out["fully_supported"] = v.fully_supported;
            out["measure"] = to_json(*v.measure);
            if (!v.zero_weight_states.empty()) out["zero_weight_states"] = v.zero_weight_states;
            break;
        case FtapStatus::Arbitrage:
            out["verdict"] = "arbitrage";
            out["certificate"] = to_json(*v.certificate);
            break;
        case FtapStatus::NeedsRefinement:
            out["verdict"] = "needs-refinement";
            if (v.refinement_state) out["refinement_state"] = *v.refinement_state;
            break;
    }
    return out;
}

inline json to_json(const HedgeResult& h) {
    return json{{"side", h.side == HedgeSide::Super ? "super" : "sub"},
                {"converged", h.status == SipStatus::Converged},
                {"portfolio", to_json(h.portfolio)},
                {"price", h.price},
                {"dual_measure", to_json(h.dual_measure)},
                {"dual_report", to_json(h.dual_report)},
                {"gap", h.duality_gap},
                {"certified_violation", h.certified_violation},
                {"iterations", h.iterations},
                {"guard_active", h.guard_active}};
}

inline json to_json(const PriceInterval& iv) {
    return json{{"interval", json::array({iv.lower, iv.upper})}, {"replicable", iv.replicable}};
}

inline json to_json(const ExtensionReport& r) {
    return json{{"max_marketed_deviation", r.max_marketed_deviation},
                {"min_bump_value", r.min_bump_value},
                {"max_linearity_deviation", r.max_linearity_deviation},
                {"portfolio_trials", r.portfolio_trials},
                {"bump_trials", r.bump_trials}};
}

} // namespace hedgebox
