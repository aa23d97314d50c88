// SPDX-License-Identifier: Apache-2.0
//
// hedgebox: decide arbitrage, price claims, and check viability for
// one-period markets described by a JSON spec file.
//
// Exit codes
//   check:     0 arbitrage-free | 2 arbitrage | 3 needs refinement | 1 error
//   price:     0 converged      | 2 arbitrage | 3 not converged    | 1 error
//   viability: 0 viable         | 2 inviable  | 3 needs refinement | 1 error

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>

#include "hedgebox/spec_io.hpp"

namespace {

using namespace hedgebox;
using Clock = std::chrono::steady_clock;

struct CommonArgs {
    std::string spec_path;
    std::string format = "text";
    std::optional<std::size_t> grid;
    std::optional<double> feas_tol;
    std::optional<std::size_t> max_cuts;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("spec", args.spec_path, "market spec file (JSON)")->required();
    cmd->add_option("--format", args.format, "output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    cmd->add_option("--grid", args.grid, "grid resolution per dimension");
    cmd->add_option("--feas-tol", args.feas_tol, "feasibility tolerance");
    cmd->add_option("--max-cuts", args.max_cuts, "cutting-plane iteration cap");
}

int verbosity() {
    const char* v = std::getenv("HEDGEBOX_VERBOSE");
    return v ? std::atoi(v) : 0;
}

MarketSpec load(const CommonArgs& args) {
    MarketSpec spec = load_market_spec(args.spec_path);
    if (args.grid) spec.options.grid_per_dim = *args.grid;
    if (args.feas_tol) spec.options.feas_tol = *args.feas_tol;
    if (args.max_cuts) spec.options.max_cuts = *args.max_cuts;
    return spec;
}

void emit(const CommonArgs& args, const json& report, const std::string& text) {
    if (args.format == "json")
        std::cout << report.dump(2) << "\n";
    else
        std::cout << text;
}

void log_trace(const HedgeResult& h, const std::string& label) {
    if (verbosity() < 1) return;
    for (const auto& rec : h.trace)
        std::cerr << label << " cut " << rec.cut << ": value " << rec.value << ", violation "
                  << rec.violation << "\n";
}

std::string describe(const FtapVerdict& v) {
    std::ostringstream os;
    os.precision(12);
    switch (v.status) {
        case FtapStatus::ArbitrageFree: {
            os << "verdict: arbitrage-free\n";
            os << "  martingale measure atoms: " << v.measure->size()
               << (v.fully_supported ? " (full grid support)" : " (partial support)") << "\n";
            os << "  minimum atom weight: " << v.measure->min_weight() << "\n";
            if (!v.zero_weight_states.empty())
                os << "  forced zero-weight states: " << v.zero_weight_states.size() << "\n";
            break;
        }
        case FtapStatus::Arbitrage: {
            const auto& c = *v.certificate;
            os << "verdict: arbitrage\n  portfolio:";
            for (double p : c.portfolio.holdings) os << " " << p;
            os << "\n  cost: " << c.cost << "\n  witness payoff: " << c.witness_payoff
               << "\n  audit-lattice min payoff: " << c.lattice_min_payoff << "\n";
            break;
        }
        case FtapStatus::NeedsRefinement:
            os << "verdict: needs refinement (grid too coarse to certify)\n";
            break;
    }
    os << "  grid fill distance: " << v.grid_fill_distance << "\n";
    return os.str();
}

int cmd_check(const CommonArgs& args) {
    const auto t0 = Clock::now();
    MarketSpec spec = load(args);
    const Grid grid(spec.market.space(), spec.options.grid_per_dim);
    const FtapVerdict verdict = check_arbitrage(spec.market, grid, spec.options);
    const auto ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

    json report{{"command", "check"}, {"market", to_json(spec.market)}};
    report.update(to_json(verdict));

    std::ostringstream text;
    text << describe(verdict) << "  elapsed: " << ms << " ms\n";
    emit(args, report, text.str());
    switch (verdict.status) {
        case FtapStatus::ArbitrageFree: return 0;
        case FtapStatus::Arbitrage: return 2;
        case FtapStatus::NeedsRefinement: return 3;
    }
    return 1;
}

int cmd_price(const CommonArgs& args, const std::string& claim_name) {
    const auto t0 = Clock::now();
    MarketSpec spec = load(args);

    std::vector<std::pair<std::string, Claim>> todo;
    for (const auto& [name, claim] : spec.claims)
        if (claim_name.empty() || name == claim_name) todo.emplace_back(name, claim);
    if (todo.empty()) {
        std::cerr << "error: "
                  << (claim_name.empty() ? "spec file declares no claims"
                                         : "unknown claim \"" + claim_name + "\"")
                  << "\n";
        return 1;
    }

    json claims_out = json::array();
    std::ostringstream text;
    text.precision(12);
    bool all_converged = true;
    for (const auto& [name, claim] : todo) {
        const HedgeResult sup = superhedge(spec.market, claim, spec.options);
        const HedgeResult sub = subhedge(spec.market, claim, spec.options);
        log_trace(sup, name + "/super");
        log_trace(sub, name + "/sub");
        PriceInterval iv;
        iv.lower = sub.price;
        iv.upper = sup.price;
        iv.replicable = std::abs(iv.upper - iv.lower) <=
                        10.0 * spec.options.gap_tol(std::max(std::abs(iv.lower), std::abs(iv.upper)));
        all_converged = all_converged && sup.status == SipStatus::Converged &&
                        sub.status == SipStatus::Converged;

        json rec{{"claim", name},
                 {"super", to_json(sup)},
                 {"sub", to_json(sub)},
                 {"gap", std::max(sup.duality_gap, sub.duality_gap)},
                 {"iterations", sup.iterations + sub.iterations}};
        rec.update(to_json(iv));
        claims_out.push_back(std::move(rec));

        text << name << ": interval [" << iv.lower << ", " << iv.upper << "]"
             << (iv.replicable ? " (replicable)" : "") << "\n"
             << "  superhedge price " << sup.price << ", gap " << sup.duality_gap
             << ", cuts " << sup.iterations << "\n"
             << "  subhedge price " << sub.price << ", gap " << sub.duality_gap << ", cuts "
             << sub.iterations << "\n";
    }
    const auto ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    text << "  elapsed: " << ms << " ms\n";

    json report{{"command", "price"}, {"market", to_json(spec.market)}, {"claims", claims_out}};
    emit(args, report, text.str());
    return all_converged ? 0 : 3;
}

int cmd_viability(const CommonArgs& args) {
    const auto t0 = Clock::now();
    MarketSpec spec = load(args);
    const Grid grid(spec.market.space(), spec.options.grid_per_dim);
    const ViabilityResult res = build_extension(spec.market, grid, spec.options);

    json report{{"command", "viability"},
                {"market", to_json(spec.market)},
                {"viable", res.viable},
                {"ftap", to_json(res.verdict)}};
    std::ostringstream text;
    text.precision(12);
    if (res.viable) {
        const ExtensionReport rep = verify_extension(*res.extension, spec.market);
        report["extension_report"] = to_json(rep);
        text << "verdict: viable\n  max marketed-subspace deviation: "
             << rep.max_marketed_deviation << "\n  min bump value: " << rep.min_bump_value
             << "\n";
    } else {
        text << "verdict: inviable\n" << describe(res.verdict);
    }
    const auto ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    text << "  elapsed: " << ms << " ms\n";
    emit(args, report, text.str());
    if (res.viable) return 0;
    return res.verdict.status == FtapStatus::Arbitrage ? 2 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"probability-free one-period asset pricing toolkit"};
    app.require_subcommand(1);

    CommonArgs check_args, price_args, via_args;
    std::string claim_name;

    CLI::App* check = app.add_subcommand("check", "decide arbitrage with certificates");
    add_common(check, check_args);
    CLI::App* price = app.add_subcommand("price", "super/subhedge prices for claims");
    add_common(price, price_args);
    price->add_option("--claim", claim_name, "claim name (default: all claims in the spec)");
    CLI::App* via = app.add_subcommand("viability", "price-functional extension check");
    add_common(via, via_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed()) return cmd_check(check_args);
        if (price->parsed()) return cmd_price(price_args, claim_name);
        if (via->parsed()) return cmd_viability(via_args);
    } catch (const hedgebox::spec_error& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 1;
    } catch (const hedgebox::arbitrage_detected& e) {
        std::cerr << "aborted: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
