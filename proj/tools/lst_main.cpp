#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "lst/report.hpp"

namespace {

enum ExitCode { kOk = 0, kInputError = 2, kNumericalError = 3 };

std::vector<double> numbers(const std::string& s)
{
    return s.empty() ? std::vector<double>{} : lst::report::parse_number_list(s);
}

}  // namespace

int main(int argc, char** argv)
{
    using namespace lst::report;

    CLI::App app{"Liquidity stress testing: transaction costs, liquidation schedules, EVT stress calibration, "
                 "cost model fitting and distortion frontiers"};
    app.require_subcommand(1);
    std::string format = "table";
    app.add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"table", "json", "csv"}))
        ->capture_default_str();

    // cost
    CostOptions cost;
    std::string cost_grid;
    auto* c = app.add_subcommand("cost", "Normal and stressed unit costs per security");
    c->add_option("--portfolio", cost.portfolio, "Portfolio CSV")->required()->check(CLI::ExistingFile);
    c->add_option("--buckets", cost.buckets, "Bucket parameter file")->check(CLI::ExistingFile);
    c->add_option("--stress", cost.stress, "Stress specification file")->check(CLI::ExistingFile);
    c->add_option("--redemption-rate", cost.redemption_rate, "Pro-rata redemption rate (fraction)")
        ->capture_default_str();
    c->add_option("--grid", cost_grid, "Participation grid, e.g. 0.01,5%,10%");

    // liquidate
    LiquidateOptions liq;
    std::string liq_limits;
    auto* l = app.add_subcommand("liquidate", "Liquidation schedule, ratios and costs");
    l->add_option("--portfolio", liq.portfolio, "Portfolio CSV")->required()->check(CLI::ExistingFile);
    l->add_option("--buckets", liq.buckets, "Bucket parameter file")->check(CLI::ExistingFile);
    l->add_option("--redemption-rate", liq.redemption_rate, "Pro-rata redemption rate (fraction)");
    l->add_option("--scenario", liq.scenario, "Redemption scenario CSV (security_id,shares)")
        ->check(CLI::ExistingFile);
    l->add_option("--limits", liq_limits, "Participation limits, e.g. 10%,30%; default bucket limits");
    l->add_option("--horizon", liq.horizon, "Length of the reported liquidation ratio curve");

    // stress-calibrate
    StressCalibrateOptions st;
    std::string st_horizons, st_times, st_kind = "mult";
    std::vector<std::string> st_methods;
    auto* s = app.add_subcommand("stress-calibrate", "Stress scenarios from factor time series");
    s->add_option("--series", st.series, "date,value series files, one per security")->check(CLI::ExistingFile);
    s->add_option("--horizon", st_horizons, "Horizons in trading days or 1D/1W/1M, comma separated");
    s->add_option("--return-time", st_times, "Return times in years, comma separated");
    s->add_option("--method", st_methods, "Methods")->check(CLI::IsMember({"hist", "gev", "gpd"}));
    s->add_option("--block-len", st.block_len, "Block length for block maxima")->capture_default_str();
    s->add_option("--factor", st_kind, "Factor kind")->check(CLI::IsMember({"mult", "add"}))->capture_default_str();
    s->add_flag("--reciprocal", st.reciprocal, "Use 1/m (volume factors)");
    s->add_option("--threshold", st.threshold, "POT threshold u0; default from the mean-excess heuristic");
    s->add_option("--gev-params", st.gev_params, "Bypass the GEV fit: lines 'horizon mu sigma xi'")
        ->check(CLI::ExistingFile);

    // calibrate
    CalibrateOptions cal;
    std::string cal_grid;
    bool no_intercept = false;
    auto* k = app.add_subcommand("calibrate", "Fit the cost model to trade observations");
    k->add_option("trades", cal.trades, "Trade CSV (cost,spread,participation,risk)")->required()->check(
        CLI::ExistingFile);
    k->add_option("--model", cal.model, "Estimator")
        ->check(CLI::IsMember({"nls", "two-stage", "grid"}))
        ->capture_default_str();
    k->add_option("--gamma", cal.gamma, "Fix the impact exponent");
    k->add_option("--grid", cal_grid, "Exponent grid for the grid search");
    k->add_flag("--no-intercept", no_intercept, "Drop the intercept from the bond regressions");

    // frontier
    FrontierOptions fr;
    std::string fr_lambda;
    auto* f = app.add_subcommand("frontier", "Cost versus tracking error frontier");
    f->add_option("--portfolio", fr.portfolio, "Portfolio CSV")->required()->check(CLI::ExistingFile);
    f->add_option("--buckets", fr.buckets, "Bucket parameter file")->check(CLI::ExistingFile);
    f->add_option("--correlation", fr.correlation, "Correlation matrix CSV")->required()->check(CLI::ExistingFile);
    f->add_option("--redemption-rate", fr.redemption_rate, "Redemption rate (fraction of TNA)")
        ->capture_default_str();
    f->add_option("--lambda", fr_lambda, "Lambda grid, comma separated");
    f->add_option("--seed", fr.seed, "Multi-start seed")->capture_default_str();
    f->add_option("--starts", fr.starts, "Multi-start count")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInputError;
    }

    try {
        Report report;
        if (*c) {
            cost.grid = numbers(cost_grid);
            report = cmd_cost(cost);
        } else if (*l) {
            liq.limits = numbers(liq_limits);
            report = cmd_liquidate(liq);
        } else if (*s) {
            if (!st_horizons.empty()) {
                st.horizons.clear();
                for (const auto& h : CLI::detail::split(st_horizons, ','))
                    st.horizons.push_back(parse_horizon(h));
            }
            if (!st_times.empty())
                st.return_times_years = numbers(st_times);
            if (!st_methods.empty())
                st.methods = st_methods;
            st.kind = st_kind == "add" ? lst::FactorKind::Add : lst::FactorKind::Mult;
            report = cmd_stress_calibrate(st);
        } else if (*k) {
            cal.grid = numbers(cal_grid);
            cal.intercept = !no_intercept;
            report = cmd_calibrate(cal);
        } else if (*f) {
            fr.lambdas = numbers(fr_lambda);
            report = cmd_frontier(fr);
        }
        std::cout << render(report, parse_format(format));
        return kOk;
    } catch (const lst::InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const lst::MissingField& e) {
        std::cerr << "missing field: " << e.what() << '\n';
        return kInputError;
    } catch (const lst::InvalidParams& e) {
        std::cerr << "invalid parameters: " << e.what() << '\n';
        return kInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const lst::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumericalError;
    }
}
