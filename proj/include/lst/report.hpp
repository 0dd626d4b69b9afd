// Command implementations behind the lst command line tool. Each command
// returns a Report; rendering to table, JSON or CSV is a separate step so the
// numbers can be checked without parsing text.
#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "lst/costmodel.hpp"
#include "lst/evt.hpp"
#include "lst/liquidation.hpp"

namespace lst::report {

enum class Format { Table, Json, Csv };
Format parse_format(const std::string& name);

struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct Report {
    std::string command;
    nlohmann::ordered_json data;
    std::vector<Table> tables;
    std::vector<std::string> notes;
};

/// Table: aligned columns per table. CSV: one block per table preceded by
/// "# name". JSON: the data document.
std::string render(const Report& r, Format f);

/// FNV-1a 64-bit digest of the given files' bytes, as 16 hex digits.
std::string inputs_digest(const std::vector<std::string>& paths);

/// Key-value stress file: "spread add 8bps", "vol add 20%", "volume mult 0.75".
/// Values accept a bps or % suffix; bare numbers are fractions.
StressScenario parse_stress_spec(std::istream& in, const std::string& source = "<stream>");
StressScenario load_stress_spec(const std::string& path);

/// Horizon in trading days from "21" or the labels 1D, 1W, 1M.
int parse_horizon(const std::string& text);

/// Comma-separated numbers with optional bps/% suffixes.
std::vector<double> parse_number_list(const std::string& text);

struct CostOptions {
    std::string portfolio;
    std::optional<std::string> buckets;
    std::optional<std::string> stress;
    double redemption_rate = 0.10;
    /// When set, rows are per security and participation instead of pro-rata.
    std::vector<double> grid;
};

/// One security sold at quantity q, normal versus stressed market.
struct CostRow {
    std::string security_id;
    double participation = 0.0;  // normal-market participation
    Shares shares = 0;
    double value = 0.0;
    double normal = 0.0;  // relative cost of the multi-day schedule
    double stress = 0.0;
    int lt_normal = 1, lt_stress = 1;
    double ls1_normal = 0.0, ls1_stress = 0.0;  // value fractions
    double ls2_normal = 0.0, ls2_stress = 0.0;
};

/// Single-security schedule evaluation used by cmd_cost rows.
CostRow cost_row(const SecurityLiquidityProfile& profile, const BucketParams& bucket, const StressScenario& stress,
                 Shares q);

Report cmd_cost(const CostOptions& opt);

struct LiquidateOptions {
    std::string portfolio;
    std::optional<std::string> buckets;
    std::optional<double> redemption_rate;
    std::optional<std::string> scenario;  // CSV security_id,shares
    std::vector<double> limits;           // participation limits; empty means bucket limits
    int horizon = 0;                      // LR curve length; 0 means schedule horizon
};

Report cmd_liquidate(const LiquidateOptions& opt);

struct StressCalibrateOptions {
    std::vector<std::string> series;         // date,value files, one per security
    std::vector<int> horizons{1, 5, 21};     // trading days
    std::vector<double> return_times_years{0.385, 0.5, 1, 2, 5, 10, 50};
    std::vector<std::string> methods{"hist", "gev", "gpd"};
    int block_len = kDefaultBlockLength;
    FactorKind kind = FactorKind::Mult;
    bool reciprocal = false;  // use 1/m (volume factors)
    std::optional<double> threshold;
    /// Bypass-fit mode: "horizon mu sigma xi" lines replace the GEV fit.
    std::optional<std::string> gev_params;
};

Report cmd_stress_calibrate(const StressCalibrateOptions& opt);

struct CalibrateOptions {
    std::string trades;          // CSV: cost,spread,participation,risk[,security_id]
    std::string model = "nls";   // nls | two-stage | grid
    std::optional<double> gamma;
    std::vector<double> grid;
    bool intercept = true;
};

Report cmd_calibrate(const CalibrateOptions& opt);

struct FrontierOptions {
    std::string portfolio;
    std::optional<std::string> buckets;
    std::string correlation;  // CSV square matrix (lower triangle suffices)
    double redemption_rate = 0.10;
    std::vector<double> lambdas;
    std::uint64_t seed = 42;
    int starts = 8;
};

Report cmd_frontier(const FrontierOptions& opt);

/// Series file: "date,value" rows, optional header, '#' comments.
std::vector<double> load_series(const std::string& path);

}  // namespace lst::report
