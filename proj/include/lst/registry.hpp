// Security master: bucket parameter files, portfolio files and the
// classification of securities into liquidity buckets and HQLA tiers.
//
// Bucket config format (one section per bucket path, '#' or ';' comments):
//
//   [Equity/LargeCap]
//   benchmark = large_cap_equity     # base for omitted keys
//   beta_spread = 1.25
//   beta_impact = 0.40
//   gamma1 = 0.5
//   gamma2 = 1
//   x_plus = 0.10                    # fraction
//   x_tilde = 0.0666667              # fraction, defaults to 2/3 x_plus
//   risk_measure = volatility        # or dts
//   participation_basis = volume     # or outstanding
//
// A section for a built-in path starts from that path's parameters; any other
// section starts from its `benchmark` (default large_cap_equity).
#pragma once

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lst/costmodel.hpp"
#include "lst/liquidation.hpp"

namespace lst {

using BucketId = std::string;  // "Level1/Level2[/Level3[/Level4]]"
inline const BucketId kUnclassified = "Unclassified";

struct BucketConfig {
    std::map<BucketId, BucketParams> buckets;

    /// Exact path, else the longest configured prefix of it.
    const BucketParams* find(const BucketId& id) const;
    const BucketParams& at(const BucketId& id) const;
};

/// Benchmark buckets available without any configuration.
BucketConfig builtin_buckets();

BucketConfig parse_bucket_config(std::istream& in, const std::string& source = "<stream>");
BucketConfig load_bucket_config(const std::string& path);
std::string serialize_bucket_config(const BucketConfig& cfg);

enum class RatingGroup { HighGrade, MediumGrade, HighYield, Unrated };
/// Ratings grouped into three categories: AAA/AA, A/BBB and below BBB.
RatingGroup rating_group(const std::string& rating);
inline bool investment_grade(RatingGroup g) { return g == RatingGroup::HighGrade || g == RatingGroup::MediumGrade; }

struct SecurityRecord {
    SecurityLiquidityProfile profile;
    Shares shares = 0;
    std::string asset_class;
    std::string cap_bucket;
    std::string region;
    std::string rating;
    std::optional<double> duration;       // years
    std::optional<double> credit_spread;  // fraction
    BucketId bucket = kUnclassified;
    int hqla_tier = 0;                    // 0 when unclassified

    bool operator==(const SecurityRecord& o) const;
};

struct TaxonomyRule {
    std::string asset_class = "*";
    std::string cap_bucket = "*";
    std::string region = "*";
    std::string rating = "*";  // '*', IG or HY
    BucketId bucket;
    int tier = 0;
};

struct Taxonomy {
    std::vector<TaxonomyRule> rules;
};

/// Editable default taxonomy at level-2 granularity, level 3 for equity regions.
std::string default_taxonomy_text();
Taxonomy parse_taxonomy(std::istream& in, const std::string& source = "<stream>");
Taxonomy default_taxonomy();

struct Classification {
    BucketId bucket = kUnclassified;
    int tier = 0;
};

/// First matching rule wins; no match gives the Unclassified bucket.
Classification classify(const SecurityRecord& r, const Taxonomy& t);

struct LoadedPortfolio {
    Portfolio portfolio;
    std::vector<SecurityRecord> records;
    std::vector<std::string> notes;  // missing optional fields

    std::vector<SecurityLiquidityProfile> profiles() const;
    /// Bucket parameters per security; throws MissingField when a record's
    /// bucket has no parameters or lacks a field the bucket needs.
    std::vector<BucketParams> buckets(const BucketConfig& cfg) const;
};

LoadedPortfolio parse_portfolio(std::istream& in, const Taxonomy& taxonomy = default_taxonomy(),
                                const std::string& source = "<stream>");
LoadedPortfolio load_portfolio(const std::string& path, const Taxonomy& taxonomy = default_taxonomy());
std::string serialize_portfolio(const std::vector<SecurityRecord>& records);

/// Splits one delimited line; double quotes protect commas.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace lst
