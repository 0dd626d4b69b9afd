#include "lst/registry.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace lst {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s)
{
    for (char& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string strip_comment(const std::string& line)
{
    const auto p = line.find_first_of("#;");
    return p == std::string::npos ? line : line.substr(0, p);
}

std::optional<double> parse_double(const std::string& text)
{
    const std::string t = trim(text);
    if (t.empty())
        return std::nullopt;
    double v = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (*first == '+')
        ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw InputError("not a number: '" + t + "'");
    return v;
}

std::string fmt(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string fmt17(double v) { return fmt(v, 17); }
std::string fmt15(double v) { return fmt(v, 15); }

std::string where(const std::string& source, std::size_t line)
{
    return source + ":" + std::to_string(line) + ": ";
}

const std::vector<std::pair<BucketId, BenchmarkKind>>& builtin_paths()
{
    static const std::vector<std::pair<BucketId, BenchmarkKind>> paths{
        {"Equity/LargeCap", BenchmarkKind::LargeCapEquity},
        {"Equity/SmallCap", BenchmarkKind::SmallCapEquity},
        {"FixedIncome/Sovereign", BenchmarkKind::SovereignBond},
        {"FixedIncome/Corporate", BenchmarkKind::CorporateBond},
    };
    return paths;
}

const char* to_text(RiskMeasure m) { return m == RiskMeasure::Volatility ? "volatility" : "dts"; }
const char* to_text(ParticipationBasis b)
{
    return b == ParticipationBasis::VolumeBased ? "volume" : "outstanding";
}

}  // namespace

const BucketParams* BucketConfig::find(const BucketId& id) const
{
    BucketId key = id;
    while (true) {
        if (auto it = buckets.find(key); it != buckets.end())
            return &it->second;
        const auto slash = key.rfind('/');
        if (slash == std::string::npos)
            return nullptr;
        key.resize(slash);
    }
}

const BucketParams& BucketConfig::at(const BucketId& id) const
{
    if (const auto* p = find(id))
        return *p;
    throw MissingField("no bucket parameters configured for '" + id + "'");
}

BucketConfig builtin_buckets()
{
    BucketConfig cfg;
    for (const auto& [path, kind] : builtin_paths())
        cfg.buckets[path] = benchmark_bucket(kind);
    return cfg;
}

BucketConfig parse_bucket_config(std::istream& in, const std::string& source)
{
    static const std::set<std::string> known{"benchmark",    "beta_spread", "beta_impact",  "gamma1",
                                             "gamma2",       "x_tilde",     "x_plus",       "risk_measure",
                                             "participation_basis"};
    struct Section {
        BucketId id;
        std::size_t line = 0;
        std::map<std::string, std::pair<std::string, std::size_t>> kv;
    };
    std::vector<Section> sections;

    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trim(strip_comment(raw));
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw InputError(where(source, lineno) + "unterminated section header");
            const std::string id = trim(line.substr(1, line.size() - 2));
            if (id.empty())
                throw InputError(where(source, lineno) + "empty section name");
            for (const auto& s : sections)
                if (s.id == id)
                    throw InputError(where(source, lineno) + "duplicate section [" + id + "]");
            sections.push_back({id, lineno, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError(where(source, lineno) + "expected 'key = value'");
        if (sections.empty())
            throw InputError(where(source, lineno) + "key outside of a [bucket] section");
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (!known.count(key))
            throw InputError(where(source, lineno) + "unknown key '" + key + "'");
        if (value.empty())
            throw InputError(where(source, lineno) + "missing value for '" + key + "'");
        sections.back().kv[key] = {value, lineno};
    }

    BucketConfig cfg = builtin_buckets();
    for (const auto& s : sections) {
        auto get = [&](const std::string& k) -> const std::pair<std::string, std::size_t>* {
            auto it = s.kv.find(k);
            return it == s.kv.end() ? nullptr : &it->second;
        };
        auto number = [&](const std::string& k) -> std::optional<double> {
            const auto* e = get(k);
            if (!e)
                return std::nullopt;
            try {
                return parse_double(e->first);
            } catch (const InputError&) {
                throw InputError(where(source, e->second) + "field '" + k + "': not a number");
            }
        };

        BucketParams b;
        if (const auto* e = get("benchmark")) {
            const auto kind = parse_benchmark_kind(e->first);
            if (!kind)
                throw InputError(where(source, e->second) + "unknown benchmark '" + e->first + "'");
            b = benchmark_bucket(*kind);
        } else if (auto it = std::find_if(builtin_paths().begin(), builtin_paths().end(),
                                          [&](const auto& p) { return p.first == s.id; });
                   it != builtin_paths().end()) {
            b = benchmark_bucket(it->second);
        } else {
            b = benchmark_bucket(BenchmarkKind::LargeCapEquity);
        }

        if (const auto* e = get("risk_measure")) {
            const std::string v = lower(e->first);
            if (v == "volatility" || v == "vol")
                b.risk_measure = RiskMeasure::Volatility;
            else if (v == "dts")
                b.risk_measure = RiskMeasure::Dts;
            else
                throw InputError(where(source, e->second) + "field 'risk_measure': expected volatility or dts");
        }
        if (const auto* e = get("participation_basis")) {
            const std::string v = lower(e->first);
            if (v == "volume")
                b.participation_basis = ParticipationBasis::VolumeBased;
            else if (v == "outstanding")
                b.participation_basis = ParticipationBasis::OutstandingBased;
            else
                throw InputError(where(source, e->second) +
                                 "field 'participation_basis': expected volume or outstanding");
        }
        if (auto v = number("beta_spread"))
            b.beta_spread = *v;
        if (auto v = number("beta_impact"))
            b.beta_impact = *v;
        if (auto v = number("gamma1"))
            b.gamma1 = *v;
        if (auto v = number("gamma2"))
            b.gamma2 = *v;
        const auto xp = number("x_plus");
        const auto xt = number("x_tilde");
        if (xp) {
            b.x_plus = *xp;
            b.x_tilde = 2.0 / 3.0 * *xp;
        }
        if (xt)
            b.x_tilde = *xt;
        try {
            b.validate();
        } catch (const InvalidParams& e) {
            throw InputError(where(source, s.line) + "bucket [" + s.id + "]: " + e.what());
        }
        cfg.buckets[s.id] = b;
    }
    return cfg;
}

BucketConfig load_bucket_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open bucket config '" + path + "'");
    return parse_bucket_config(in, path);
}

std::string serialize_bucket_config(const BucketConfig& cfg)
{
    std::ostringstream out;
    for (const auto& [id, b] : cfg.buckets) {
        out << '[' << id << "]\n";
        out << "beta_spread = " << fmt17(b.beta_spread) << '\n';
        out << "beta_impact = " << fmt17(b.beta_impact) << '\n';
        out << "gamma1 = " << fmt17(b.gamma1) << '\n';
        out << "gamma2 = " << fmt17(b.gamma2) << '\n';
        out << "x_plus = " << fmt17(b.x_plus) << '\n';
        out << "x_tilde = " << fmt17(b.x_tilde) << '\n';
        out << "risk_measure = " << to_text(b.risk_measure) << '\n';
        out << "participation_basis = " << to_text(b.participation_basis) << "\n\n";
    }
    return out.str();
}

RatingGroup rating_group(const std::string& rating)
{
    std::string r;
    for (char c : rating)
        if (std::isalpha(static_cast<unsigned char>(c)))
            r += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (r.empty() || r == "NR")
        return RatingGroup::Unrated;
    if (r == "IG")
        return RatingGroup::MediumGrade;
    if (r == "HY")
        return RatingGroup::HighYield;
    if (r.rfind("AAA", 0) == 0 || r.rfind("AA", 0) == 0)
        return RatingGroup::HighGrade;
    if (r.rfind("A", 0) == 0 || r.rfind("BBB", 0) == 0 || r.rfind("BAA", 0) == 0)
        return RatingGroup::MediumGrade;
    return RatingGroup::HighYield;
}

bool SecurityRecord::operator==(const SecurityRecord& o) const
{
    const auto& a = profile;
    const auto& b = o.profile;
    return a.security_id == b.security_id && a.price == b.price && a.half_spread == b.half_spread &&
           a.annual_vol == b.annual_vol && a.daily_volume == b.daily_volume && a.outstanding == b.outstanding &&
           a.turnover == b.turnover && a.dts == b.dts && a.fixed_cost_per_share == b.fixed_cost_per_share &&
           shares == o.shares && asset_class == o.asset_class && cap_bucket == o.cap_bucket && region == o.region &&
           rating == o.rating && duration == o.duration && credit_spread == o.credit_spread && bucket == o.bucket &&
           hqla_tier == o.hqla_tier;
}

std::string default_taxonomy_text()
{
    return "# asset_class, cap_bucket, region, rating, bucket, hqla_tier\n"
           "# '*' matches anything; rating is IG or HY after grouping. First match wins.\n"
           "equity,    large,   DM, *,  Equity/LargeCap/DM,              1\n"
           "equity,    large,   EM, *,  Equity/LargeCap/EM,              1\n"
           "equity,    large,   *,  *,  Equity/LargeCap,                 1\n"
           "equity,    small,   DM, *,  Equity/SmallCap/DM,              2\n"
           "equity,    small,   EM, *,  Equity/SmallCap/EM,              2\n"
           "equity,    small,   *,  *,  Equity/SmallCap,                 2\n"
           "equity,    private, *,  *,  Equity/Private,                  5\n"
           "sovereign, *,       DM, IG, FixedIncome/Sovereign/DM,        1\n"
           "sovereign, *,       *,  IG, FixedIncome/Sovereign/EM,        2\n"
           "sovereign, *,       *,  HY, FixedIncome/Sovereign/EM,        3\n"
           "municipal, *,       *,  *,  FixedIncome/Municipal,           2\n"
           "corporate, *,       *,  IG, FixedIncome/Corporate/IG,        3\n"
           "corporate, *,       *,  HY, FixedIncome/Corporate/HY,        4\n"
           "real_estate, *,     *,  *,  RealEstate,                      5\n";
}

Taxonomy parse_taxonomy(std::istream& in, const std::string& source)
{
    Taxonomy t;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty())
            continue;
        auto f = split_csv_line(line);
        if (f.size() != 6)
            throw InputError(where(source, lineno) + "taxonomy rule needs 6 fields");
        TaxonomyRule r;
        r.asset_class = lower(trim(f[0]));
        r.cap_bucket = lower(trim(f[1]));
        r.region = trim(f[2]);
        r.rating = trim(f[3]);
        r.bucket = trim(f[4]);
        try {
            r.tier = std::stoi(trim(f[5]));
        } catch (const std::exception&) {
            throw InputError(where(source, lineno) + "HQLA tier is not an integer");
        }
        if (r.tier < 1 || r.tier > 5)
            throw InputError(where(source, lineno) + "HQLA tier must lie in 1..5");
        if (r.rating != "*" && r.rating != "IG" && r.rating != "HY")
            throw InputError(where(source, lineno) + "rating pattern must be *, IG or HY");
        t.rules.push_back(std::move(r));
    }
    return t;
}

Taxonomy default_taxonomy()
{
    std::istringstream in(default_taxonomy_text());
    return parse_taxonomy(in, "<default taxonomy>");
}

Classification classify(const SecurityRecord& r, const Taxonomy& t)
{
    const std::string ac = lower(r.asset_class);
    const std::string cap = lower(r.cap_bucket);
    const RatingGroup g = rating_group(r.rating);
    for (const auto& rule : t.rules) {
        if (rule.asset_class != "*" && rule.asset_class != ac)
            continue;
        if (rule.cap_bucket != "*" && rule.cap_bucket != cap)
            continue;
        if (rule.region != "*" && rule.region != r.region)
            continue;
        if (rule.rating == "IG" && !investment_grade(g))
            continue;
        if (rule.rating == "HY" && g != RatingGroup::HighYield)
            continue;
        return {rule.bucket, rule.tier};
    }
    return {};
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<SecurityLiquidityProfile> LoadedPortfolio::profiles() const
{
    std::vector<SecurityLiquidityProfile> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        SecurityLiquidityProfile p = r.profile;
        // DTS falls back to duration times credit spread.
        if (!p.dts && r.duration && r.credit_spread)
            p.dts = *r.duration * *r.credit_spread;
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<BucketParams> LoadedPortfolio::buckets(const BucketConfig& cfg) const
{
    const auto profs = profiles();
    std::vector<BucketParams> out;
    out.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const BucketParams* b = cfg.find(r.bucket);
        if (!b)
            throw MissingField("security '" + r.profile.security_id + "' is in bucket '" + r.bucket +
                               "', which has no parameters");
        if (b->risk_measure == RiskMeasure::Dts && !profs[i].dts)
            throw MissingField("security '" + r.profile.security_id + "': bucket '" + r.bucket + "' needs DTS");
        if (b->participation_basis == ParticipationBasis::OutstandingBased && !profs[i].outstanding)
            throw MissingField("security '" + r.profile.security_id + "': bucket '" + r.bucket +
                               "' needs the outstanding amount");
        out.push_back(*b);
    }
    return out;
}

LoadedPortfolio parse_portfolio(std::istream& in, const Taxonomy& taxonomy, const std::string& source)
{
    static const std::vector<std::string> required{"security_id", "shares", "price"};
    static const std::vector<std::string> optional_cols{
        "half_spread_bps", "annual_vol_pct", "daily_volume", "outstanding", "turnover_pct", "dts_bps",
        "duration_y",      "credit_spread_bps", "asset_class", "cap_bucket", "region", "rating",
        "fixed_cost_per_share"};

    std::string raw;
    std::size_t lineno = 0;
    std::map<std::string, std::size_t> col;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!trim(raw).empty())
            break;
    }
    if (trim(raw).empty())
        throw InputError(source + ": empty portfolio file");
    {
        const auto header = split_csv_line(raw);
        for (std::size_t i = 0; i < header.size(); ++i) {
            const std::string h = lower(trim(header[i]));
            if (col.count(h))
                throw InputError(where(source, lineno) + "duplicate column '" + h + "'");
            col[h] = i;
        }
    }
    for (const auto& r : required)
        if (!col.count(r))
            throw InputError(where(source, lineno) + "missing required column '" + r + "'");

    LoadedPortfolio lp;
    for (const auto& c : optional_cols)
        if (!col.count(c) && c != "fixed_cost_per_share")
            lp.notes.push_back("column '" + c + "' absent");

    std::set<std::string> ids;
    while (std::getline(in, raw)) {
        ++lineno;
        if (trim(raw).empty())
            continue;
        const auto f = split_csv_line(raw);
        auto cell = [&](const std::string& name) -> std::string {
            auto it = col.find(name);
            if (it == col.end() || it->second >= f.size())
                return {};
            return trim(f[it->second]);
        };
        auto num = [&](const std::string& name) -> std::optional<double> {
            try {
                return parse_double(cell(name));
            } catch (const InputError&) {
                throw InputError(where(source, lineno) + "column '" + name + "': non-numeric cell '" + cell(name) +
                                 "'");
            }
        };
        auto need = [&](const std::string& name) {
            auto v = num(name);
            if (!v)
                throw InputError(where(source, lineno) + "column '" + name + "': required value is blank");
            return *v;
        };

        SecurityRecord r;
        r.profile.security_id = cell("security_id");
        if (r.profile.security_id.empty())
            throw InputError(where(source, lineno) + "blank security_id");
        if (!ids.insert(r.profile.security_id).second)
            throw InputError(where(source, lineno) + "duplicate security_id '" + r.profile.security_id + "'");
        const double sh = need("shares");
        if (sh != std::floor(sh) || sh < 0)
            throw InputError(where(source, lineno) + "column 'shares': expected a non-negative integer");
        r.shares = static_cast<Shares>(sh);
        r.profile.price = need("price");
        if (auto v = num("half_spread_bps"))
            r.profile.half_spread = from_bps(*v);
        if (auto v = num("annual_vol_pct"))
            r.profile.annual_vol = from_pct(*v);
        if (auto v = num("daily_volume"))
            r.profile.daily_volume = *v;
        r.profile.outstanding = num("outstanding");
        if (auto v = num("turnover_pct"))
            r.profile.turnover = from_pct(*v);
        if (auto v = num("dts_bps"))
            r.profile.dts = from_bps(*v);
        if (auto v = num("fixed_cost_per_share"))
            r.profile.fixed_cost_per_share = *v;
        r.duration = num("duration_y");
        if (auto v = num("credit_spread_bps"))
            r.credit_spread = from_bps(*v);
        r.asset_class = cell("asset_class");
        r.cap_bucket = cell("cap_bucket");
        r.region = cell("region");
        r.rating = cell("rating");
        try {
            r.profile.validate();
        } catch (const InvalidParams& e) {
            throw InputError(where(source, lineno) + "security '" + r.profile.security_id + "': " + e.what());
        }
        const Classification c = classify(r, taxonomy);
        r.bucket = c.bucket;
        r.hqla_tier = c.tier;

        lp.portfolio.holdings.push_back({r.profile.security_id, r.shares, r.profile.price});
        lp.records.push_back(std::move(r));
    }
    lp.portfolio.validate();
    return lp;
}

LoadedPortfolio load_portfolio(const std::string& path, const Taxonomy& taxonomy)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open portfolio file '" + path + "'");
    return parse_portfolio(in, taxonomy, path);
}

namespace {

std::string csv_quote(const std::string& v)
{
    if (v.find_first_of(",\"\n\r") == std::string::npos)
        return v;
    std::string out = "\"";
    for (char c : v) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + '"';
}

}  // namespace

std::string serialize_portfolio(const std::vector<SecurityRecord>& records)
{
    std::ostringstream out;
    out << "security_id,shares,price,half_spread_bps,annual_vol_pct,daily_volume,outstanding,turnover_pct,"
           "dts_bps,duration_y,credit_spread_bps,asset_class,cap_bucket,region,rating,fixed_cost_per_share\n";
    auto opt = [](const std::optional<double>& v, auto f) { return v ? f(*v) : std::string(); };
    for (const auto& r : records) {
        const auto& p = r.profile;
        out << csv_quote(p.security_id) << ',' << r.shares << ',' << fmt17(p.price) << ',' << fmt15(to_bps(p.half_spread))
            << ',' << fmt15(to_pct(p.annual_vol)) << ',' << fmt17(p.daily_volume) << ','
            << opt(p.outstanding, fmt17) << ','
            << opt(p.turnover, [](double v) { return fmt15(to_pct(v)); }) << ','
            << opt(p.dts, [](double v) { return fmt15(to_bps(v)); }) << ',' << opt(r.duration, fmt17) << ','
            << opt(r.credit_spread, [](double v) { return fmt15(to_bps(v)); }) << ',' << csv_quote(r.asset_class) << ','
            << csv_quote(r.cap_bucket) << ',' << csv_quote(r.region) << ',' << csv_quote(r.rating) << ',' << fmt17(p.fixed_cost_per_share) << '\n';
    }
    return out.str();
}

}  // namespace lst
