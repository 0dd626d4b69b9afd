#include "lst/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "lst/calibration.hpp"
#include "lst/distortion.hpp"
#include "lst/numeric.hpp"
#include "lst/registry.hpp"

namespace lst::report {

using json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::string lower(std::string s)
{
    for (char& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string fixed(double v, int decimals)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (std::isnan(v))
        return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string sci(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

std::string bps(double fraction) { return fixed(to_bps(fraction), 1); }
std::string pct(double fraction, int decimals = 2) { return fixed(to_pct(fraction), decimals); }

json number_or_null(std::optional<double> v)
{
    if (!v || !std::isfinite(*v))
        return nullptr;
    return *v;
}

double parse_value(const std::string& raw)
{
    std::string t = lower(trim(raw));
    double scale = 1.0;
    if (t.size() > 3 && t.compare(t.size() - 3, 3, "bps") == 0) {
        scale = kBasisPoint;
        t = trim(t.substr(0, t.size() - 3));
    } else if (!t.empty() && t.back() == '%') {
        scale = 0.01;
        t = trim(t.substr(0, t.size() - 1));
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw InputError("not a number: '" + raw + "'");
    }
    if (used != t.size())
        throw InputError("not a number: '" + raw + "'");
    return v * scale;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

BucketConfig bucket_config(const std::optional<std::string>& path)
{
    return path ? load_bucket_config(*path) : builtin_buckets();
}

json shock_json(const Shock& s)
{
    return json{{"kind", s.kind == Shock::Kind::Mult ? "mult" : "add"}, {"value", s.value}};
}

json scenario_json(const StressScenario& s)
{
    return json{{"spread", shock_json(s.spread)}, {"vol", shock_json(s.vol)}, {"volume_mult", s.volume_mult}};
}

json breakdown_json(const CostBreakdown& c)
{
    return json{{"total", c.total},
                {"spread", c.spread_part},
                {"impact", c.impact_part},
                {"fixed", c.fixed_part},
                {"redemption_value", c.redemption_value},
                {"relative_bps", to_bps(c.relative)},
                {"impact_share", c.impact_share()}};
}

std::string horizon_label(int h)
{
    if (h == 1)
        return "1D";
    if (h == 5)
        return "1W";
    if (h == 21)
        return "1M";
    return std::to_string(h) + "D";
}

RedemptionScenario load_scenario(const std::string& path, const Portfolio& pf)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open scenario file '" + path + "'");
    std::map<std::string, Shares> q;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const auto f = split_csv_line(t);
        if (f.size() < 2)
            throw InputError(path + ":" + std::to_string(lineno) + ": expected security_id,shares");
        if (lineno == 1 && lower(trim(f[1])) == "shares")
            continue;
        double v = 0.0;
        try {
            v = parse_value(f[1]);
        } catch (const InputError&) {
            throw InputError(path + ":" + std::to_string(lineno) + ": non-numeric share count");
        }
        if (v < 0 || v != std::floor(v))
            throw InputError(path + ":" + std::to_string(lineno) + ": shares must be a non-negative integer");
        q[trim(f[0])] = static_cast<Shares>(v);
    }
    RedemptionScenario s;
    for (const auto& h : pf.holdings) {
        s.security_ids.push_back(h.security_id);
        auto it = q.find(h.security_id);
        const Shares v = it == q.end() ? 0 : it->second;
        if (v > h.shares)
            throw InputError("scenario sells more '" + h.security_id + "' than the portfolio holds");
        s.quantities.push_back(v);
        if (it != q.end())
            q.erase(it);
    }
    if (!q.empty())
        throw InputError("scenario names a security not in the portfolio: '" + q.begin()->first + "'");
    return s;
}

double basis_denominator(const SecurityLiquidityProfile& p, const BucketParams& b)
{
    if (b.participation_basis == ParticipationBasis::VolumeBased)
        return p.daily_volume;
    if (!p.outstanding)
        throw MissingField("security '" + p.security_id + "' needs the outstanding amount");
    return *p.outstanding;
}

Shares floor_limit(double lim)
{
    return std::isfinite(lim) ? static_cast<Shares>(std::floor(lim * (1.0 + 1e-12) + 1e-9))
                              : std::numeric_limits<Shares>::max();
}

}  // namespace

int parse_horizon(const std::string& raw)
{
    const std::string t = lower(trim(raw));
    if (t == "1d")
        return 1;
    if (t == "1w")
        return 5;
    if (t == "1m")
        return 21;
    try {
        std::size_t used = 0;
        const int h = std::stoi(t, &used);
        if (used == t.size() && h > 0)
            return h;
    } catch (const std::exception&) {
    }
    throw InputError("bad horizon '" + raw + "'");
}

Format parse_format(const std::string& name)
{
    const std::string n = lower(name);
    if (n == "table")
        return Format::Table;
    if (n == "json")
        return Format::Json;
    if (n == "csv")
        return Format::Csv;
    throw InputError("unknown format '" + name + "'");
}

std::string render(const Report& r, Format f)
{
    std::ostringstream out;
    if (f == Format::Json) {
        json doc = r.data;
        doc["notes"] = r.notes;
        out << doc.dump(2) << '\n';
        return out.str();
    }
    if (f == Format::Csv) {
        auto cell = [](const std::string& s) {
            if (s.find_first_of(",\"") == std::string::npos)
                return s;
            std::string q = "\"";
            for (char c : s)
                q += c == '"' ? std::string("\"\"") : std::string(1, c);
            return q + "\"";
        };
        for (const auto& t : r.tables) {
            out << "# " << t.name << '\n';
            for (std::size_t i = 0; i < t.header.size(); ++i)
                out << (i ? "," : "") << cell(t.header[i]);
            out << '\n';
            for (const auto& row : t.rows) {
                for (std::size_t i = 0; i < row.size(); ++i)
                    out << (i ? "," : "") << cell(row[i]);
                out << '\n';
            }
        }
        for (const auto& n : r.notes)
            out << "# note: " << n << '\n';
        return out.str();
    }
    for (const auto& t : r.tables) {
        std::vector<std::size_t> width(t.header.size(), 0);
        for (std::size_t i = 0; i < t.header.size(); ++i)
            width[i] = t.header[i].size();
        for (const auto& row : t.rows)
            for (std::size_t i = 0; i < row.size() && i < width.size(); ++i)
                width[i] = std::max(width[i], row[i].size());
        out << t.name << '\n';
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                const std::size_t pad = i < width.size() ? width[i] - std::min(width[i], cells[i].size()) : 0;
                // First column is left aligned, numbers to the right.
                if (i == 0)
                    out << cells[i] << std::string(pad, ' ');
                else
                    out << "  " << std::string(pad, ' ') << cells[i];
            }
            out << '\n';
        };
        line(t.header);
        for (const auto& row : t.rows)
            line(row);
        out << '\n';
    }
    for (const auto& n : r.notes)
        out << "note: " << n << '\n';
    return out.str();
}

std::string inputs_digest(const std::vector<std::string>& paths)
{
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&](unsigned char c) {
        h ^= c;
        h *= 1099511628211ull;
    };
    for (const auto& p : paths) {
        for (char c : read_file(p))
            mix(static_cast<unsigned char>(c));
        mix(0);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

StressScenario parse_stress_spec(std::istream& in, const std::string& source)
{
    StressScenario s;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        std::istringstream fields(trim(hash == std::string::npos ? line : line.substr(0, hash)));
        std::string key, kind, value, extra;
        if (!(fields >> key))
            continue;
        const std::string where = source + ":" + std::to_string(lineno) + ": ";
        if (!(fields >> kind >> value) || (fields >> extra))
            throw InputError(where + "expected '<spread|vol|volume> <mult|add> <value>'");
        key = lower(key);
        kind = lower(kind);
        if (kind != "mult" && kind != "add")
            throw InputError(where + "shock kind must be mult or add");
        double v = 0.0;
        try {
            v = parse_value(value);
        } catch (const InputError&) {
            throw InputError(where + "non-numeric shock value '" + value + "'");
        }
        const Shock shock = kind == "mult" ? Shock::mult(v) : Shock::add(v);
        if (key == "spread")
            s.spread = shock;
        else if (key == "vol" || key == "volatility")
            s.vol = shock;
        else if (key == "volume") {
            if (kind != "mult")
                throw InputError(where + "the volume shock is multiplicative");
            s.volume_mult = v;
        } else
            throw InputError(where + "unknown stress key '" + key + "'");
    }
    try {
        s.validate();
    } catch (const InvalidParams& e) {
        throw InputError(source + ": " + e.what());
    }
    return s;
}

StressScenario load_stress_spec(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open stress file '" + path + "'");
    return parse_stress_spec(in, path);
}

std::vector<double> parse_number_list(const std::string& text)
{
    std::vector<double> out;
    for (const auto& f : split_csv_line(text))
        if (!trim(f).empty())
            out.push_back(parse_value(f));
    return out;
}

CostRow cost_row(const SecurityLiquidityProfile& profile, const BucketParams& bucket, const StressScenario& stress,
                 Shares q)
{
    CostRow row;
    row.security_id = profile.security_id;
    row.shares = q;
    row.value = static_cast<double>(q) * profile.price;
    row.participation = static_cast<double>(q) / basis_denominator(profile, bucket);
    const SecurityLiquidityProfile stressed = apply_stress(profile, stress);

    auto eval = [&](const SecurityLiquidityProfile& p, double& cost, int& lt, double& ls1, double& ls2) {
        if (q == 0) {
            cost = unit_cost(0.0, p, bucket).value();
            return;
        }
        const Shares lim = floor_limit(trading_limit_shares(p, bucket));
        const RedemptionScenario scen{{p.security_id}, {q}};
        const LiquidationSchedule sched = build_schedule(scen, std::span<const Shares>(&lim, 1));
        const std::vector<SecurityLiquidityProfile> one{p};
        cost = total_cost(sched, one, bucket).relative;
        const std::vector<double> prices{p.price};
        lt = time_to_liquidation(sched, prices, 1.0);
        ls1 = 1.0 - liquidation_ratio(sched, prices, 1);
        ls2 = 1.0 - liquidation_ratio(sched, prices, 2);
    };
    eval(profile, row.normal, row.lt_normal, row.ls1_normal, row.ls2_normal);
    eval(stressed, row.stress, row.lt_stress, row.ls1_stress, row.ls2_stress);
    return row;
}

Report cmd_cost(const CostOptions& opt)
{
    std::vector<std::string> inputs{opt.portfolio};
    if (opt.buckets)
        inputs.push_back(*opt.buckets);
    if (opt.stress)
        inputs.push_back(*opt.stress);

    const LoadedPortfolio lp = load_portfolio(opt.portfolio);
    const BucketConfig cfg = bucket_config(opt.buckets);
    const auto profs = lp.profiles();
    const auto bks = lp.buckets(cfg);
    const StressScenario stress = opt.stress ? load_stress_spec(*opt.stress) : StressScenario::identity();

    Report r;
    r.command = "cost";
    r.notes = lp.notes;
    std::vector<CostRow> rows;
    const bool grid = !opt.grid.empty();
    if (grid) {
        for (std::size_t i = 0; i < profs.size(); ++i)
            for (double x : opt.grid) {
                if (!(x >= 0.0))
                    throw InputError("participation grid values must be non-negative");
                const double q = std::nearbyint(x * basis_denominator(profs[i], bks[i]));
                rows.push_back(cost_row(profs[i], bks[i], stress, static_cast<Shares>(q)));
            }
    } else {
        const ProRataResult pr = pro_rata(lp.portfolio, opt.redemption_rate);
        for (std::size_t i = 0; i < profs.size(); ++i)
            rows.push_back(cost_row(profs[i], bks[i], stress, pr.scenario.quantities[i]));
    }

    Table t{"unit cost (bps) and liquidation", {"security", "x_pct", "shares", "normal_bps", "stress_bps",
                                                 "LT_normal", "LT_stress", "LS1_normal_pct", "LS1_stress_pct",
                                                 "LS2_stress_pct"}, {}};
    if (grid) {
        t.header.push_back("LS1_stress_x_pct");
        t.header.push_back("LS2_stress_x_pct");
    }
    json jrows = json::array();
    for (const auto& row : rows) {
        std::vector<std::string> cells{row.security_id,       pct(row.participation), std::to_string(row.shares),
                                       bps(row.normal),       bps(row.stress),        std::to_string(row.lt_normal),
                                       std::to_string(row.lt_stress), pct(row.ls1_normal), pct(row.ls1_stress),
                                       pct(row.ls2_stress)};
        if (grid) {
            cells.push_back(pct(row.participation * row.ls1_stress));
            cells.push_back(pct(row.participation * row.ls2_stress));
        }
        t.rows.push_back(std::move(cells));
        jrows.push_back(json{{"security_id", row.security_id},
                             {"participation", row.participation},
                             {"shares", row.shares},
                             {"value", row.value},
                             {"normal", row.normal},
                             {"stress", row.stress},
                             {"lt_normal", row.lt_normal},
                             {"lt_stress", row.lt_stress},
                             {"ls1_normal", row.ls1_normal},
                             {"ls1_stress", row.ls1_stress},
                             {"ls2_normal", row.ls2_normal},
                             {"ls2_stress", row.ls2_stress}});
    }
    r.tables.push_back(std::move(t));

    r.data["command"] = "cost";
    r.data["inputs_digest"] = inputs_digest(inputs);
    r.data["scenario"] = scenario_json(stress);
    r.data["mode"] = grid ? "grid" : "pro_rata";
    if (!grid)
        r.data["redemption_rate"] = opt.redemption_rate;
    r.data["rows"] = jrows;

    if (!grid) {
        const ProRataResult pr = pro_rata(lp.portfolio, opt.redemption_rate);
        if (pr.scenario.empty()) {
            r.notes.push_back("redemption is zero: no aggregate cost");
        } else {
            std::vector<SecurityLiquidityProfile> sprofs;
            for (const auto& p : profs)
                sprofs.push_back(apply_stress(p, stress));
            const CostBreakdown n =
                total_cost(build_schedule(pr.scenario, limits_from_buckets(profs, bks)), profs, bks);
            const CostBreakdown s =
                total_cost(build_schedule(pr.scenario, limits_from_buckets(sprofs, bks)), sprofs, bks);
            r.data["aggregates"] = json{{"normal", breakdown_json(n)}, {"stress", breakdown_json(s)}};
            Table a{"aggregate cost", {"case", "TC", "BAS", "PI", "relative_bps", "PI_share_pct"}, {}};
            for (const auto& [name, c] : {std::pair{"normal", &n}, std::pair{"stress", &s}})
                a.rows.push_back({name, fixed(c->total, 2), fixed(c->spread_part, 2), fixed(c->impact_part, 2),
                                  bps(c->relative), pct(c->impact_share(), 1)});
            r.tables.push_back(std::move(a));
        }
    }
    return r;
}

Report cmd_liquidate(const LiquidateOptions& opt)
{
    std::vector<std::string> inputs{opt.portfolio};
    if (opt.buckets)
        inputs.push_back(*opt.buckets);
    if (opt.scenario)
        inputs.push_back(*opt.scenario);
    if (opt.scenario && opt.redemption_rate)
        throw InputError("give either a redemption rate or a scenario file, not both");

    const LoadedPortfolio lp = load_portfolio(opt.portfolio);
    const BucketConfig cfg = bucket_config(opt.buckets);
    const auto profs = lp.profiles();
    const auto prices = lp.portfolio.prices();
    const RedemptionScenario scen =
        opt.scenario ? load_scenario(*opt.scenario, lp.portfolio) : pro_rata(lp.portfolio, opt.redemption_rate.value_or(0.10)).scenario;

    Report r;
    r.command = "liquidate";
    r.notes = lp.notes;
    r.data["command"] = "liquidate";
    r.data["inputs_digest"] = inputs_digest(inputs);
    r.data["redemption"] = json{{"security_ids", scen.security_ids},
                                {"shares", scen.quantities},
                                {"value", scen.value(prices)}};

    struct LimitSet {
        std::string label;
        std::vector<Shares> limits;
    };
    std::vector<LimitSet> sets;
    std::optional<std::vector<BucketParams>> bks;
    try {
        bks = lp.buckets(cfg);
    } catch (const MissingField& e) {
        if (opt.limits.empty())
            throw;
        r.notes.push_back(std::string("costs skipped: ") + e.what());
    }
    if (opt.limits.empty())
        sets.push_back({"bucket", limits_from_buckets(profs, *bks)});
    for (double x : opt.limits)
        sets.push_back({"x+=" + pct(x) + "%", limits_from_participation(profs, x)});

    Table plot{"liquidation ratio curve", {"series", "h", "LR_pct"}, {}};
    json jsets = json::array();
    for (const auto& set : sets) {
        json js{{"label", set.label}, {"limits", set.limits}};
        if (scen.empty()) {
            r.notes.push_back(set.label + ": redemption is zero, liquidation ratio undefined");
            js["liquidation_ratio"] = nullptr;
            jsets.push_back(js);
            continue;
        }
        const LiquidationSchedule s = build_schedule(scen, set.limits);
        const int H = std::max(s.horizon(), opt.horizon);
        Table sched{"schedule (" + set.label + ")", {"security"}, {}};
        for (int h = 1; h <= s.horizon(); ++h)
            sched.header.push_back("day" + std::to_string(h));
        for (std::size_t i = 0; i < s.size(); ++i) {
            std::vector<std::string> row{scen.security_ids[i]};
            for (int h = 1; h <= s.horizon(); ++h)
                row.push_back(std::to_string(s.sold_on(i, h)));
            sched.rows.push_back(std::move(row));
        }
        r.tables.push_back(std::move(sched));

        std::vector<double> lr;
        for (int h = 1; h <= H; ++h) {
            lr.push_back(liquidation_ratio(s, prices, h));
            plot.rows.push_back({set.label, std::to_string(h), pct(lr.back())});
        }
        js["horizon"] = s.horizon();
        js["sold"] = s.sold;
        js["liquidation_ratio"] = lr;
        js["time_to_liquidation"] = time_to_liquidation(s, prices, 1.0);
        js["liquidation_shortfall"] = liquidation_shortfall(s, prices);

        if (bks) {
            try {
                const CostBreakdown c = total_cost(s, profs, *bks);
                js["cost"] = breakdown_json(c);
                Table ct{"cost (" + set.label + ")", {"security", "TC", "share_pct"}, {}};
                for (std::size_t i = 0; i < s.size(); ++i)
                    ct.rows.push_back({scen.security_ids[i], fixed(c.per_asset_total[i], 2),
                                       pct(c.total > 0 ? c.per_asset_total[i] / c.total : 0.0, 1)});
                ct.rows.push_back({"total", fixed(c.total, 2), "100.0"});
                ct.rows.push_back({"BAS", fixed(c.spread_part, 2), pct(c.total > 0 ? c.spread_part / c.total : 0, 1)});
                ct.rows.push_back({"PI", fixed(c.impact_part, 2), pct(c.impact_share(), 1)});
                ct.rows.push_back({"relative_bps", bps(c.relative), ""});
                r.tables.push_back(std::move(ct));
            } catch (const ProhibitiveCostError&) {
                js["cost"] = nullptr;
                r.notes.push_back(set.label + ": schedule breaches a bucket trading limit, cost is prohibitive");
            }
        }
        jsets.push_back(js);
    }
    r.tables.push_back(std::move(plot));
    r.data["limit_sets"] = jsets;
    return r;
}

std::vector<double> load_series(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open series file '" + path + "'");
    std::vector<double> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const auto f = split_csv_line(t);
        const std::string cell = trim(f.back());
        try {
            out.push_back(parse_value(cell));
        } catch (const InputError&) {
            if (out.empty() && lineno == 1)
                continue;  // header
            throw InputError(path + ":" + std::to_string(lineno) + ": non-numeric value '" + cell + "'");
        }
    }
    if (out.empty())
        throw InputError("series file '" + path + "' has no data");
    return out;
}

Report cmd_stress_calibrate(const StressCalibrateOptions& opt)
{
    std::vector<std::string> inputs = opt.series;
    if (opt.gev_params)
        inputs.push_back(*opt.gev_params);
    if (opt.series.empty() && !opt.gev_params)
        throw InputError("stress calibration needs factor series or fitted GEV parameters");
    if (opt.block_len < 1)
        throw InputError("block length must be positive");

    std::map<int, GevParams> bypass;
    if (opt.gev_params) {
        std::ifstream in(*opt.gev_params);
        if (!in)
            throw InputError("cannot open GEV parameter file '" + *opt.gev_params + "'");
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            std::istringstream f(trim(hash == std::string::npos ? line : line.substr(0, hash)));
            std::string h;
            GevParams p;
            if (!(f >> h))
                continue;
            if (!(f >> p.mu >> p.sigma >> p.xi) || !(p.sigma > 0))
                throw InputError(*opt.gev_params + ":" + std::to_string(lineno) + ": expected 'horizon mu sigma xi'");
            bypass[parse_horizon(h)] = p;
        }
    }

    std::vector<std::vector<double>> series;
    for (const auto& p : opt.series)
        series.push_back(load_series(p));

    Report r;
    r.command = "stress-calibrate";
    r.data["command"] = "stress-calibrate";
    r.data["inputs_digest"] = inputs_digest(inputs);
    r.data["block_len"] = opt.block_len;
    r.data["kind"] = opt.kind == FactorKind::Mult ? "mult" : "add";
    r.data["return_times_years"] = opt.return_times_years;

    Table t{"stress scenarios", {"horizon", "method"}, {}};
    for (double y : opt.return_times_years)
        t.header.push_back(fixed(y, 3) + "Y");
    json jrows = json::array();

    for (int h : opt.horizons) {
        std::vector<FactorSample> samples;
        for (const auto& s : series) {
            FactorSample fs = make_factor_sample(s, h, opt.kind);
            samples.push_back(opt.reciprocal ? reciprocal(fs) : fs);
        }
        std::optional<FactorSample> pooled;
        if (!samples.empty())
            pooled = cross_section_aggregate(samples, AggregationMode::Pooling);
        std::optional<double> constant;
        if (pooled && !pooled->values.empty()) {
            const auto [lo, hi] = std::minmax_element(pooled->values.begin(), pooled->values.end());
            if (*hi == *lo)
                constant = *lo;
        }
        if (constant)
            r.notes.push_back(horizon_label(h) + ": constant factor sample, every stress equals " + fixed(*constant, 6));

        for (const auto& method : opt.methods) {
            std::vector<std::optional<double>> cells;
            std::string label;
            if (method == "hist") {
                label = "Historical";
                for (double y : opt.return_times_years) {
                    if (!pooled) {
                        cells.emplace_back();
                        continue;
                    }
                    const auto v = historical_stress(*pooled, years_to_days(y));
                    cells.push_back(v ? std::optional<double>(v->value) : std::nullopt);
                }
            } else if (method == "gev") {
                label = "BM/GEV";
                std::optional<GevParams> p;
                if (auto it = bypass.find(h); it != bypass.end()) {
                    p = it->second;
                } else if (pooled && !constant) {
                    try {
                        const auto maxima = samples.size() == 1 ? block_maxima(pooled->values, opt.block_len)
                                                                : averaged_block_maxima(samples, opt.block_len);
                        p = fit_gev(maxima).params;
                    } catch (const InputError& e) {
                        r.notes.push_back(horizon_label(h) + " GEV: " + e.what());
                    }
                }
                for (double y : opt.return_times_years) {
                    const double T = years_to_days(y);
                    if (constant && !bypass.count(h))
                        cells.push_back(*constant);
                    else if (!p || T <= opt.block_len)
                        cells.emplace_back();
                    else
                        cells.push_back(gev_stress(*p, opt.block_len, T).value);
                }
                if (p)
                    r.data["gev"][horizon_label(h)] = json{{"mu", p->mu}, {"sigma", p->sigma}, {"xi", p->xi}};
            } else if (method == "gpd") {
                label = "POT/GPD";
                std::optional<GpdParams> p;
                if (pooled && !constant) {
                    std::optional<double> u0 = opt.threshold;
                    if (!u0) {
                        const auto sug = suggest_threshold(mean_residual_life(pooled->values));
                        if (sug.found)
                            u0 = sug.u0;
                        else
                            r.notes.push_back(horizon_label(h) + " GPD: no threshold found by the mean-excess heuristic");
                    }
                    if (u0) {
                        try {
                            p = fit_gpd(pooled->values, *u0).params;
                        } catch (const InputError& e) {
                            r.notes.push_back(horizon_label(h) + " GPD: " + e.what());
                        }
                    }
                }
                for (double y : opt.return_times_years) {
                    if (constant) {
                        cells.push_back(*constant);
                        continue;
                    }
                    const double T = years_to_days(y);
                    if (!p || T * static_cast<double>(p->n_exceed) < static_cast<double>(p->n))
                        cells.emplace_back();
                    else
                        cells.push_back(gpd_stress(*p, T).value);
                }
                if (p)
                    r.data["gpd"][horizon_label(h)] =
                        json{{"u0", p->u0}, {"sigma", p->sigma}, {"xi", p->xi}, {"n", p->n}, {"n_exceed", p->n_exceed}};
            } else {
                throw InputError("unknown method '" + method + "'");
            }
            std::vector<std::string> row{horizon_label(h), label};
            json jvals = json::array();
            for (const auto& c : cells) {
                row.push_back(c ? fixed(*c, 2) : "");
                jvals.push_back(number_or_null(c));
            }
            t.rows.push_back(std::move(row));
            jrows.push_back(json{{"horizon", horizon_label(h)}, {"method", label}, {"values", jvals}});
        }
    }
    r.tables.push_back(std::move(t));
    r.data["rows"] = jrows;
    return r;
}

Report cmd_calibrate(const CalibrateOptions& opt)
{
    std::ifstream in(opt.trades);
    if (!in)
        throw InputError("cannot open trade file '" + opt.trades + "'");
    std::string line;
    std::size_t lineno = 0;
    std::map<std::string, std::size_t> col;
    std::vector<TradeObservation> obs;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const auto f = split_csv_line(t);
        if (col.empty()) {
            for (std::size_t i = 0; i < f.size(); ++i)
                col[lower(trim(f[i]))] = i;
            for (const char* k : {"cost", "spread", "participation", "risk"})
                if (!col.count(k))
                    throw InputError(opt.trades + ": missing column '" + k + "'");
            continue;
        }
        auto num = [&](const char* k) {
            const std::size_t i = col.at(k);
            if (i >= f.size())
                throw InputError(opt.trades + ":" + std::to_string(lineno) + ": missing field '" + k + "'");
            try {
                return parse_value(f[i]);
            } catch (const InputError&) {
                throw InputError(opt.trades + ":" + std::to_string(lineno) + ": field '" + k + "' is not a number");
            }
        };
        TradeObservation o;
        o.cost = num("cost");
        o.spread = num("spread");
        o.participation = num("participation");
        o.risk = num("risk");
        if (auto it = col.find("security_id"); it != col.end() && it->second < f.size())
            o.security_id = trim(f[it->second]);
        obs.push_back(std::move(o));
    }
    if (obs.empty())
        throw InputError(opt.trades + ": no trade observations");

    FitResult fit;
    const BondFitOptions bopt{opt.intercept};
    if (opt.model == "nls") {
        NlsOptions n;
        n.fixed_gamma = opt.gamma;
        fit = nls_fit_equity(obs, n);
    } else if (opt.model == "two-stage") {
        fit = opt.gamma ? bond_stage_two(obs, *opt.gamma, bopt) : two_stage_bond_fit(obs, bopt);
    } else if (opt.model == "grid") {
        std::vector<double> grid = opt.grid;
        if (grid.empty())
            for (int k = 1; k <= 40; ++k)
                grid.push_back(0.025 * k);
        fit = grid_search_gamma(obs, grid, bopt);
    } else {
        throw InputError("unknown model '" + opt.model + "' (nls, two-stage, grid)");
    }

    Report r;
    r.command = "calibrate";
    r.data["command"] = "calibrate";
    r.data["inputs_digest"] = inputs_digest({opt.trades});
    r.data["model"] = opt.model;
    Table t{"estimates", {"parameter", "value", "stderr", "t_stat", "p_value"}, {}};
    json est = json::array();
    for (const auto& e : fit.estimates) {
        t.rows.push_back({e.name, fixed(e.value, 6), fixed(e.stderr_, 6), fixed(e.t_stat, 2), fixed(e.p_value, 4)});
        est.push_back(json{{"name", e.name}, {"value", e.value}, {"stderr", e.stderr_}, {"t_stat", e.t_stat},
                           {"p_value", e.p_value}});
    }
    r.tables.push_back(std::move(t));
    r.tables.push_back(Table{"fit", {"statistic", "value"},
                             {{"R2", fixed(fit.r2, 6)},
                              {"R2_centered", fixed(fit.r2_c, 6)},
                              {"n_used", std::to_string(fit.n_used)},
                              {"n_excluded_negative", std::to_string(fit.n_excluded_negative)}}});
    r.data["estimates"] = est;
    r.data["r2"] = fit.r2;
    r.data["r2_c"] = fit.r2_c;
    r.data["n_used"] = fit.n_used;
    r.data["n_excluded_negative"] = fit.n_excluded_negative;
    r.notes = fit.warnings;
    return r;
}

Report cmd_frontier(const FrontierOptions& opt)
{
    std::vector<std::string> inputs{opt.portfolio, opt.correlation};
    if (opt.buckets)
        inputs.push_back(*opt.buckets);
    const LoadedPortfolio lp = load_portfolio(opt.portfolio);
    const BucketConfig cfg = bucket_config(opt.buckets);
    const auto profs = lp.profiles();
    const auto n = static_cast<Eigen::Index>(profs.size());

    Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(n, n);
    {
        std::ifstream in(opt.correlation);
        if (!in)
            throw InputError("cannot open correlation file '" + opt.correlation + "'");
        std::string line;
        Eigen::Index row = 0;
        while (std::getline(in, line)) {
            const std::string t = trim(line);
            if (t.empty() || t.front() == '#')
                continue;
            if (row >= n)
                throw InputError(opt.correlation + ": more rows than securities");
            const auto vals = parse_number_list(t);
            if (static_cast<Eigen::Index>(vals.size()) > n)
                throw InputError(opt.correlation + ": row longer than the number of securities");
            for (std::size_t j = 0; j < vals.size(); ++j)
                corr(row, static_cast<Eigen::Index>(j)) = vals[j];
            ++row;
        }
        if (row != n)
            throw InputError(opt.correlation + ": expected one row per security");
    }
    std::vector<double> vols;
    for (const auto& p : profs)
        vols.push_back(p.annual_vol);

    LiquidationProblem p;
    p.portfolio = lp.portfolio;
    p.redemption = opt.redemption_rate * lp.portfolio.tna();
    p.cov = covariance_from_vol_corr(vols, corr);
    p.profiles = profs;
    p.buckets = lp.buckets(cfg);
    p.limits = limits_from_buckets(profs, p.buckets);
    p.seed = opt.seed;
    p.starts = opt.starts;

    std::vector<double> lambdas = opt.lambdas;
    if (lambdas.empty())
        lambdas = {0.0, 1e-6, 3e-6, 1e-5, 3e-5, 1e-4, 3e-4, 1e-3, 1e-2};
    auto points = frontier(p, lambdas);
    flag_dominated(points);

    Report r;
    r.command = "frontier";
    r.data["command"] = "frontier";
    r.data["inputs_digest"] = inputs_digest(inputs);
    r.data["redemption"] = p.redemption;
    r.data["seed"] = opt.seed;
    Table t{"efficient frontier", {"lambda", "cost_bps", "TE_bps", "objective", "dominated"}, {}};
    for (const auto& h : lp.portfolio.holdings)
        t.header.push_back("q_" + h.security_id);
    Table plot{"frontier plot data", {"TE_bps", "cost_bps"}, {}};
    json jp = json::array();
    for (const auto& pt : points) {
        std::vector<std::string> row{fixed(pt.lambda, 8), fixed(to_bps(pt.cost), 3), fixed(to_bps(pt.tracking_error), 3),
                                     sci(pt.objective), pt.dominated ? "yes" : "no"};
        for (Shares q : pt.scenario.quantities)
            row.push_back(std::to_string(q));
        t.rows.push_back(std::move(row));
        plot.rows.push_back({fixed(to_bps(pt.tracking_error), 3), fixed(to_bps(pt.cost), 3)});
        jp.push_back(json{{"lambda", pt.lambda},
                          {"cost", pt.cost},
                          {"tracking_error", pt.tracking_error},
                          {"objective", pt.objective},
                          {"dominated", pt.dominated},
                          {"shares", pt.scenario.quantities}});
    }
    r.tables.push_back(std::move(t));
    r.tables.push_back(std::move(plot));
    r.data["points"] = jp;
    return r;
}

}  // namespace lst::report
