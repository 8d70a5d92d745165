#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rvf/csv.hpp"
#include "rvf/dates.hpp"

namespace rvf::panel {

struct Bar {
    DateTime stamp;
    double price = 0.0;
};

struct IntradaySeries {
    std::string asset_id;
    std::vector<Bar> bars;  // strictly increasing timestamps, positive prices
};

struct DailyRecord {
    Date date;
    double rv = 0.0;
    double ret = 0.0;
};

struct ScalingMeta {
    double rv_scale = 1.0;  // sqrt(mean rv^2) over the scaling window
    double ret_mean = 0.0;
    double ret_std = 1.0;   // population std over the scaling window
};

struct DailyPanel {
    std::map<std::string, std::vector<DailyRecord>> assets;
    std::map<std::string, std::string> groups;       // optional labels
    std::map<std::string, ScalingMeta> scaling_meta; // present after scaling
    bool scaled = false;
    std::optional<DateRange> scale_window;

    const std::vector<DailyRecord>& series(const std::string& id) const {
        auto it = assets.find(id);
        if (it == assets.end()) throw std::runtime_error("unknown asset: " + id);
        return it->second;
    }
};

inline void require_scaled(const DailyPanel& p, const std::string& who) {
    if (!p.scaled) throw std::runtime_error(who + ": requires a scaled panel (got raw)");
}

inline void require_raw(const DailyPanel& p, const std::string& who) {
    if (p.scaled) throw std::runtime_error(who + ": requires a raw panel (got scaled)");
}

// ---------------------------------------------------------------------------
// Realized volatility from intraday bars
// ---------------------------------------------------------------------------

struct RvDay {
    Date date;
    double rv = 0.0;
};

struct DroppedDay {
    Date date;
    int bars_after_trim = 0;
};

struct RvResult {
    std::vector<RvDay> days;
    std::vector<DroppedDay> dropped;  // days with < 3 bars after trimming
};

// Daily rv = sqrt(sum of squared simple returns) over the session with
// trim_minutes removed from each end.
inline RvResult compute_rv(const IntradaySeries& series, int trim_minutes = 30) {
    if (series.bars.empty()) throw std::runtime_error("no data");
    for (std::size_t i = 1; i < series.bars.size(); ++i)
        if (!(series.bars[i - 1].stamp < series.bars[i].stamp))
            throw std::runtime_error("unsorted input");
    for (const auto& b : series.bars)
        if (!(b.price > 0.0) || !std::isfinite(b.price))
            throw std::runtime_error("nonpositive price in series " + series.asset_id);

    RvResult out;
    const int trim_s = trim_minutes * 60;
    std::size_t i = 0;
    while (i < series.bars.size()) {
        std::size_t j = i;
        while (j < series.bars.size() && series.bars[j].stamp.date == series.bars[i].stamp.date) ++j;
        const int open_s = series.bars[i].stamp.second_of_day;
        const int close_s = series.bars[j - 1].stamp.second_of_day;
        double sumsq = 0.0;
        int kept = 0;
        double prev = 0.0;
        for (std::size_t k = i; k < j; ++k) {
            const int s = series.bars[k].stamp.second_of_day;
            if (s < open_s + trim_s || s > close_s - trim_s) continue;
            if (kept > 0) {
                const double r = (series.bars[k].price - prev) / prev;
                sumsq += r * r;
            }
            prev = series.bars[k].price;
            ++kept;
        }
        if (kept >= 3)
            out.days.push_back({series.bars[i].stamp.date, std::sqrt(sumsq)});
        else
            out.dropped.push_back({series.bars[i].stamp.date, kept});
        i = j;
    }
    return out;
}

struct RetDay {
    Date date;
    double ret = 0.0;
};

// Close-to-close simple returns; the first day carries no return.
inline std::vector<RetDay> compute_daily_returns(const IntradaySeries& series) {
    if (series.bars.empty()) throw std::runtime_error("no data");
    for (std::size_t i = 1; i < series.bars.size(); ++i)
        if (!(series.bars[i - 1].stamp < series.bars[i].stamp))
            throw std::runtime_error("unsorted input");

    std::vector<std::pair<Date, double>> closes;  // (date, closing price)
    for (const auto& b : series.bars) {
        if (closes.empty() || closes.back().first != b.stamp.date)
            closes.emplace_back(b.stamp.date, b.price);
        else
            closes.back().second = b.price;
    }
    if (closes.size() < 2) throw std::runtime_error("insufficient history");

    std::vector<RetDay> out;
    out.reserve(closes.size() - 1);
    for (std::size_t t = 1; t < closes.size(); ++t)
        out.push_back({closes[t].first, (closes[t].second - closes[t - 1].second) / closes[t - 1].second});
    return out;
}

// ---------------------------------------------------------------------------
// Scaling
// ---------------------------------------------------------------------------

struct ExcludedAsset {
    std::string asset_id;
    std::string reason;
};

struct ScaleResult {
    DailyPanel panel;
    std::vector<ExcludedAsset> excluded;
};

// Per asset over the window: rv divided by sqrt(mean rv^2), ret standardized
// by mean and population std. The same constants apply to records outside the
// window. Population (divide-by-N) moments throughout.
inline ScaleResult scale_panel(const DailyPanel& input, const DateRange& window) {
    require_raw(input, "scale_panel");
    ScaleResult out;
    out.panel.scaled = true;
    out.panel.scale_window = window;

    for (const auto& [id, recs] : input.assets) {
        double sum_rv2 = 0.0, sum_ret = 0.0, sum_ret2 = 0.0;
        std::size_t n = 0;
        for (const auto& r : recs) {
            if (!window.contains(r.date)) continue;
            sum_rv2 += r.rv * r.rv;
            sum_ret += r.ret;
            sum_ret2 += r.ret * r.ret;
            ++n;
        }
        if (n < 30) {
            out.excluded.push_back({id, "insufficient records in scaling window"});
            continue;
        }
        const double dn = static_cast<double>(n);
        const double rv_scale = std::sqrt(sum_rv2 / dn);
        const double ret_mean = sum_ret / dn;
        const double ret_var = sum_ret2 / dn - ret_mean * ret_mean;
        if (!(ret_var > 0.0) || !(rv_scale > 0.0)) {
            out.excluded.push_back({id, "degenerate asset"});
            continue;
        }
        const double ret_std = std::sqrt(ret_var);

        std::vector<DailyRecord> scaled;
        scaled.reserve(recs.size());
        for (const auto& r : recs)
            scaled.push_back({r.date, r.rv / rv_scale, (r.ret - ret_mean) / ret_std});
        out.panel.assets.emplace(id, std::move(scaled));
        out.panel.scaling_meta[id] = {rv_scale, ret_mean, ret_std};
        auto g = input.groups.find(id);
        if (g != input.groups.end()) out.panel.groups.emplace(id, g->second);
    }
    return out;
}

// Inverse of scale_panel, using the recorded constants.
inline DailyPanel unscale_panel(const DailyPanel& input) {
    require_scaled(input, "unscale_panel");
    DailyPanel out;
    out.groups = input.groups;
    for (const auto& [id, recs] : input.assets) {
        auto it = input.scaling_meta.find(id);
        if (it == input.scaling_meta.end())
            throw std::runtime_error("unscale_panel: no scaling_meta for " + id);
        const auto& m = it->second;
        std::vector<DailyRecord> raw;
        raw.reserve(recs.size());
        for (const auto& r : recs)
            raw.push_back({r.date, r.rv * m.rv_scale, r.ret * m.ret_std + m.ret_mean});
        out.assets.emplace(id, std::move(raw));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Alignment
// ---------------------------------------------------------------------------

enum class AlignPolicy { drop_missing, intersect_dates };

struct AlignReport {
    AlignPolicy policy;
    std::vector<std::string> dropped_assets;                  // drop_missing only
    std::map<std::string, std::size_t> dropped_dates;         // per kept asset
};

struct AlignResult {
    DailyPanel panel;
    AlignReport report;
};

// intersect_dates: restrict every asset to the dates all assets share.
// drop_missing: the axis is the union of dates; assets not covering it fully
// are dropped.
inline AlignResult align_panel(const DailyPanel& input, AlignPolicy policy) {
    AlignResult out;
    out.report.policy = policy;
    out.panel.scaled = input.scaled;
    out.panel.scale_window = input.scale_window;

    std::set<Date> axis;
    bool first = true;
    for (const auto& [id, recs] : input.assets) {
        std::set<Date> dates;
        for (const auto& r : recs) dates.insert(r.date);
        if (policy == AlignPolicy::intersect_dates) {
            if (first) {
                axis = std::move(dates);
                first = false;
            } else {
                std::set<Date> keep;
                std::set_intersection(axis.begin(), axis.end(), dates.begin(), dates.end(),
                                      std::inserter(keep, keep.begin()));
                axis = std::move(keep);
            }
        } else {
            axis.insert(dates.begin(), dates.end());
        }
    }
    if (axis.empty()) throw std::runtime_error("no common dates");

    for (const auto& [id, recs] : input.assets) {
        std::vector<DailyRecord> kept;
        kept.reserve(recs.size());
        for (const auto& r : recs)
            if (axis.count(r.date)) kept.push_back(r);
        if (policy == AlignPolicy::drop_missing && kept.size() != axis.size()) {
            out.report.dropped_assets.push_back(id);
            continue;
        }
        out.report.dropped_dates[id] = recs.size() - kept.size();
        out.panel.assets.emplace(id, std::move(kept));
        auto g = input.groups.find(id);
        if (g != input.groups.end()) out.panel.groups.emplace(id, g->second);
        auto s = input.scaling_meta.find(id);
        if (s != input.scaling_meta.end()) out.panel.scaling_meta.emplace(id, s->second);
    }
    if (out.panel.assets.empty()) throw std::runtime_error("no common dates");
    return out;
}

// ---------------------------------------------------------------------------
// CSV / sidecar IO
// ---------------------------------------------------------------------------

// Intraday CSV: asset_id,timestamp,price (header required). Assets come back
// sorted by id; bar order within an asset follows file order.
inline std::vector<IntradaySeries> load_intraday_csv(const std::string& path) {
    auto t = csv::read_file(path);
    const int c_id = t.require_column("asset_id", path);
    const int c_ts = t.require_column("timestamp", path);
    const int c_px = t.require_column("price", path);

    std::map<std::string, IntradaySeries> by_id;
    for (const auto& row : t.rows) {
        auto& s = by_id[row[c_id]];
        s.asset_id = row[c_id];
        s.bars.push_back({DateTime::parse(row[c_ts]), csv::parse_double(row[c_px], "price")});
    }
    std::vector<IntradaySeries> out;
    out.reserve(by_id.size());
    for (auto& [id, s] : by_id) out.push_back(std::move(s));
    return out;
}

// Daily panel CSV: asset_id,date,rv,ret[,group]. A sidecar "<path>.meta.json"
// carries the scaled flag and scaling constants.
inline void save_panel_csv(const DailyPanel& p, const std::string& path) {
    csv::Writer w(path);
    const bool with_group = !p.groups.empty();
    std::vector<std::string> header = {"asset_id", "date", "rv", "ret"};
    if (with_group) header.push_back("group");
    w.row(header);
    for (const auto& [id, recs] : p.assets) {
        std::string group;
        if (with_group) {
            auto g = p.groups.find(id);
            group = g == p.groups.end() ? "" : g->second;
        }
        for (const auto& r : recs) {
            std::vector<std::string> row = {id, r.date.to_string(), csv::format_double(r.rv),
                                            csv::format_double(r.ret)};
            if (with_group) row.push_back(group);
            w.row(row);
        }
    }

    nlohmann::json meta;
    meta["scaled"] = p.scaled;
    if (p.scale_window)
        meta["scale_window"] = {{"start", p.scale_window->start.to_string()},
                                {"end", p.scale_window->end.to_string()}};
    if (!p.scaling_meta.empty()) {
        nlohmann::json sm = nlohmann::json::object();
        for (const auto& [id, m] : p.scaling_meta)
            sm[id] = {{"rv_scale", m.rv_scale}, {"ret_mean", m.ret_mean}, {"ret_std", m.ret_std}};
        meta["scaling_meta"] = sm;
    }
    std::ofstream mf(path + ".meta.json", std::ios::binary);
    mf << meta.dump(2) << '\n';
}

inline DailyPanel load_panel_csv(const std::string& path) {
    auto t = csv::read_file(path);
    const int c_id = t.require_column("asset_id", path);
    const int c_date = t.require_column("date", path);
    const int c_rv = t.require_column("rv", path);
    const int c_ret = t.require_column("ret", path);
    const int c_group = t.column("group");

    DailyPanel p;
    for (const auto& row : t.rows) {
        DailyRecord rec{Date::parse(row[c_date]), csv::parse_double(row[c_rv], "rv"),
                        csv::parse_double(row[c_ret], "ret")};
        if (!std::isfinite(rec.rv) || rec.rv < 0.0)
            throw std::runtime_error(path + ": invalid rv for " + row[c_id] + " " + row[c_date]);
        auto& recs = p.assets[row[c_id]];
        if (!recs.empty() && !(recs.back().date < rec.date))
            throw std::runtime_error(path + ": dates not strictly increasing for " + row[c_id]);
        recs.push_back(rec);
        if (c_group >= 0 && !row[c_group].empty()) p.groups[row[c_id]] = row[c_group];
    }
    if (p.assets.empty()) throw std::runtime_error(path + ": no data rows");

    std::ifstream mf(path + ".meta.json");
    if (mf) {
        nlohmann::json meta = nlohmann::json::parse(mf);
        p.scaled = meta.value("scaled", false);
        if (meta.contains("scale_window"))
            p.scale_window = DateRange{Date::parse(meta["scale_window"]["start"]),
                                       Date::parse(meta["scale_window"]["end"])};
        if (meta.contains("scaling_meta"))
            for (auto& [id, m] : meta["scaling_meta"].items())
                p.scaling_meta[id] = {m["rv_scale"], m["ret_mean"], m["ret_std"]};
    }
    return p;
}

}  // namespace rvf::panel
