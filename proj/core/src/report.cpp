#include "joulemark/report.hpp"

#include "joulemark/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <tuple>

namespace joulemark {

namespace {

using nlohmann::json;

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(Errc::io_failure, "cannot open " + path.string() + " for writing");
    out << content;
}

std::array<int, 4> tier_counts(const OutlierReport& report) {
    std::array<int, 4> counts{0, 0, 0, 0};
    for (const auto& e : report.entries)
        ++counts[static_cast<std::size_t>(e.tier)];
    return counts;
}

auto group_key(const std::string& problem, const std::string& machine, const std::string& config) {
    return std::tie(problem, machine, config);
}

// Fixed-width coordinate formatting for SVG output; data values elsewhere use
// the shortest round-trip form.
std::string svg_num(double v) {
    char buffer[48];
    std::snprintf(buffer, sizeof buffer, "%.2f", v);
    return buffer;
}

} // namespace

void write_profile_report(const std::vector<ProfileRecord>& profiles,
                          const std::vector<GroupOutliers>& outliers, const std::filesystem::path& dir,
                          double spearman_flag_threshold) {
    std::filesystem::create_directories(dir);

    std::vector<ProfileRecord> sorted = profiles;
    std::sort(sorted.begin(), sorted.end(), [](const ProfileRecord& a, const ProfileRecord& b) {
        return group_key(a.problem_id, a.machine, a.config_tag) <
               group_key(b.problem_id, b.machine, b.config_tag);
    });

    std::map<std::tuple<std::string, std::string, std::string>, std::array<int, 4>> counts_by_group;
    for (const auto& g : outliers)
        counts_by_group[{g.problem_id, g.machine, g.config_tag}] = tier_counts(g.report);

    std::string csv = "problem_id,machine,config_tag,fit_mode,n,slope_a_j_per_ms,sse,sigma_e,spearman,"
                      "spearman_flagged,outliers_low,outliers_medium,outliers_high\n";
    json jrows = json::array();
    for (const auto& rec : sorted) {
        std::array<int, 4> counts{0, 0, 0, 0};
        if (auto it = counts_by_group.find({rec.problem_id, rec.machine, rec.config_tag});
            it != counts_by_group.end())
            counts = it->second;
        const bool flagged = rec.profile.spearman < spearman_flag_threshold;

        csv += rec.problem_id + "," + rec.machine + "," + rec.config_tag + "," +
               to_string(rec.profile.fit_mode) + "," + std::to_string(rec.profile.n) + "," +
               format_double(rec.profile.slope_a) + "," + format_double(rec.profile.sse) + "," +
               format_double(rec.profile.sigma_e) + "," + format_double(rec.profile.spearman) + "," +
               (flagged ? "1" : "0") + "," + std::to_string(counts[1]) + "," + std::to_string(counts[2]) +
               "," + std::to_string(counts[3]) + "\n";

        json row = {{"problem_id", rec.problem_id},
                    {"machine", rec.machine},
                    {"config_tag", rec.config_tag},
                    {"fit_mode", to_string(rec.profile.fit_mode)},
                    {"n", rec.profile.n},
                    {"slope_a_j_per_ms", rec.profile.slope_a},
                    {"sse", rec.profile.sse},
                    {"sigma_e", rec.profile.sigma_e},
                    {"spearman", rec.profile.spearman},
                    {"spearman_flagged", flagged},
                    {"outliers", {{"low", counts[1]}, {"medium", counts[2]}, {"high", counts[3]}}}};
        if (rec.profile.fit_mode != FitMode::ols)
            row["diagnostic_only"] = true; // weighted fits are not trusted for outlier work
        jrows.push_back(std::move(row));
    }

    write_text(dir / "profile_report.csv", csv);
    json j;
    j["spearman_flag_threshold"] = spearman_flag_threshold;
    j["groups"] = std::move(jrows);
    write_text(dir / "profile_report.json", j.dump(2) + "\n");
}

void write_outlier_report_json(const std::vector<GroupOutliers>& outliers, const std::filesystem::path& path) {
    std::vector<GroupOutliers> sorted = outliers;
    std::sort(sorted.begin(), sorted.end(), [](const GroupOutliers& a, const GroupOutliers& b) {
        return group_key(a.problem_id, a.machine, a.config_tag) <
               group_key(b.problem_id, b.machine, b.config_tag);
    });

    json j = json::array();
    for (const auto& g : sorted) {
        json entries = json::array();
        for (const auto& e : g.report.entries) {
            entries.push_back({{"solution_id", e.solution_id},
                               {"residual_j", e.residual},
                               {"tier", to_string(e.tier)},
                               {"direction", to_string(e.direction)},
                               {"thr_low", e.thr_low},
                               {"thr_medium", e.thr_medium},
                               {"thr_high", e.thr_high}});
        }
        j.push_back({{"problem_id", g.problem_id},
                     {"machine", g.machine},
                     {"config_tag", g.config_tag},
                     {"sigma_e", g.report.sigma_e},
                     {"solutions", std::move(entries)}});
    }
    write_text(path, j.dump(2) + "\n");
}

void write_cross_machine_json(const std::vector<CrossMachineOutlier>& selected,
                              const std::filesystem::path& path) {
    json j = json::array();
    for (const auto& s : selected) {
        json tiers;
        for (const auto& [machine, tier] : s.tier_by_machine)
            tiers[machine] = to_string(tier);
        j.push_back({{"solution_id", s.solution_id},
                     {"direction_consistent", s.direction_consistent},
                     {"tier_by_machine", std::move(tiers)}});
    }
    write_text(path, j.dump(2) + "\n");
}

void emit_scatter_svg(const std::vector<ProfilePoint>& points, const ProblemProfile& profile,
                      const OutlierReport& outliers, const std::string& title,
                      const std::filesystem::path& path) {
    if (points.empty())
        throw Error(Errc::invalid_argument, "no points to plot");

    double t_max = 0;
    double c_max = 0;
    for (const auto& p : points) {
        t_max = std::max(t_max, p.t);
        c_max = std::max(c_max, p.c + p.c_sd);
    }
    c_max = std::max({c_max, profile.slope_a * t_max + 2 * profile.sigma_e, 1e-12});
    t_max = std::max(t_max, 1e-12);
    t_max *= 1.05;
    c_max *= 1.05;

    constexpr double width = 640;
    constexpr double height = 480;
    constexpr double ml = 70, mr = 20, mt = 40, mb = 55;
    const double pw = width - ml - mr;
    const double ph = height - mt - mb;
    const auto x = [&](double t) { return ml + t / t_max * pw; };
    const auto y = [&](double c) { return mt + ph - c / c_max * ph; };

    std::map<std::string, OutlierTier> tier_of;
    for (const auto& e : outliers.entries)
        tier_of[e.solution_id] = e.tier;

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + svg_num(width) +
           "\" height=\"" + svg_num(height) + "\" viewBox=\"0 0 " + svg_num(width) + " " + svg_num(height) +
           "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + svg_num(width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + title +
           "</text>\n";

    // frame and axis labels
    svg += "<rect x=\"" + svg_num(ml) + "\" y=\"" + svg_num(mt) + "\" width=\"" + svg_num(pw) +
           "\" height=\"" + svg_num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + svg_num(ml + pw / 2) + "\" y=\"" + svg_num(height - 12) +
           "\" text-anchor=\"middle\" font-size=\"13\">CPU time (ms)</text>\n";
    svg += "<text x=\"16\" y=\"" + svg_num(mt + ph / 2) +
           "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 " + svg_num(mt + ph / 2) +
           ")\">Energy (J)</text>\n";

    // axis ticks
    for (int i = 0; i <= 4; ++i) {
        const double tv = t_max * i / 4;
        const double cv = c_max * i / 4;
        svg += "<line x1=\"" + svg_num(x(tv)) + "\" y1=\"" + svg_num(mt + ph) + "\" x2=\"" + svg_num(x(tv)) +
               "\" y2=\"" + svg_num(mt + ph + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + svg_num(x(tv)) + "\" y=\"" + svg_num(mt + ph + 18) +
               "\" text-anchor=\"middle\" font-size=\"10\">" + svg_num(tv) + "</text>\n";
        svg += "<line x1=\"" + svg_num(ml - 5) + "\" y1=\"" + svg_num(y(cv)) + "\" x2=\"" + svg_num(ml) +
               "\" y2=\"" + svg_num(y(cv)) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + svg_num(ml - 8) + "\" y=\"" + svg_num(y(cv) + 3) +
               "\" text-anchor=\"end\" font-size=\"10\">" + svg_num(cv) + "</text>\n";
    }

    // fitted line through the origin and the +/-2 sigma_e band
    const auto clip_line = [&](double offset) {
        // segment of c = a t + offset inside the data window
        double t0 = 0, c0 = offset;
        if (c0 < 0 && profile.slope_a > 0) {
            t0 = -offset / profile.slope_a;
            c0 = 0;
        }
        double t1 = t_max, c1 = profile.slope_a * t_max + offset;
        if (c1 > c_max && profile.slope_a > 0) {
            t1 = (c_max - offset) / profile.slope_a;
            c1 = c_max;
        }
        if (t0 > t_max || t1 < 0)
            return std::string();
        return "<line x1=\"" + svg_num(x(t0)) + "\" y1=\"" + svg_num(y(c0)) + "\" x2=\"" + svg_num(x(t1)) +
               "\" y2=\"" + svg_num(y(c1)) + "\"";
    };
    if (auto seg = clip_line(0); !seg.empty())
        svg += seg + " stroke=\"#1f6fb2\" stroke-width=\"1.5\"/>\n";
    for (double sign : {+1.0, -1.0})
        if (auto seg = clip_line(sign * 2 * profile.sigma_e); !seg.empty())
            svg += seg + " stroke=\"#1f6fb2\" stroke-dasharray=\"6 4\"/>\n";

    // points; outliers get +/- c_sd error bars and a tier color
    for (const auto& p : points) {
        const OutlierTier tier = tier_of.count(p.solution_id) ? tier_of.at(p.solution_id) : OutlierTier::none;
        const char* fill = "#444444";
        if (tier == OutlierTier::low)
            fill = "#e0a800";
        else if (tier == OutlierTier::medium)
            fill = "#e06c00";
        else if (tier == OutlierTier::high)
            fill = "#c80000";
        if (tier != OutlierTier::none && p.c_sd > 0) {
            svg += "<line x1=\"" + svg_num(x(p.t)) + "\" y1=\"" + svg_num(y(std::max(0.0, p.c - p.c_sd))) +
                   "\" x2=\"" + svg_num(x(p.t)) + "\" y2=\"" + svg_num(y(std::min(c_max, p.c + p.c_sd))) +
                   "\" stroke=\"" + fill + "\"/>\n";
        }
        svg += "<circle cx=\"" + svg_num(x(p.t)) + "\" cy=\"" + svg_num(y(std::min(p.c, c_max))) +
               "\" r=\"3\" fill=\"" + fill + "\"/>\n";
    }

    svg += "</svg>\n";
    write_text(path, svg);
}

} // namespace joulemark
