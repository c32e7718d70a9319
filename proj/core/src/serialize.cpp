#include "lilbound/serialize.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "lilbound/errors.hpp"
#include "lilbound/io.hpp"

namespace lilbound {

namespace {

using nlohmann::json;

json number(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

json numbers(const std::vector<double>& xs) {
    json out = json::array();
    for (double x : xs) out.push_back(number(x));
    return out;
}

double read_number(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_double(j.get<std::string>());
    if (j.is_boolean()) return j.get<bool>() ? 1.0 : 0.0;
    throw DomainError("JSON value is not a number");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

template <class T>
std::vector<double> as_doubles(const std::vector<T>& xs) {
    return std::vector<double>(xs.begin(), xs.end());
}

}  // namespace

std::string CsvTable::str() const {
    std::ostringstream out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << "\n";
    };
    line(header);
    for (const auto& row : rows) line(row);
    return out.str();
}

CsvTable CsvTable::parse(std::string_view text) {
    CsvTable table;
    std::istringstream in{std::string(text)};
    std::string raw;
    bool first = true;
    while (std::getline(in, raw)) {
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream cells_in(raw);
        std::string cell;
        while (std::getline(cells_in, cell, ',')) cells.push_back(cell);
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

std::vector<double> CsvTable::column(const std::string& name) const {
    std::size_t idx = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) idx = i;
    if (idx == header.size()) throw DomainError("CSV has no column '" + name + "'");
    std::vector<double> out;
    for (const auto& row : rows) out.push_back(parse_double(row.at(idx)));
    return out;
}

CsvTable conjugate_csv(const ConjugateGrid& grid) {
    CsvTable t{{"u", "phi_star"}, {}};
    for (std::size_t i = 0; i < grid.u_values.size(); ++i)
        t.rows.push_back({format_double(grid.u_values[i]), format_double(grid.phi_star_values[i])});
    return t;
}

std::string conjugate_json(const ConjugateGrid& grid) {
    json j;
    j["u"] = numbers(grid.u_values);
    j["phi_star"] = numbers(grid.phi_star_values);
    j["max_residual"] = number(grid.max_residual);
    return dump(j);
}

CsvTable bound_csv(const BoundReport& report) {
    CsvTable t{{"u", "bound", "ratio_chosen", "K_used"}, {}};
    for (const auto& p : report.points)
        t.rows.push_back({format_double(p.u), format_double(p.bound), format_double(p.ratio), std::to_string(p.k_used)});
    return t;
}

std::string bound_json(const BoundReport& report) {
    std::vector<double> u, bound, raw, ratio, k_used, partial, residual, converged, divergent;
    for (const auto& p : report.points) {
        u.push_back(p.u);
        bound.push_back(p.bound);
        raw.push_back(p.raw_bound);
        ratio.push_back(p.ratio);
        k_used.push_back(static_cast<double>(p.k_used));
        partial.push_back(p.partial_sum);
        residual.push_back(p.residual);
        converged.push_back(p.converged ? 1.0 : 0.0);
        divergent.push_back(p.divergent ? 1.0 : 0.0);
    }
    json j;
    j["u"] = numbers(u);
    j["bound"] = numbers(bound);
    j["raw_bound"] = numbers(raw);
    j["ratio_chosen"] = numbers(ratio);
    j["K_used"] = numbers(k_used);
    j["partial_sum"] = numbers(partial);
    j["truncation_residual_bound"] = numbers(residual);
    j["converged"] = numbers(converged);
    j["divergent"] = numbers(divergent);
    j["C_used"] = number(report.C_used);
    j["tolerance"] = number(report.tolerance);
    j["ratio_grid"] = numbers(report.ratio_grid);
    j["phi"] = report.phi_label;
    j["sigma"] = report.sigma_label;
    j["norming"] = report.norming_label;
    j["all_divergent"] = report.all_divergent();
    j["flagged"] = report.flagged();
    return dump(j);
}

CsvTable tails_csv(const TailEstimate& est) {
    CsvTable t{{"u", "w_hat", "ci_low", "ci_high", "w_plus_hat", "ci_plus_low", "ci_plus_high", "count", "count_plus",
                "paths"},
               {}};
    if (est.exact) t.header.push_back("w_exact");
    for (std::size_t i = 0; i < est.u_grid.size(); ++i) {
        std::vector<std::string> row{format_double(est.u_grid[i]),     format_double(est.w_hat[i]),
                                     format_double(est.ci_low[i]),     format_double(est.ci_high[i]),
                                     format_double(est.w_plus_hat[i]), format_double(est.ci_plus_low[i]),
                                     format_double(est.ci_plus_high[i]), std::to_string(est.count[i]),
                                     std::to_string(est.count_plus[i]), std::to_string(est.paths)};
        if (est.exact) row.push_back(std::to_string(est.count[i]) + "/" + std::to_string(est.paths));
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string tails_json(const TailEstimate& est) {
    json j;
    j["u"] = numbers(est.u_grid);
    j["w_hat"] = numbers(est.w_hat);
    j["ci_low"] = numbers(est.ci_low);
    j["ci_high"] = numbers(est.ci_high);
    j["w_plus_hat"] = numbers(est.w_plus_hat);
    j["ci_plus_low"] = numbers(est.ci_plus_low);
    j["ci_plus_high"] = numbers(est.ci_plus_high);
    j["count"] = numbers(as_doubles(est.count));
    j["count_plus"] = numbers(as_doubles(est.count_plus));
    j["paths"] = est.paths;
    j["horizon"] = est.horizon;
    j["n_min"] = est.n_min;
    j["seed"] = est.seed;
    j["model"] = est.model_id;
    j["norming"] = est.norming_id;
    j["exact"] = est.exact;
    j["confidence"] = 0.99;
    return dump(j);
}

std::string calibration_json(const CalibrationResult& result) {
    json j;
    j["C_hat"] = number(result.C_hat);
    j["margin"] = number(result.margin);
    j["u"] = numbers(result.u_grid);
    j["bound_at_C_hat"] = numbers(result.bound_at_C_hat);
    j["ci_high"] = numbers(result.ci_high);
    j["evaluations"] = result.evaluations;
    return dump(j);
}

std::string norms_json(const NormEstimate& est) {
    json j;
    j["phi"] = est.phi_label;
    j["b_norm"] = number(est.b_norm);
    j["g_norm"] = number(est.g_norm);
    j["lambda_grid_min"] = number(est.lambda_grid_min);
    j["lambda_grid_max"] = number(est.lambda_grid_max);
    j["lambda_points"] = est.lambda_points;
    j["p_max"] = number(est.p_max);
    j["p_points"] = est.p_points;
    j["mean_abs"] = number(est.mean_abs);
    j["sample_size"] = est.sample_size;
    j["diagnostic"] = est.diagnostic;
    return dump(j);
}

CsvTable sandwich_csv(const std::vector<SandwichRow>& rows) {
    CsvTable t{{"u", "lower_bound", "w_hat", "ci_high", "bound_at_Chat_u"}, {}};
    for (const auto& r : rows)
        t.rows.push_back({format_double(r.u), format_double(r.lower_bound), format_double(r.w_hat),
                          format_double(r.ci_high), format_double(r.bound_at_C_hat)});
    return t;
}

std::string sandwich_json(const std::vector<SandwichRow>& rows, double C_hat) {
    std::vector<double> u, lower, w, ci, bound;
    for (const auto& r : rows) {
        u.push_back(r.u);
        lower.push_back(r.lower_bound);
        w.push_back(r.w_hat);
        ci.push_back(r.ci_high);
        bound.push_back(r.bound_at_C_hat);
    }
    json j;
    j["u"] = numbers(u);
    j["lower_bound"] = numbers(lower);
    j["w_hat"] = numbers(w);
    j["ci_high"] = numbers(ci);
    j["bound_at_Chat_u"] = numbers(bound);
    j["C_hat"] = number(C_hat);
    return dump(j);
}

std::vector<double> json_number_array(std::string_view text, const std::string& key) {
    const json j = json::parse(text);
    if (!j.contains(key) || !j.at(key).is_array()) throw DomainError("JSON has no array '" + key + "'");
    std::vector<double> out;
    for (const auto& x : j.at(key)) out.push_back(read_number(x));
    return out;
}

double json_number(std::string_view text, const std::string& key) {
    const json j = json::parse(text);
    if (!j.contains(key)) throw DomainError("JSON has no key '" + key + "'");
    return read_number(j.at(key));
}

}  // namespace lilbound
