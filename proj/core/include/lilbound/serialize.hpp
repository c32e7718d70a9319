#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lilbound/bound.hpp"
#include "lilbound/montecarlo.hpp"
#include "lilbound/norms.hpp"
#include "lilbound/phi.hpp"

namespace lilbound {

/// Header plus rows of already formatted cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string str() const;
    static CsvTable parse(std::string_view text);
    /// Numeric column by header name ("inf" allowed).
    std::vector<double> column(const std::string& name) const;
};

/*
 * JSON documents are columnar: every CSV column has a same-named array in
 * the JSON twin. Non-finite numbers are written as the strings "inf",
 * "-inf" and "nan", since JSON has no literal for them.
 */

CsvTable conjugate_csv(const ConjugateGrid& grid);
std::string conjugate_json(const ConjugateGrid& grid);

CsvTable bound_csv(const BoundReport& report);
std::string bound_json(const BoundReport& report);

CsvTable tails_csv(const TailEstimate& estimate);
std::string tails_json(const TailEstimate& estimate);

std::string calibration_json(const CalibrationResult& result);
std::string norms_json(const NormEstimate& estimate);

struct SandwichRow {
    double u = 0.0;
    double lower_bound = 0.0;
    double w_hat = 0.0;
    double ci_high = 0.0;
    double bound_at_C_hat = 0.0;
};

CsvTable sandwich_csv(const std::vector<SandwichRow>& rows);
std::string sandwich_json(const std::vector<SandwichRow>& rows, double C_hat);

/// Numeric array stored under a top-level key of a JSON document.
std::vector<double> json_number_array(std::string_view json, const std::string& key);
/// Numeric scalar stored under a top-level key.
double json_number(std::string_view json, const std::string& key);

}  // namespace lilbound
