#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lilbound/bound.hpp"
#include "lilbound/errors.hpp"
#include "lilbound/io.hpp"
#include "lilbound/montecarlo.hpp"
#include "lilbound/norms.hpp"
#include "lilbound/registry.hpp"
#include "lilbound/serialize.hpp"

namespace lilbound::cli {

namespace {

using nlohmann::json;

struct FlagSet {
    RunConfig values;
    std::string config_path;
    std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> appliers;
};

template <class T>
void bind(FlagSet& flags, CLI::Option* option, T RunConfig::*member) {
    flags.appliers.emplace_back(option, [&flags, member](RunConfig& cfg) { cfg.*member = flags.values.*member; });
}

void add_run_flags(CLI::App& app, FlagSet& f) {
    app.add_option("--config", f.config_path, "JSON run configuration; flags override its fields");
    bind(f, app.add_option("--model", f.values.model, "model id (see `models`)"), &RunConfig::model);
    bind(f, app.add_option("--phi", f.values.phi, "phi id; defaults to the model's own"), &RunConfig::phi);
    bind(f, app.add_option("--norming", f.values.norming, "norming id"), &RunConfig::norming);
    bind(f, app.add_option("--u", f.values.u_grid, "u grid: a,b,c | lin:lo:hi:n | log:lo:hi:n"), &RunConfig::u_grid);
    bind(f, app.add_option("-N,--horizon", f.values.horizon, "horizon N"), &RunConfig::horizon);
    bind(f, app.add_option("-M,--paths", f.values.paths, "simulated paths M"), &RunConfig::paths);
    bind(f, app.add_option("--seed", f.values.seed, "master seed"), &RunConfig::seed);
    bind(f, app.add_option("--ratios", f.values.ratio_grid, "partition ratio grid, same syntax as --u"),
         &RunConfig::ratio_grid);
    bind(f, app.add_option("--tol", f.values.tolerance, "Q-sum truncation tolerance"), &RunConfig::tolerance);
    bind(f, app.add_option("--C", f.values.C, "bound constant C"), &RunConfig::C);
    bind(f, app.add_option("--out-dir", f.values.output_dir, "output directory"), &RunConfig::output_dir);
    bind(f, app.add_option("--workers", f.values.workers, "worker threads (0 = LILBOUND_THREADS or auto)"),
         &RunConfig::workers);
    bind(f, app.add_flag("--exact", f.values.exact, "enumerate all 2^N paths instead of simulating"),
         &RunConfig::exact);
}

RunConfig resolve_config(const FlagSet& f) {
    RunConfig cfg;
    if (!f.config_path.empty()) cfg = load_config(f.config_path);
    for (const auto& [option, apply] : f.appliers)
        if (option->count() > 0) apply(cfg);
    cfg.validate();
    return cfg;
}

std::vector<double> u_grid_of(const RunConfig& cfg) {
    return cfg.u_grid.empty() ? default_u_grid() : parse_grid(cfg.u_grid);
}

BoundOptions bound_options_of(const RunConfig& cfg) {
    BoundOptions opts;
    opts.q_sum.tolerance = cfg.tolerance;
    if (!cfg.ratio_grid.empty()) opts.ratio_grid = parse_grid(cfg.ratio_grid);
    opts.workers = cfg.workers;
    return opts;
}

BoundProblem problem_of(const RunConfig& cfg, const ResolvedModel& model) {
    std::optional<PhiFunction> phi = cfg.phi.empty() ? model.phi : std::optional<PhiFunction>(resolve_phi(cfg.phi));
    if (!phi) throw DomainError("model '" + model.id + "' has no built-in phi; pass --phi");
    return BoundProblem{*phi, model.sigma, resolve_norming(cfg.norming), model.index_offset};
}

const MartingaleModel& simulatable(const ResolvedModel& model) {
    if (!model.model) throw DomainError("model '" + model.id + "' is a sigma profile only and cannot be simulated");
    return *model.model;
}

void write_output(const RunConfig& cfg, const std::string& name, const std::string& content) {
    std::filesystem::create_directories(cfg.output_dir);
    write_file_atomic(cfg.output_dir / name, content);
}

TailEstimate tails_for(const RunConfig& cfg, const MartingaleModel& model, const NormingSequence& v,
                       const std::vector<double>& u_grid) {
    if (cfg.exact) return exact_sup_tail_small(model, v, cfg.horizon, u_grid);
    return empirical_sup_tail(model, v, cfg.horizon, static_cast<std::uint64_t>(cfg.paths), u_grid,
                              static_cast<std::uint64_t>(cfg.seed), SimulationOptions{cfg.workers});
}

/// Largest exact single-index tail over candidate n0, or 0 when none is available.
std::vector<double> single_index_lower_bounds(const MartingaleModel& model, const NormingSequence& v,
                                              std::int64_t horizon, const std::vector<double>& u_grid) {
    std::vector<std::int64_t> candidates;
    for (std::int64_t n = model.first_index(); n <= std::min<std::int64_t>(horizon, 20); ++n) candidates.push_back(n);
    if (model.kind() == MartingaleModel::Kind::chaos && model.degree() == 1) {
        for (std::int64_t n = 32; n <= horizon; n *= 2) candidates.push_back(n);
        candidates.push_back(horizon);
    }
    std::vector<double> lower(u_grid.size(), 0.0);
    if (!model.rademacher()) return lower;
    for (std::int64_t n0 : candidates) {
        const auto tail = exact_single_n_tail(model, n0);
        for (std::size_t i = 0; i < u_grid.size(); ++i)
            lower[i] = std::max(lower[i], lower_bound_single_n(tail, n0, v, u_grid[i]));
    }
    return lower;
}

int cmd_conjugate(const std::string& phi_id, const std::string& u_spec, bool as_json, std::ostream& out) {
    const PhiFunction phi = resolve_phi(phi_id);
    const std::vector<double> us = parse_grid(u_spec);
    const ConjugateGrid grid = conjugate_grid(phi, us);
    out << (as_json ? conjugate_json(grid) : conjugate_csv(grid).str());
    return kOk;
}

int cmd_norm(const std::string& sample_path, const std::string& phi_id, const std::filesystem::path& out_dir,
             std::ostream& out) {
    const auto columns = read_csv_columns(sample_path, 1);
    const Sample sample(columns.at(0));
    const NormEstimate estimate = estimate_norms(sample, resolve_phi(phi_id));
    const std::string text = norms_json(estimate);
    std::filesystem::create_directories(out_dir);
    write_file_atomic(out_dir / "norm.json", text);
    out << text;
    return kOk;
}

int cmd_bound(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const ResolvedModel model = resolve_model(cfg.model);
    const BoundProblem problem = problem_of(cfg, model);
    const std::vector<double> us = u_grid_of(cfg);
    const BoundReport report = theorem_bound(problem, us, cfg.C, bound_options_of(cfg));
    write_output(cfg, "bound.csv", bound_csv(report).str());
    write_output(cfg, "bound.json", bound_json(report));
    if (report.all_divergent()) {
        err << "all candidate partitions diverge: the Q-sum is not summable for " << model.id << " with "
            << problem.norming.label() << "\n";
        return kAllDivergent;
    }
    const auto best = std::min_element(report.points.begin(), report.points.end(),
                                       [](const BoundPoint& a, const BoundPoint& b) { return a.bound < b.bound; });
    out << "u,bound,ratio_chosen,K_used\n"
        << format_double(best->u) << "," << format_double(best->bound) << "," << format_double(best->ratio) << ","
        << best->k_used << "\n";
    if (report.flagged()) err << "warning: some Q-sums did not reach tolerance " << cfg.tolerance << "\n";
    return kOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    const ResolvedModel resolved = resolve_model(cfg.model);
    const MartingaleModel& model = simulatable(resolved);
    const NormingSequence v = resolve_norming(cfg.norming);
    const TailEstimate est = tails_for(cfg, model, v, u_grid_of(cfg));
    write_output(cfg, "tails.csv", tails_csv(est).str());
    write_output(cfg, "tails.json", tails_json(est));
    out << "horizon " << est.horizon << ", paths " << est.paths << (est.exact ? " (exact)" : "") << "\n";
    return kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (!cfg.exact && cfg.paths < 1000) {
        err << "censored: " << cfg.paths << " paths cannot resolve tail counts of " << kCensorCount
            << " (need at least 1000)\n";
        return kCensored;
    }
    const ResolvedModel resolved = resolve_model(cfg.model);
    const MartingaleModel& model = simulatable(resolved);
    const BoundProblem problem = problem_of(cfg, resolved);
    const std::vector<double> us = u_grid_of(cfg);
    const TailEstimate est = tails_for(cfg, model, problem.norming, us);
    write_output(cfg, "tails.csv", tails_csv(est).str());
    write_output(cfg, "tails.json", tails_json(est));
    if (!est.exact && est.all_censored()) {
        err << "censored: every grid point has fewer than " << kCensorCount << " exceedances\n";
        return kCensored;
    }

    CalibrationOptions copts;
    copts.bound = bound_options_of(cfg);
    CalibrationResult cal;
    try {
        cal = calibrate_C(est, problem, copts);
    } catch (const CalibrationError& e) {
        err << "calibration failed: " << e.what() << "\n";
        return kDominanceFailed;
    }
    write_output(cfg, "calibration.json", calibration_json(cal));

    const std::vector<double> lower = single_index_lower_bounds(model, problem.norming, cfg.horizon, us);
    std::vector<SandwichRow> rows;
    bool ordered = true;
    for (std::size_t i = 0; i < us.size(); ++i) {
        SandwichRow row{us[i], lower[i], est.w_hat[i], est.ci_high[i], cal.bound_at_C_hat[i]};
        // A censored point estimate carries no information below 10/M, so the
        // lower bound is held against the upper confidence limit instead.
        const double estimate = !est.exact && est.censored(i) ? row.ci_high : row.w_hat;
        if (!(row.lower_bound <= estimate && row.w_hat <= row.ci_high && row.ci_high <= row.bound_at_C_hat)) {
            ordered = false;
            err << "sandwich violated at u = " << format_double(row.u) << "\n";
        }
        rows.push_back(row);
    }
    write_output(cfg, "sandwich.csv", sandwich_csv(rows).str());
    write_output(cfg, "sandwich.json", sandwich_json(rows, cal.C_hat));
    out << "C_hat " << format_double(cal.C_hat) << ", margin " << format_double(cal.margin) << "\n";
    return ordered ? kOk : kDominanceFailed;
}

int cmd_models(std::ostream& out) {
    auto section = [&out](const char* title, const std::vector<RegistryEntry>& entries) {
        out << title << ":\n";
        for (const auto& e : entries) out << "  " << e.pattern << "\n      " << e.description << "\n";
    };
    section("models", model_registry());
    section("phi", phi_registry());
    section("norming", norming_registry());
    return kOk;
}

}  // namespace

void RunConfig::validate() const {
    if (horizon < 1) throw DomainError("horizon N must be positive");
    if (paths < 1) throw DomainError("paths M must be positive");
    if (seed < 1) throw DomainError("seed must be positive");
    if (!(tolerance > 0.0 && tolerance < 1.0)) throw DomainError("tolerance must lie in (0, 1)");
    if (!(C > 0.0)) throw DomainError("C must be positive");
}

RunConfig load_config(const std::filesystem::path& path, RunConfig cfg) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw DomainError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    auto grid_text = [](const json& value) {
        if (value.is_string()) return value.get<std::string>();
        std::string out;
        for (const auto& x : value) out += (out.empty() ? "" : ",") + format_double(x.get<double>());
        return out;
    };
    try {
        if (j.contains("model")) cfg.model = j["model"].get<std::string>();
        if (j.contains("phi")) cfg.phi = j["phi"].get<std::string>();
        if (j.contains("norming")) cfg.norming = j["norming"].get<std::string>();
        if (j.contains("u_grid")) cfg.u_grid = grid_text(j["u_grid"]);
        if (j.contains("horizon")) cfg.horizon = j["horizon"].get<std::int64_t>();
        if (j.contains("paths")) cfg.paths = j["paths"].get<std::int64_t>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::int64_t>();
        if (j.contains("ratio_grid")) cfg.ratio_grid = grid_text(j["ratio_grid"]);
        if (j.contains("tolerance")) cfg.tolerance = j["tolerance"].get<double>();
        if (j.contains("C")) cfg.C = j["C"].get<double>();
        if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
        if (j.contains("workers")) cfg.workers = j["workers"].get<unsigned>();
        if (j.contains("exact")) cfg.exact = j["exact"].get<bool>();
    } catch (const json::exception& e) {
        throw DomainError("config " + path.string() + ": " + e.what());
    }
    return cfg;
}

std::vector<double> parse_grid(const std::string& spec) {
    if (spec.rfind("lin:", 0) == 0 || spec.rfind("log:", 0) == 0) {
        std::stringstream in(spec.substr(4));
        std::string lo, hi, count;
        if (!std::getline(in, lo, ':') || !std::getline(in, hi, ':') || !std::getline(in, count))
            throw DomainError("grid '" + spec + "' must look like lin:lo:hi:count");
        const double n = parse_double(count);
        if (!(n >= 1.0) || n != static_cast<double>(static_cast<std::size_t>(n)))
            throw DomainError("grid count must be a positive integer");
        const auto size = static_cast<std::size_t>(n);
        return spec[1] == 'i' ? lin_spaced(parse_double(lo), parse_double(hi), size)
                              : log_spaced(parse_double(lo), parse_double(hi), size);
    }
    std::vector<double> out;
    std::stringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(parse_double(item));
    }
    if (out.empty()) throw DomainError("empty grid");
    return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exponential tail bounds for normalized martingale maxima"};
    app.require_subcommand(1);

    std::string phi_id;
    std::string u_spec;
    bool as_json = false;
    auto* conjugate_cmd = app.add_subcommand("conjugate", "tabulate the Young-Fenchel conjugate of phi");
    conjugate_cmd->add_option("--phi", phi_id, "phi id")->required();
    conjugate_cmd->add_option("--u", u_spec, "u grid")->required();
    conjugate_cmd->add_flag("--json", as_json, "emit JSON instead of CSV");

    std::string sample_path;
    std::string norm_phi = "phi2";
    std::filesystem::path norm_out = ".";
    auto* norm_cmd = app.add_subcommand("norm", "estimate B(phi) and G(psi) norms of a sample");
    norm_cmd->add_option("--sample", sample_path, "single-column CSV of draws")->required();
    norm_cmd->add_option("--phi", norm_phi, "phi id");
    norm_cmd->add_option("--out-dir", norm_out, "output directory");

    FlagSet bound_flags, simulate_flags, verify_flags;
    auto* bound_cmd = app.add_subcommand("bound", "evaluate the Q-sum bound over the u grid");
    add_run_flags(*bound_cmd, bound_flags);
    auto* simulate_cmd = app.add_subcommand("simulate", "estimate sup-tail probabilities");
    add_run_flags(*simulate_cmd, simulate_flags);
    auto* verify_cmd = app.add_subcommand("verify", "simulate, calibrate C and emit the sandwich table");
    add_run_flags(*verify_cmd, verify_flags);
    auto* models_cmd = app.add_subcommand("models", "list model, phi and norming ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kDomain;
    }

    try {
        if (*conjugate_cmd) return cmd_conjugate(phi_id, u_spec, as_json, out);
        if (*norm_cmd) return cmd_norm(sample_path, norm_phi, norm_out, out);
        if (*bound_cmd) return cmd_bound(resolve_config(bound_flags), out, err);
        if (*simulate_cmd) return cmd_simulate(resolve_config(simulate_flags), out);
        if (*verify_cmd) return cmd_verify(resolve_config(verify_flags), out, err);
        if (*models_cmd) return cmd_models(out);
    } catch (const NonconvergenceError& e) {
        err << "nonconvergence: " << e.what() << " (residual " << e.residual() << ")\n";
        return kNonconvergence;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kDomain;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}

}  // namespace lilbound::cli
