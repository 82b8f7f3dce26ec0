// Command-line front end: simulate / estimate / classify / verify / experiment.
// Exit codes: 0 success, 2 configuration error, 3 not enough data for a
// single-shot estimate. All file outputs are written atomically.

#include <algorithm>
#include <clocale>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "recur/recur.hpp"

using nlohmann::json;

namespace {

struct insufficient_data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

recur::partition_scheme parse_scheme(const std::string& s) {
    if (s == "dyadic") return recur::partition_scheme::dyadic();
    const std::string prefix = "alphabet:";
    if (s.rfind(prefix, 0) == 0) {
        const double n = recur::parse_double(s.substr(prefix.size()), "scheme");
        if (!(n >= 1) || n != std::floor(n) || n > 1e15)
            throw std::invalid_argument("scheme: alphabet size must be a positive integer");
        return recur::partition_scheme::alphabet(static_cast<std::int64_t>(n));
    }
    throw std::invalid_argument("scheme must be 'dyadic' or 'alphabet:<n>'");
}

// "lo:hi:step", endpoints inclusive; each point recomputed as lo + i*step so
// the grid is identical on every run
std::vector<double> parse_grid(const std::string& s) {
    const auto parts = split_on(s, ':');
    if (parts.size() != 3) throw std::invalid_argument("cdf grid must be lo:hi:step");
    const double lo = recur::parse_double(parts[0], "cdf grid");
    const double hi = recur::parse_double(parts[1], "cdf grid");
    const double step = recur::parse_double(parts[2], "cdf grid");
    if (!(step > 0.0) || hi < lo)
        throw std::invalid_argument("cdf grid: need hi >= lo and step > 0");
    const auto n = static_cast<std::int64_t>(std::floor((hi - lo) / step + 1e-9));
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n) + 1);
    for (std::int64_t i = 0; i <= n; ++i) grid.push_back(lo + static_cast<double>(i) * step);
    return grid;
}

std::vector<double> parse_number_list(const std::string& s, const char* what) {
    std::vector<double> out;
    for (const auto& tok : split_on(s, ',')) out.push_back(recur::parse_double(tok, what));
    return out;
}

std::vector<std::vector<double>> parse_matrix(const std::string& s) {
    std::vector<std::vector<double>> m;
    for (const auto& row : split_on(s, ';')) m.push_back(parse_number_list(row, "matrix"));
    return m;
}

std::vector<recur::labeled_cell> parse_cells(const std::string& s) {
    std::vector<recur::labeled_cell> cells;
    for (const auto& chunk : split_on(s, ';')) {
        const auto f = split_on(chunk, ':');
        if (f.size() != 3)
            throw std::invalid_argument("cells must be anchor:width:p;anchor:width:p;...");
        cells.push_back({recur::parse_double(f[0], "cells"), recur::parse_double(f[1], "cells"),
                         recur::parse_double(f[2], "cells")});
    }
    return cells;
}

void check_keys(const json& obj, const char* what, const std::vector<std::string>& allowed) {
    if (!obj.is_object()) throw std::invalid_argument(std::string(what) + ": expected an object");
    for (const auto& item : obj.items())
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw std::invalid_argument(std::string(what) + ": unknown key '" + item.key() + "'");
}

const json& require_key(const json& obj, const char* key, const char* what) {
    if (!obj.contains(key))
        throw std::invalid_argument(std::string(what) + ": missing required key '" + key + "'");
    return obj.at(key);
}

recur::process_model process_from_json(const json& j) {
    const std::string name = require_key(j, "name", "process").get<std::string>();
    if (name == "bernoulli") {
        check_keys(j, "process", {"name", "p"});
        return recur::iid_bernoulli(j.value("p", 0.5));
    }
    if (name == "uniform") {
        check_keys(j, "process", {"name"});
        return recur::iid_uniform();
    }
    if (name == "constant") {
        check_keys(j, "process", {"name", "value"});
        return recur::constant_process(j.value("value", 0.0));
    }
    if (name == "markov") {
        check_keys(j, "process", {"name", "matrix", "emission"});
        const auto P = require_key(j, "matrix", "process").get<std::vector<std::vector<double>>>();
        std::vector<double> emission;
        if (j.contains("emission")) emission = j.at("emission").get<std::vector<double>>();
        return recur::markov_chain(P, emission);
    }
    if (name == "ar1") {
        check_keys(j, "process", {"name", "a", "sd", "bound"});
        return recur::clipped_ar1(j.value("a", 0.5), j.value("sd", 1.0), j.value("bound", 5.0));
    }
    if (name == "rotation") {
        check_keys(j, "process", {"name", "alpha", "threshold"});
        return recur::rotation_process(j.value("alpha", 0.6180339887498949),
                                       j.value("threshold", 0.5));
    }
    if (name == "labeled_cells") {
        check_keys(j, "process", {"name", "cells"});
        if (!j.contains("cells")) return recur::labeled_cell_process();
        std::vector<recur::labeled_cell> cells;
        for (const auto& c : j.at("cells")) {
            check_keys(c, "cell", {"anchor", "width", "p"});
            cells.push_back({require_key(c, "anchor", "cell").get<double>(),
                             require_key(c, "width", "cell").get<double>(),
                             require_key(c, "p", "cell").get<double>()});
        }
        return recur::labeled_cell_process(cells);
    }
    throw std::invalid_argument("process: unknown name '" + name + "'");
}

void emit_output(const std::optional<std::string>& out_path, const std::string& text) {
    if (out_path)
        recur::atomic_write_text(*out_path, text);
    else
        std::cout << text;
}

std::string self_header(const json& cfg) {
    return std::string("# tool recur_cli ") + recur::version + "\n# config " + cfg.dump() + "\n";
}

// ---------------------------------------------------------------- simulate

struct simulate_args {
    std::string process;
    std::int64_t length = 0;
    std::uint64_t seed = 0;
    std::optional<std::string> out;
    double p = 0.5;
    double value = 0.0;
    std::string matrix = "0.9,0.1;0.2,0.8";
    std::string emission;
    double a = 0.5;
    double sd = 1.0;
    double bound = 5.0;
    double alpha = 0.6180339887498949;
    double threshold = 0.5;
    std::string cells;
};

int run_simulate(const simulate_args& args) {
    if (args.length < 1) throw std::invalid_argument("simulate: length must be >= 1");

    json cfg{{"subcommand", "simulate"},
             {"process", args.process},
             {"length", args.length},
             {"seed", args.seed}};
    recur::process_model model;
    if (args.process == "bernoulli") {
        model = recur::iid_bernoulli(args.p);
        cfg["p"] = args.p;
    } else if (args.process == "uniform") {
        model = recur::iid_uniform();
    } else if (args.process == "constant") {
        model = recur::constant_process(args.value);
        cfg["value"] = args.value;
    } else if (args.process == "markov") {
        model = recur::markov_chain(parse_matrix(args.matrix),
                                    args.emission.empty()
                                        ? std::vector<double>{}
                                        : parse_number_list(args.emission, "emission"));
        cfg["matrix"] = args.matrix;
        if (!args.emission.empty()) cfg["emission"] = args.emission;
    } else if (args.process == "ar1") {
        model = recur::clipped_ar1(args.a, args.sd, args.bound);
        cfg["a"] = args.a;
        cfg["sd"] = args.sd;
        cfg["bound"] = args.bound;
    } else if (args.process == "rotation") {
        model = recur::rotation_process(args.alpha, args.threshold);
        cfg["alpha"] = args.alpha;
        cfg["threshold"] = args.threshold;
    } else if (args.process == "labeled_cells") {
        model = args.cells.empty() ? recur::labeled_cell_process()
                                   : recur::labeled_cell_process(parse_cells(args.cells));
        if (!args.cells.empty()) cfg["cells"] = args.cells;
    } else {
        throw std::invalid_argument("simulate: unknown process '" + args.process + "'");
    }

    std::string text = self_header(cfg);
    if (model.labeled) {
        const auto lp = model.sample_labeled(args.seed, args.length);
        for (std::size_t c = 0; c < lp.series.d; ++c)
            text += (c == 0 ? "x_1" : ",x_" + std::to_string(c + 1));
        text += ",y\n";
        for (std::size_t i = 0; i < lp.series.feature_count(); ++i) {
            for (std::size_t c = 0; c < lp.series.d; ++c)
                text += (c == 0 ? "" : ",") + recur::to_g17(lp.series.feature_row(i)[c]);
            text += ",";
            if (i < lp.series.past_length()) text += std::to_string(lp.series.labels[i]);
            text += "\n";
        }
    } else {
        const auto path = model.sample(args.seed, args.length);
        for (double v : path) text += recur::to_g17(v) + "\n";
    }
    emit_output(args.out, text);
    return 0;
}

// ---------------------------------------------------------------- estimate

struct estimate_args {
    std::string input;
    std::string scheme;
    std::optional<std::string> query;
    std::optional<std::string> cdf_grid;
    std::optional<double> clip;
    std::optional<std::string> out;
};

int run_estimate(const estimate_args& args) {
    const auto scheme = parse_scheme(args.scheme);
    json cfg{{"subcommand", "estimate"}, {"input", args.input}, {"scheme", args.scheme}};
    if (args.query) cfg["query"] = *args.query;
    if (args.cdf_grid) cfg["cdf_grid"] = *args.cdf_grid;
    if (args.clip) cfg["clip_D"] = *args.clip;

    const recur::past_window past{recur::read_series(args.input)};
    if (past.values.empty()) throw std::invalid_argument("estimate: input series is empty");
    const auto ladder = recur::build_ladder(past, scheme);
    const auto ec = recur::estimate_from_ladder(ladder, past);
    if (!ec)
        throw insufficient_data_error(
            "estimate: no recurrence fits in the window (series too short)");

    recur::regression_config rc;
    if (args.clip) rc = recur::regression_config{*args.clip, true};

    json out{{"version", recur::version}, {"config", cfg}};
    out["k"] = ec->k;
    out["lambdas"] = ladder.lambdas;
    out["taus"] = ladder.taus;
    out["mean"] = recur::regress(*ec, rc);
    if (args.query) {
        const auto q = recur::query_set::parse(*args.query);
        out["probs"] = json{{*args.query, recur::prob(*ec, q)}};
    }
    if (args.cdf_grid) {
        json arr = json::array();
        for (double u : parse_grid(*args.cdf_grid))
            arr.push_back(json{{"u", u}, {"F", recur::cdf(*ec, u)}});
        out["cdf"] = arr;
    }
    emit_output(args.out, out.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------- classify

struct classify_args {
    std::string input;
    std::string scheme;
    std::optional<std::string> out;
};

int run_classify(const classify_args& args) {
    const auto scheme = parse_scheme(args.scheme);
    const auto data = recur::read_labeled_csv(args.input);
    const auto est = recur::estimate_eta(data, scheme);
    if (!est)
        throw insufficient_data_error(
            "classify: no recurrence fits in the window (history too short)");
    json out{{"version", recur::version},
             {"config",
              json{{"subcommand", "classify"}, {"input", args.input}, {"scheme", args.scheme}}},
             {"eta", est->eta},
             {"k", est->k},
             {"decision", est->decision}};
    emit_output(args.out, out.dump(2) + "\n");
    return 0;
}

// ------------------------------------------------------------------ verify

int run_verify(const std::string& config_path, const std::optional<std::string>& out_path) {
    const auto cfg = json::parse(recur::read_text_file(config_path));
    const std::string mode = require_key(cfg, "mode", "verify").get<std::string>();
    std::string text = self_header(cfg);

    if (mode == "equivalence") {
        check_keys(cfg, "verify",
                   {"mode", "binary", "real", "master_seed", "min_len", "max_len"});
        const auto res = recur::run_equivalence(
            cfg.value("binary", std::int64_t{1000}), cfg.value("real", std::int64_t{200}),
            require_key(cfg, "master_seed", "verify").get<std::uint64_t>(),
            cfg.value("min_len", std::int64_t{8}), cfg.value("max_len", std::int64_t{512}));
        text += "checked " + std::to_string(res.checked) + "\n";
        text += "mismatches " + std::to_string(res.mismatches) + "\n";
        text += std::string("verdict ") + (res.ok() ? "PASS" : "FAIL") + "\n";
        emit_output(out_path, text);
        return res.ok() ? 0 : 1;
    }

    if (mode == "identity") {
        check_keys(cfg, "verify",
                   {"mode", "process", "scheme", "j", "atom_kind", "atom", "query", "paths",
                    "window_len", "se_multiple", "master_seed"});
        const auto model = process_from_json(require_key(cfg, "process", "verify"));
        const auto scheme = parse_scheme(require_key(cfg, "scheme", "verify").get<std::string>());
        recur::identity_check_config icc;
        icc.j = cfg.value("j", 2);
        const std::string kind = cfg.value("atom_kind", std::string("pattern"));
        if (kind == "pattern")
            icc.kind = recur::identity_check_config::atom_kind::pattern;
        else if (kind == "last_cell")
            icc.kind = recur::identity_check_config::atom_kind::last_cell;
        else
            throw std::invalid_argument("verify: atom_kind must be 'pattern' or 'last_cell'");
        icc.atom_pattern = require_key(cfg, "atom", "verify").get<std::vector<std::int64_t>>();
        icc.C = recur::query_set::parse(require_key(cfg, "query", "verify").get<std::string>());
        icc.paths = cfg.value("paths", std::int64_t{100000});
        icc.window_len = cfg.value("window_len", std::int64_t{512});
        icc.se_multiple = cfg.value("se_multiple", 3.0);
        const auto rep = recur::run_identity_check(
            model, scheme, icc, require_key(cfg, "master_seed", "verify").get<std::uint64_t>());

        text += "paths " + std::to_string(rep.n_paths) + "\n";
        text += "in_atom " + std::to_string(rep.n_atom) + "\n";
        text += "undetermined " + std::to_string(rep.undetermined) + "\n";
        text += "freq_matched " + recur::to_g17(rep.freq_tau) + "\n";
        text += "freq_next " + recur::to_g17(rep.freq_x0) + "\n";
        text += "se_pooled " + recur::to_g17(rep.se_pooled) + "\n";
        const bool pass = rep.verdict == recur::identity_check_report::verdict_t::pass;
        text += std::string("verdict ") +
                (pass ? "PASS"
                      : rep.verdict == recur::identity_check_report::verdict_t::fail
                            ? "FAIL"
                            : "INCONCLUSIVE") +
                "\n";
        emit_output(out_path, text);
        return pass ? 0 : 1;
    }

    throw std::invalid_argument("verify: mode must be 'equivalence' or 'identity'");
}

// -------------------------------------------------------------- experiment

int run_experiment(const std::string& config_path, const std::string& out_path) {
    const auto cfg = json::parse(recur::read_text_file(config_path));
    const std::string kind = require_key(cfg, "kind", "experiment").get<std::string>();
    const auto master = require_key(cfg, "master_seed", "experiment").get<std::uint64_t>();
    const auto seeds = require_key(cfg, "seeds", "experiment").get<std::int64_t>();
    const auto sizes = require_key(cfg, "sizes", "experiment").get<std::vector<std::int64_t>>();
    const auto model = process_from_json(require_key(cfg, "process", "experiment"));
    const auto scheme = parse_scheme(require_key(cfg, "scheme", "experiment").get<std::string>());

    recur::convergence_report rep;
    if (kind == "consistency") {
        check_keys(cfg, "experiment",
                   {"kind", "process", "scheme", "sizes", "seeds", "master_seed", "query",
                    "cdf_grid", "clip_bound"});
        recur::consistency_options opts;
        if (cfg.contains("query"))
            opts.query = recur::query_set::parse(cfg.at("query").get<std::string>());
        if (cfg.contains("cdf_grid")) opts.cdf_grid = parse_grid(cfg.at("cdf_grid").get<std::string>());
        if (cfg.contains("clip_bound")) opts.clip_bound = cfg.at("clip_bound").get<double>();
        rep = recur::consistency_experiment(model, scheme, sizes, seeds, master, opts);
    } else if (kind == "online") {
        check_keys(cfg, "experiment",
                   {"kind", "process", "scheme", "sizes", "seeds", "master_seed", "clip_bound"});
        std::optional<double> clip;
        if (cfg.contains("clip_bound")) clip = cfg.at("clip_bound").get<double>();
        rep = recur::online_experiment(model, scheme, sizes, seeds, master, clip);
    } else if (kind == "classification") {
        check_keys(cfg, "experiment",
                   {"kind", "process", "scheme", "sizes", "seeds", "master_seed"});
        rep = recur::classification_experiment(model, scheme, sizes, seeds, master);
    } else {
        throw std::invalid_argument(
            "experiment: kind must be 'consistency', 'online', or 'classification'");
    }

    recur::write_report_csv(out_path, rep,
                            {std::string("tool recur_cli ") + recur::version,
                             "config " + cfg.dump(), "master_seed " + std::to_string(master)});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    CLI::App app{"Recurrence-time conditional estimation toolkit"};
    app.set_version_flag("--version", std::string(recur::version));
    app.require_subcommand(1);

    simulate_args sim_args;
    auto* sim = app.add_subcommand("simulate", "Sample a stationary process to a series file");
    sim->add_option("--process", sim_args.process,
                    "bernoulli|uniform|constant|markov|ar1|rotation|labeled_cells")
        ->required();
    sim->add_option("--length", sim_args.length, "number of observations")->required();
    sim->add_option("--seed", sim_args.seed, "sampling seed")->required();
    sim->add_option("--out", sim_args.out, "output file (default stdout)");
    sim->add_option("--p", sim_args.p, "bernoulli success probability");
    sim->add_option("--value", sim_args.value, "constant value");
    sim->add_option("--matrix", sim_args.matrix, "markov rows 'a,b;c,d'");
    sim->add_option("--emission", sim_args.emission, "markov emissions 'v0,v1,...'");
    sim->add_option("--a", sim_args.a, "ar1 coefficient");
    sim->add_option("--sd", sim_args.sd, "ar1 innovation scale");
    sim->add_option("--bound", sim_args.bound, "ar1 clamp bound");
    sim->add_option("--alpha", sim_args.alpha, "rotation step");
    sim->add_option("--threshold", sim_args.threshold, "rotation indicator threshold");
    sim->add_option("--cells", sim_args.cells, "labeled cells 'anchor:width:p;...'");

    estimate_args est_args;
    auto* est = app.add_subcommand("estimate",
                                   "Estimate the conditional law at the end of a series");
    est->add_option("--input", est_args.input, "series file, most recent value last")->required();
    est->add_option("--scheme", est_args.scheme, "dyadic or alphabet:<n>")->required();
    est->add_option("--query", est_args.query, "set, e.g. \"{1}\" or \"(0,0.5];(1,inf)\"");
    est->add_option("--cdf-grid", est_args.cdf_grid, "lo:hi:step");
    est->add_option("--clip-D", est_args.clip, "clamp the mean estimate to [-D, D]");
    est->add_option("--out", est_args.out, "output file (default stdout)");

    classify_args cls_args;
    auto* cls = app.add_subcommand("classify", "Predict the label of the final unlabeled row");
    cls->add_option("--input", cls_args.input, "CSV with columns x_1..x_d,y")->required();
    cls->add_option("--scheme", cls_args.scheme, "dyadic or alphabet:<n>")->required();
    cls->add_option("--out", cls_args.out, "output file (default stdout)");

    std::string ver_config;
    std::optional<std::string> ver_out;
    auto* ver = app.add_subcommand("verify", "Cross-check the estimator against oracles");
    ver->add_option("--config", ver_config, "JSON config")->required();
    ver->add_option("--out", ver_out, "output file (default stdout)");

    std::string exp_config, exp_out;
    auto* exp = app.add_subcommand("experiment", "Run a convergence experiment to CSV");
    exp->add_option("--config", exp_config, "JSON config")->required();
    exp->add_option("--out", exp_out, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return run_simulate(sim_args);
        if (est->parsed()) return run_estimate(est_args);
        if (cls->parsed()) return run_classify(cls_args);
        if (ver->parsed()) return run_verify(ver_config, ver_out);
        if (exp->parsed()) return run_experiment(exp_config, exp_out);
    } catch (const insufficient_data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;  // unreachable: a subcommand is required
}
