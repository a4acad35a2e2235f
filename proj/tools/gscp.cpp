// Command-line front end: simulate / detect / evaluate / benchmark.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gscp/evaluation.hpp"
#include "gscp/io.hpp"
#include "gscp/kernel.hpp"
#include "gscp/model_selection.hpp"
#include "gscp/synthetic.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace gscp;

namespace {

// ---------------------------------------------------------------- helpers

json read_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write to " + path + " failed");
}

PsdMode psd_mode_from_string(const std::string& s) {
    if (s == "exact") return PsdMode::exact;
    if (s == "ml") return PsdMode::ml;
    if (s == "filterbank") return PsdMode::filterbank;
    throw std::runtime_error("unknown psd mode: " + s);
}

GsoKind gso_from_string(const std::string& s) {
    if (s == "laplacian") return GsoKind::laplacian;
    if (s == "adjacency") return GsoKind::adjacency;
    throw std::runtime_error("unknown shift operator: " + s);
}

RobustRegression regression_from_string(const std::string& s) {
    if (s == "huber") return RobustRegression::huber;
    if (s == "lad") return RobustRegression::lad;
    throw std::runtime_error("unknown regression: " + s);
}

Psd psd_from_file(const std::string& path, int p) {
    json j = read_json(path);
    if (!j.contains("psd"))
        throw std::runtime_error(path + " has no \"psd\" field");
    std::vector<double> v = j["psd"].get<std::vector<double>>();
    if (static_cast<int>(v.size()) != p)
        throw std::runtime_error("psd length does not match the signal width");
    return Psd(Eigen::Map<Eigen::VectorXd>(v.data(), v.size()));
}

json result_to_json(const DetectionResult& r, bool kernel) {
    json out;
    out["change_points"] = r.segmentation.tau;
    out["d"] = r.segmentation.num_segments();
    if (!kernel) out["lambda"] = r.lambda;
    if (!kernel) {
        json sparse = json::array();
        for (int l = 0; l < r.means.rows(); ++l)
            for (int i = 0; i < r.means.cols(); ++i)
                if (r.means(l, i) != 0.0)
                    sparse.push_back(
                        {{"segment", l}, {"freq", i}, {"value", r.means(l, i)}});
        out["means_sparse"] = std::move(sparse);
    }
    out["cost_curve"] = r.cost_curve;
    json c;
    c["detector"] = r.diagnostics.detector;
    if (!r.diagnostics.psd_mode.empty()) c["psd_mode"] = r.diagnostics.psd_mode;
    if (r.diagnostics.c1 != 0 || r.diagnostics.c2 != 0) {
        c["c1"] = r.diagnostics.c1;
        c["c2"] = r.diagnostics.c2;
    }
    if (r.diagnostics.k1 != 0 || r.diagnostics.k2 != 0 || r.diagnostics.k3 != 0 ||
        kernel || r.diagnostics.detector == "variable_selection") {
        if (!kernel) c["k1"] = r.diagnostics.k1;
        c["k2"] = r.diagnostics.k2;
        c["k3"] = r.diagnostics.k3;
        c["relaxed_calibration"] = r.diagnostics.relaxed_calibration;
    }
    if (r.diagnostics.psd_condition != 0)
        c["psd_condition"] = r.diagnostics.psd_condition;
    out["constants"] = std::move(c);
    return out;
}

std::vector<int> interior_from_json(const json& j, int T) {
    std::vector<int> cps = j.get<std::vector<int>>();
    if (!cps.empty() && cps.back() == T) cps.pop_back();
    return cps;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string scenario = "I";
    int nodes = 500;
    std::uint64_t seed = 0;
    std::string out;
    double gap_mean = 20.0;
    int gap_floor = 30;
};

int cmd_simulate(const SimulateArgs& a) {
    ScenarioConfig cfg;
    cfg.scenario = scenario_from_string(a.scenario);
    cfg.num_nodes = a.nodes;
    cfg.seed = a.seed;
    cfg.gap_mean = a.gap_mean;
    cfg.gap_floor = a.gap_floor;

    ScenarioInstance instance = gen_scenario(cfg);
    fs::create_directories(a.out);

    write_csv_matrix((fs::path(a.out) / "signal.csv").string(),
                     instance.stream.values);
    write_edge_list((fs::path(a.out) / "edges.txt").string(), instance.graph);

    json truth;
    truth["change_points"] = instance.truth.change_points;
    truth["T"] = instance.truth.horizon;
    truth["seed"] = cfg.seed;
    std::vector<double> psd(instance.basis.dim());
    for (int i = 0; i < instance.basis.dim(); ++i)
        psd[i] = instance.truth.filter.response[i] * instance.truth.filter.response[i];
    truth["psd"] = psd;
    write_json((fs::path(a.out) / "truth.json").string(), truth);

    json manifest;
    manifest["scenario"] = to_string(cfg.scenario);
    manifest["nodes"] = cfg.num_nodes;
    manifest["seed"] = cfg.seed;
    manifest["gap_mean"] = cfg.gap_mean;
    manifest["gap_floor"] = cfg.gap_floor;
    manifest["er_prob"] = cfg.er_prob;
    manifest["ba_attachment"] = cfg.ba_attachment;
    manifest["coeff_range"] = {cfg.coeff_min, cfg.coeff_max};
    manifest["T"] = instance.truth.horizon;
    manifest["files"] = {"signal.csv", "edges.txt", "truth.json", "manifest.json"};
    write_json((fs::path(a.out) / "manifest.json").string(), manifest);
    return 0;
}

// ------------------------------------------------------------------ detect

struct DetectArgs {
    std::string signal, edges, out, method = "varsel";
    std::string psd_mode = "ml", psd_file, gso = "laplacian", regression = "huber";
    int window = 50;
    int dmax = 0;
    int min_segment = 1;
    int lambda_count = 30;
    double lambda_span = 1000.0;
    double lambda = 0.0;  // lasso override
    double c1 = 0.0, c2 = 0.0;
    double big_l = 1.0;
    int filters = 300, probes = 10;
    std::uint64_t seed = 0;
    bool strict_calibration = false;
};

int cmd_detect(const DetectArgs& a) {
    Eigen::MatrixXd m = read_csv_matrix(a.signal);
    if (m.rows() < 2 || m.cols() < 1)
        throw std::runtime_error("signal must have at least two rows");
    SignalStream y{m, Domain::vertex};
    const int p = y.width();
    const int T = y.length();

    Graph g = read_edge_list(a.edges, p);
    GsoKind gso = gso_from_string(a.gso);

    DetectionResult result;
    bool kernel = a.method.rfind("kernel-", 0) == 0;

    if (a.method == "varsel") {
        VarSelConfig cfg;
        cfg.lambda_count = a.lambda_count;
        cfg.lambda_span = a.lambda_span;
        cfg.max_segments = a.dmax;
        cfg.min_segment_length = a.min_segment;
        cfg.window = a.window;
        cfg.psd_mode = psd_mode_from_string(a.psd_mode);
        if (cfg.psd_mode == PsdMode::exact) {
            if (a.psd_file.empty())
                throw std::runtime_error("--psd-mode exact needs --psd-file");
            cfg.exact_psd = psd_from_file(a.psd_file, p);
        }
        cfg.filterbank_filters = a.filters;
        cfg.filterbank_probes = a.probes;
        cfg.seed = a.seed;
        cfg.regression = regression_from_string(a.regression);
        cfg.allow_relaxed_calibration = !a.strict_calibration;
        cfg.gso = gso;
        result = variable_selection_detector(y, g, cfg);
    } else if (a.method == "lasso") {
        SpectralBasis basis = eigendecompose(build_shift_operator(g, gso));
        SignalStream ytilde = gft(basis, y);
        Psd psd;
        FilterbankInfo fb;
        switch (psd_mode_from_string(a.psd_mode)) {
            case PsdMode::exact:
                if (a.psd_file.empty())
                    throw std::runtime_error("--psd-mode exact needs --psd-file");
                psd = psd_from_file(a.psd_file, p);
                break;
            case PsdMode::ml:
                psd = estimate_psd_ml(ytilde, a.window);
                break;
            case PsdMode::filterbank:
                psd = estimate_psd_filterbank(basis, y, a.window, a.filters,
                                              a.probes, a.seed, &fb);
                break;
        }
        SignalStream std_stream = standardize(ytilde, psd);
        PenaltyConstants dc = default_constants(p, T, a.big_l);
        double lambda = a.lambda > 0 ? a.lambda : dc.lambda;
        double c1 = a.c1 > 0 ? a.c1 : dc.c1;
        double c2 = a.c2 > 0 ? a.c2 : dc.c2;
        int dmax = a.dmax > 0 ? a.dmax : auto_max_segments(T, a.min_segment);
        result = lasso_detector(std_stream, lambda, c1, c2, dmax, a.min_segment);
        result.diagnostics.psd_mode = a.psd_mode;
        result.diagnostics.psd_condition = fb.condition;
    } else if (kernel) {
        KernelConfig cfg;
        if (a.method == "kernel-linear") {
            cfg.spec.kind = KernelKind::linear;
        } else if (a.method == "kernel-laplacian") {
            cfg.spec.kind = KernelKind::laplacian;
        } else if (a.method == "kernel-gaussian") {
            cfg.spec.kind = KernelKind::gaussian;
        } else {
            throw std::runtime_error("unknown method: " + a.method);
        }
        cfg.max_segments = a.dmax;
        cfg.min_segment_length = a.min_segment;
        cfg.regression = regression_from_string(a.regression);
        cfg.allow_relaxed_calibration = !a.strict_calibration;
        if (cfg.spec.kind == KernelKind::laplacian) {
            ShiftOperator s = build_shift_operator(g, gso);
            result = kernel_detector(y, cfg, &s);
        } else {
            result = kernel_detector(y, cfg);
        }
    } else {
        throw std::runtime_error("unknown method: " + a.method);
    }

    write_json(a.out, result_to_json(result, kernel));
    return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
    std::string pred, truth, out;
    int margin = 10;
};

int cmd_evaluate(const EvaluateArgs& a) {
    json jp = read_json(a.pred);
    json jt = read_json(a.truth);
    if (!jt.contains("T")) throw std::runtime_error(a.truth + " has no \"T\" field");
    int T = jt["T"].get<int>();
    std::vector<int> pred = interior_from_json(jp.at("change_points"), T);
    std::vector<int> truth = interior_from_json(jt.at("change_points"), T);

    json out;
    out["hausdorff"] = hausdorff(pred, truth, T);
    out["rand"] = rand_index(pred, truth, T);
    Prf prf = precision_recall_f1(pred, truth, a.margin);
    out["precision"] = prf.precision;
    out["recall"] = prf.recall;
    out["f1"] = prf.f1;
    out["margin"] = a.margin;
    out["T"] = T;

    std::cout << out.dump(2) << '\n';
    if (!a.out.empty()) write_json(a.out, out);
    return 0;
}

// --------------------------------------------------------------- benchmark

struct BenchmarkArgs {
    std::string scenario = "I";
    int nodes = 100;
    int instances = 10;
    std::uint64_t seed = 0;
    std::string detectors = "varsel";
    std::string out;
    int margin = 10;
    int window = 50;
    int dmax = 0;
    int filters = 300, probes = 10;
    std::string regression = "huber";
};

NamedDetector make_detector(const std::string& token, const BenchmarkArgs& a) {
    auto varsel = [&a](PsdMode mode, const std::string& name) {
        return NamedDetector{
            name, [mode, &a](const ScenarioInstance& inst) {
                VarSelConfig cfg;
                cfg.psd_mode = mode;
                cfg.window = a.window;
                cfg.max_segments = a.dmax;
                cfg.filterbank_filters = a.filters;
                cfg.filterbank_probes = a.probes;
                cfg.seed = a.seed;
                cfg.regression = regression_from_string(a.regression);
                if (mode == PsdMode::exact)
                    cfg.exact_psd =
                        Psd(inst.truth.filter.response.array().square().matrix());
                return variable_selection_detector(inst.stream, inst.basis, cfg);
            }};
    };
    auto kernel = [&a](KernelKind kind, const std::string& name) {
        return NamedDetector{
            name, [kind, &a](const ScenarioInstance& inst) {
                KernelConfig cfg;
                cfg.spec.kind = kind;
                cfg.max_segments = a.dmax;
                cfg.regression = regression_from_string(a.regression);
                if (kind == KernelKind::laplacian) {
                    ShiftOperator s = build_laplacian(inst.graph);
                    return kernel_detector(inst.stream, cfg, &s);
                }
                return kernel_detector(inst.stream, cfg);
            }};
    };

    if (token == "varsel" || token == "varsel:ml")
        return varsel(PsdMode::ml, "Variable Selection (ml PSD)");
    if (token == "varsel:exact") return varsel(PsdMode::exact, "Variable Selection");
    if (token == "varsel:filterbank")
        return varsel(PsdMode::filterbank, "Approx. Variable Selection");
    if (token == "kernel-linear") return kernel(KernelKind::linear, "Linear kernel");
    if (token == "kernel-laplacian")
        return kernel(KernelKind::laplacian, "Laplacian kernel");
    if (token == "kernel-gaussian")
        return kernel(KernelKind::gaussian, "Gaussian kernel");
    throw std::runtime_error("unknown detector: " + token);
}

int cmd_benchmark(const BenchmarkArgs& a) {
    ScenarioConfig base;
    base.scenario = scenario_from_string(a.scenario);
    base.num_nodes = a.nodes;
    base.seed = a.seed;

    std::vector<NamedDetector> detectors;
    std::stringstream tokens(a.detectors);
    std::string token;
    while (std::getline(tokens, token, ','))
        if (!token.empty()) detectors.push_back(make_detector(token, a));

    MetricsReport report = run_benchmark(base, detectors, a.instances, a.margin);
    std::string table = format_report(report);
    std::cout << table;

    if (!a.out.empty()) {
        fs::create_directories(a.out);
        json j;
        j["scenario"] = report.scenario;
        j["instances"] = report.instances;
        j["margin"] = report.margin;
        j["seed"] = a.seed;
        j["nodes"] = a.nodes;
        json ds = json::array();
        for (const DetectorMetrics& m : report.detectors) {
            json d;
            d["name"] = m.name;
            auto stat = [](const MetricStats& s) {
                return json{{"mean", s.mean}, {"std", s.stddev}};
            };
            d["hausdorff"] = stat(m.hausdorff);
            d["rand"] = stat(m.rand);
            d["precision"] = stat(m.precision);
            d["recall"] = stat(m.recall);
            d["f1"] = stat(m.f1);
            d["per_instance"] = {{"hausdorff", m.per_instance_hausdorff},
                                 {"rand", m.per_instance_rand},
                                 {"precision", m.per_instance_precision},
                                 {"recall", m.per_instance_recall},
                                 {"f1", m.per_instance_f1}};
            ds.push_back(std::move(d));
        }
        j["detectors"] = std::move(ds);
        write_json((fs::path(a.out) / "report.json").string(), j);

        std::ofstream txt(fs::path(a.out) / "report.txt", std::ios::binary);
        txt << table;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Change-point detection for streams of graph signals"};
    app.require_subcommand(1);

    SimulateArgs sa;
    CLI::App* sim = app.add_subcommand("simulate", "Generate a synthetic scenario");
    sim->add_option("--scenario", sa.scenario, "Scenario (I or II)");
    sim->add_option("--nodes", sa.nodes, "Graph size");
    sim->add_option("--seed", sa.seed, "RNG seed");
    sim->add_option("--gap-mean", sa.gap_mean, "Exponential gap mean");
    sim->add_option("--gap-floor", sa.gap_floor, "Minimum gap");
    sim->add_option("--out", sa.out, "Output directory")->required();

    DetectArgs da;
    CLI::App* det = app.add_subcommand("detect", "Detect change-points in a stream");
    det->add_option("--signal", da.signal, "Signal CSV (rows = timestamps)")
        ->required();
    det->add_option("--edges", da.edges, "Edge list")->required();
    det->add_option("--out", da.out, "Result JSON path")->required();
    det->add_option("--method", da.method,
                    "lasso | varsel | kernel-linear | kernel-laplacian | "
                    "kernel-gaussian")
        ->check(CLI::IsMember({"lasso", "varsel", "kernel-linear",
                               "kernel-laplacian", "kernel-gaussian"}));
    det->add_option("--psd-mode", da.psd_mode, "exact | ml | filterbank")
        ->check(CLI::IsMember({"exact", "ml", "filterbank"}));
    det->add_option("--psd-file", da.psd_file, "JSON with a \"psd\" array (exact mode)");
    det->add_option("--gso", da.gso, "laplacian | adjacency")
        ->check(CLI::IsMember({"laplacian", "adjacency"}));
    det->add_option("--window", da.window, "PSD estimation window");
    det->add_option("--dmax", da.dmax, "Largest model size (0 = automatic)");
    det->add_option("--min-segment", da.min_segment, "Minimum segment length");
    det->add_option("--lambda-count", da.lambda_count, "Grid size");
    det->add_option("--lambda-span", da.lambda_span, "Grid dynamic range");
    det->add_option("--lambda", da.lambda, "Fixed lambda (lasso)");
    det->add_option("--c1", da.c1, "Penalty constant override (lasso)");
    det->add_option("--c2", da.c2, "Penalty constant override (lasso)");
    det->add_option("--L", da.big_l, "Confidence parameter (> log 2)");
    det->add_option("--filters", da.filters, "Filter-bank size");
    det->add_option("--probes", da.probes, "Filter-bank noise probes");
    det->add_option("--seed", da.seed, "Filter-bank probe seed");
    det->add_option("--regression", da.regression, "huber | lad")
        ->check(CLI::IsMember({"huber", "lad"}));
    det->add_flag("--strict-calibration", da.strict_calibration,
                  "Fail instead of lowering the complexity cutoff");

    EvaluateArgs ea;
    CLI::App* eva = app.add_subcommand("evaluate", "Score a detection result");
    eva->add_option("--pred", ea.pred, "Detection result JSON")->required();
    eva->add_option("--truth", ea.truth, "Ground-truth JSON")->required();
    eva->add_option("--margin", ea.margin, "Match margin in timestamps");
    eva->add_option("--out", ea.out, "Also write metrics JSON here");

    BenchmarkArgs ba;
    CLI::App* ben = app.add_subcommand("benchmark", "Run detectors over instances");
    ben->add_option("--scenario", ba.scenario, "Scenario (I or II)");
    ben->add_option("--nodes", ba.nodes, "Graph size");
    ben->add_option("--instances", ba.instances, "Instance count");
    ben->add_option("--seed", ba.seed, "Base seed (instance i uses seed + i)");
    ben->add_option("--detectors", ba.detectors,
                    "Comma list: varsel[:exact|:ml|:filterbank], kernel-linear, "
                    "kernel-laplacian, kernel-gaussian");
    ben->add_option("--margin", ba.margin, "Match margin");
    ben->add_option("--window", ba.window, "PSD estimation window");
    ben->add_option("--dmax", ba.dmax, "Largest model size (0 = automatic)");
    ben->add_option("--filters", ba.filters, "Filter-bank size");
    ben->add_option("--probes", ba.probes, "Filter-bank noise probes");
    ben->add_option("--regression", ba.regression, "huber | lad");
    ben->add_option("--out", ba.out, "Directory for report.json / report.txt");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // help is success, bad usage is 2
    }

    try {
        if (sim->parsed()) return cmd_simulate(sa);
        if (det->parsed()) return cmd_detect(da);
        if (eva->parsed()) return cmd_evaluate(ea);
        if (ben->parsed()) return cmd_benchmark(ba);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
