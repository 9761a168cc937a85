// memnet_cli: benchmark, cube, simulate, readout, validate and replay.
//
// Exit status: 0 success, 1 usage or parse error (including I/O),
// 2 validation failure, 3 numerical failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "memnet/memnet.hpp"
#include "output_set.hpp"

namespace memnet::cli {
namespace {

using json = detail::ordered_json;

constexpr const char* kVersion = "0.1.0";
constexpr const char* kOutEnv = "MEMNET_OUT";
constexpr const char* kDefaultOut = "memnet-out";

// Everything a command hands back: files, resolved parameters, hashed inputs.
struct RunRecord {
    std::string command;
    json parameters = json::object();
    json inputs = json::array();
    OutputSet outputs;
};

fs::path default_out() {
    if (const char* env = std::getenv(kOutEnv); env && *env) return env;
    return kDefaultOut;
}

// Cheap early check so a long run does not end in an unwritable directory.
void require_writable_target(const fs::path& dir) {
    std::error_code ec;
    fs::path probe = fs::absolute(dir, ec);
    while (!probe.empty() && !fs::exists(probe, ec)) {
        if (probe == probe.parent_path()) break;
        probe = probe.parent_path();
    }
    if (!fs::is_directory(probe, ec)) {
        throw UsageError("output directory " + dir.string() + " cannot be created (" +
                         probe.string() + " is not a directory)");
    }
}

std::string read_input(RunRecord& rec, const std::string& path) {
    std::string text = read_file(path);
    rec.inputs.push_back({{"path", fs::absolute(path).lexically_normal().string()},
                          {"sha256", sha256_hex(text)}});
    return text;
}

Network load_network_file(RunRecord& rec, const std::string& path) {
    const std::string text = read_input(rec, path);
    try {
        return load(text);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    } catch (const ValidationError&) {
        std::cerr << path << ":\n";
        throw;
    }
}

DriveAssignment load_drives_file(RunRecord& rec, const std::string& path) {
    const std::string text = read_input(rec, path);
    try {
        return load_drives(text);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string abs_path(const std::string& path) {
    return fs::absolute(path).lexically_normal().string();
}

std::vector<NodeId> sorted_ids(const Network& net, NodeRole role) {
    auto ids = net.ids_with_role(role);
    std::sort(ids.begin(), ids.end());
    return ids;
}

// Keep every `stride`-th sample, always including the first.
SimulationTrace decimate(const SimulationTrace& trace, std::size_t stride) {
    if (stride <= 1) return trace;
    auto thin = [stride](const std::vector<double>& s) {
        std::vector<double> out;
        for (std::size_t n = 0; n < s.size(); n += stride) out.push_back(s[n]);
        return out;
    };
    SimulationTrace out;
    out.node_ids = trace.node_ids;
    out.times = thin(trace.times);
    for (const auto& s : trace.node_voltages) out.node_voltages.push_back(thin(s));
    for (const auto& s : trace.resistances) out.resistances.push_back(thin(s));
    for (const auto& s : trace.currents) out.currents.push_back(thin(s));
    for (const auto& s : trace.drops) out.drops.push_back(thin(s));
    return out;
}

std::string columns_csv(const std::vector<double>& times,
                        const std::vector<std::pair<std::string, const std::vector<double>*>>& cols) {
    std::string out = "t";
    for (const auto& c : cols) out += "," + c.first;
    out += '\n';
    for (std::size_t n = 0; n < times.size(); ++n) {
        append_number(out, times[n]);
        for (const auto& c : cols) {
            out += ',';
            append_number(out, (*c.second)[n]);
        }
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dissimilarity analysis shared by cube and simulate.

struct AnalysisOptions {
    std::string exclude_dc = "resistances";  // resistances | all | none
    std::string basis = "phase-shifted";
    double voltage_delta_threshold = 0.1;
    bool no_spectra = false;
};

Basis parse_basis(const std::string& s) {
    if (s == "direct") return Basis::Direct;
    if (s == "phase-shifted") return Basis::PhaseShifted;
    throw UsageError("unknown basis \"" + s + "\" (direct, phase-shifted)");
}

void validate_exclude_dc(const std::string& s) {
    if (s != "resistances" && s != "all" && s != "none") {
        throw UsageError("--exclude-dc must be resistances, all or none");
    }
}

std::vector<double> window(const std::vector<double>& s, std::size_t n) {
    return {s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n)};
}

struct AnalysisResult {
    std::vector<DissimilarityReport> voltages;
    std::vector<DissimilarityReport> resistances;
};

// Inputs are the external node voltages. The window is the first `steps`
// samples, i.e. the periodic span [0, steps*dt) without the closing sample.
AnalysisResult analyze(const Network& net, const SimulationTrace& trace, double dt,
                       const AnalysisOptions& opt, OutputSet& files) {
    const Basis basis = parse_basis(opt.basis);
    const bool dc_v = opt.exclude_dc == "all";
    const bool dc_r = opt.exclude_dc != "none";
    const std::size_t n = trace.samples() - 1;
    if (n < 2) throw UsageError("analysis needs at least two steps");

    std::vector<Spectrum> inputs;
    for (NodeId id : sorted_ids(net, NodeRole::External)) {
        inputs.push_back(dft(window(trace.voltage_of(id), n), dt));
        if (!opt.no_spectra) {
            files.add("spectra/input_node_" + std::to_string(id) + ".csv",
                      spectrum_to_csv(inputs.back()));
        }
    }

    AnalysisResult res;
    auto run = [&](int id, const std::string& name, const std::vector<double>& series, bool dc,
                   std::vector<DissimilarityReport>& into) {
        const Spectrum out = dft(window(series, n), dt);
        into.push_back(analyze_output(id, out, inputs, dc, basis));
        if (!opt.no_spectra) {
            files.add("spectra/" + name + ".csv", spectrum_to_csv(out));
            files.add("spectra/" + name + "_fit.csv",
                      spectrum_to_csv(fitted_spectrum(into.back(), inputs, basis)));
        }
    };
    for (NodeId id : sorted_ids(net, NodeRole::Internal)) {
        run(id, "V_node_" + std::to_string(id), trace.voltage_of(id), dc_v, res.voltages);
    }
    for (std::size_t k = 0; k < net.links.size(); ++k) {
        if (net.links[k].params.is_passive()) continue;
        run(static_cast<int>(k), "R_link_" + std::to_string(k), trace.resistances[k], dc_r,
            res.resistances);
    }

    auto ranked = [](const std::vector<DissimilarityReport>& reports) {
        std::vector<DissimilarityReport> out;
        for (int id : rank_outputs(reports)) {
            out.push_back(*std::find_if(reports.begin(), reports.end(),
                                        [id](const auto& r) { return r.output_id == id; }));
        }
        return out;
    };
    const auto v_ranked = ranked(res.voltages);
    const auto r_ranked = ranked(res.resistances);
    files.add("delta_voltages.csv", reports_to_csv(v_ranked));
    files.add("delta_resistances.csv", reports_to_csv(r_ranked));

    double max_v = 0.0;
    for (const auto& r : res.voltages) max_v = std::max(max_v, r.delta);
    double max_r = 0.0;
    for (const auto& r : res.resistances) max_r = std::max(max_r, r.delta);

    json doc;
    doc["window_samples"] = n;
    doc["dt"] = dt;
    doc["basis"] = basis_name(basis);
    doc["exclude_dc_voltages"] = dc_v;
    doc["exclude_dc_resistances"] = dc_r;
    doc["inputs"] = sorted_ids(net, NodeRole::External);
    doc["max_voltage_delta"] = max_v;
    doc["max_resistance_delta"] = max_r;
    doc["voltage_delta_threshold"] = opt.voltage_delta_threshold;
    doc["voltages_below_threshold"] = max_v <= opt.voltage_delta_threshold;
    auto& vj = doc["voltages"] = json::array();
    for (const auto& r : v_ranked) vj.push_back(report_to_json(r));
    auto& rj = doc["resistances"] = json::array();
    for (const auto& r : r_ranked) rj.push_back(report_to_json(r));
    files.add("dissimilarity.json", doc.dump(1) + "\n");

    std::cout << "voltage delta max " << format_number(max_v)
              << (max_v <= opt.voltage_delta_threshold ? " (below " : " (ABOVE ")
              << format_number(opt.voltage_delta_threshold) << ")\n"
              << "resistance delta max " << format_number(max_r) << '\n';
    return res;
}

// ---------------------------------------------------------------------------
// Commands. Each fills a RunRecord; committing and the manifest happen later.

struct BenchmarkOptions {
    std::vector<double> frequencies{0.2, 1.0, 5.0};
    double amplitude = 2.0;
    double dt = 1e-4;
    double duration = 15.0;
    std::size_t stride = 10;
    std::size_t jobs = 1;
    bool plot_script = false;
};

std::string frequency_tag(double f) { return "f" + format_number(f) + "Hz"; }

void cmd_benchmark(const BenchmarkOptions& o, RunRecord& rec) {
    if (o.frequencies.empty()) throw UsageError("--frequencies must not be empty");
    if (!(o.dt > 0.0) || !(o.duration > 0.0) || o.stride == 0) {
        throw UsageError("--dt and --duration must be positive, --stride at least 1");
    }
    rec.parameters = {{"frequencies", o.frequencies}, {"amplitude", o.amplitude},
                      {"dt", o.dt},                   {"duration", o.duration},
                      {"stride", o.stride},           {"jobs", o.jobs},
                      {"plot-script", o.plot_script}};

    const Network net = build_series_benchmark();
    std::size_t mem = 0;
    while (net.links[mem].params.is_passive()) ++mem;
    const NodeId ext = sorted_ids(net, NodeRole::External).front();
    SimulationConfig cfg;
    cfg.dt = o.dt;
    cfg.n_steps = static_cast<std::size_t>(std::llround(o.duration / o.dt));

    auto run_one = [&](double f) {
        return simulate(net, {{ext, Signal::cosine(o.amplitude, f)}}, cfg);
    };
    std::vector<SimulationTrace> traces(o.frequencies.size());
    const std::size_t jobs = std::max<std::size_t>(1, std::min(o.jobs, traces.size()));
    std::vector<std::future<void>> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
        workers.push_back(std::async(jobs == 1 ? std::launch::deferred : std::launch::async, [&, w] {
            for (std::size_t i = w; i < traces.size(); i += jobs) traces[i] = run_one(o.frequencies[i]);
        }));
    }
    for (auto& w : workers) w.get();

    const auto& p = net.links[mem].params;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        const auto t = decimate(traces[i], o.stride);
        const std::string tag = "benchmark_" + frequency_tag(o.frequencies[i]);
        rec.outputs.add(tag + "_trace.csv", trace_to_csv(t));
        rec.outputs.add(tag + "_overlay.csv",
                        columns_csv(t.times, {{"V_ext", &t.voltage_of(ext)},
                                              {"V_M", &t.drops[mem]},
                                              {"R_M", &t.resistances[mem]}}));
        rec.outputs.add(tag + "_loop.csv",
                        columns_csv(t.times, {{"V_M", &t.drops[mem]}, {"I_M", &t.currents[mem]}}));

        const auto& r = traces[i].resistances[mem];
        const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
        std::cout << frequency_tag(o.frequencies[i]) << ": R_M in [" << format_number(*lo) << ", "
                  << format_number(*hi) << "]" << (*lo <= p.r_min ? " hits r_min" : "")
                  << (*hi >= p.r_max ? " hits r_max" : "") << '\n';
    }

    if (o.plot_script) {
        std::string py =
            "import csv, sys\nimport matplotlib.pyplot as plt\n\n"
            "def load(path):\n"
            "    with open(path) as f:\n"
            "        rows = list(csv.DictReader(f))\n"
            "    return {k: [float(r[k]) for r in rows] for k in rows[0]}\n\n"
            "tags = [";
        for (double f : o.frequencies) py += "\"" + frequency_tag(f) + "\", ";
        py += "]\nfig, axes = plt.subplots(len(tags), 2, figsize=(10, 3 * len(tags)), squeeze=False)\n"
              "for row, tag in zip(axes, tags):\n"
              "    o = load(f\"benchmark_{tag}_overlay.csv\")\n"
              "    l = load(f\"benchmark_{tag}_loop.csv\")\n"
              "    row[0].plot(o[\"t\"], [r / 5000 for r in o[\"R_M\"]], label=\"R_M / 5 kOhm\")\n"
              "    row[0].plot(o[\"t\"], [v / 0.5 for v in o[\"V_M\"]], label=\"V_M / 0.5 V\")\n"
              "    row[0].plot(o[\"t\"], o[\"V_ext\"], label=\"V_ext / 1 V\")\n"
              "    row[0].set_title(tag)\n    row[0].legend()\n"
              "    row[1].plot(l[\"V_M\"], l[\"I_M\"])\n"
              "    row[1].set_xlabel(\"V_M\")\n    row[1].set_ylabel(\"I\")\n"
              "fig.tight_layout()\nfig.savefig(sys.argv[1] if len(sys.argv) > 1 else \"benchmark.png\")\n";
        rec.outputs.add("plot_benchmark.py", py);
    }
}

struct SimOptions {
    double dt = 0.006;
    std::size_t steps = 500;
    double fp_tolerance = 1e-9;
    int fp_max_iterations = 100;
    double kcl_tolerance = 1e-8;

    [[nodiscard]] SimulationConfig config() const {
        SimulationConfig c;
        c.dt = dt;
        c.n_steps = steps;
        c.fp_tolerance = fp_tolerance;
        c.fp_max_iterations = fp_max_iterations;
        c.kcl_tolerance = kcl_tolerance;
        if (!c.valid()) throw UsageError("invalid simulation settings (dt, steps, tolerances)");
        return c;
    }

    void record(json& params) const {
        params["dt"] = dt;
        params["steps"] = steps;
        params["fp-tolerance"] = fp_tolerance;
        params["fp-max-iterations"] = fp_max_iterations;
        params["kcl-tolerance"] = kcl_tolerance;
    }
};

void record_analysis(const AnalysisOptions& a, json& params) {
    params["exclude-dc"] = a.exclude_dc;
    params["basis"] = a.basis;
    params["voltage-delta-threshold"] = a.voltage_delta_threshold;
    params["no-spectra"] = a.no_spectra;
}

struct CubeOptions {
    std::string network;
    std::vector<double> frequencies{2.0, 3.0, 5.0};
    double amplitude = 1.0;
    SimOptions sim;
    AnalysisOptions analysis;
    bool plot_script = false;
};

void cmd_cube(const CubeOptions& o, RunRecord& rec) {
    validate_exclude_dc(o.analysis.exclude_dc);
    parse_basis(o.analysis.basis);
    if (!o.network.empty()) rec.parameters["network"] = abs_path(o.network);
    rec.parameters["frequencies"] = o.frequencies;
    rec.parameters["amplitude"] = o.amplitude;
    o.sim.record(rec.parameters);
    record_analysis(o.analysis, rec.parameters);
    rec.parameters["plot-script"] = o.plot_script;

    const Network net = o.network.empty() ? build_cube() : load_network_file(rec, o.network);
    const auto externals = sorted_ids(net, NodeRole::External);
    if (externals.size() != o.frequencies.size()) {
        throw UsageError("network has " + std::to_string(externals.size()) +
                         " external nodes but " + std::to_string(o.frequencies.size()) +
                         " frequencies were given");
    }
    DriveAssignment drives;
    for (std::size_t i = 0; i < externals.size(); ++i) {
        drives[externals[i]] = Signal::sine(o.amplitude, o.frequencies[i]);
    }
    const SimulationTrace trace = simulate(net, drives, o.sim.config());
    rec.outputs.add("trace.csv", trace_to_csv(trace));
    rec.outputs.add("trace.json", trace_to_json(net, trace));
    rec.outputs.add("drives.json", store_drives(drives));

    std::vector<std::pair<std::string, const std::vector<double>*>> in_cols, v_cols, r_cols;
    for (NodeId id : externals) in_cols.emplace_back("V_node_" + std::to_string(id), &trace.voltage_of(id));
    for (NodeId id : sorted_ids(net, NodeRole::Internal)) {
        v_cols.emplace_back("V_node_" + std::to_string(id), &trace.voltage_of(id));
    }
    for (std::size_t k = 0; k < net.links.size(); ++k) {
        r_cols.emplace_back("R_link_" + std::to_string(k), &trace.resistances[k]);
    }
    rec.outputs.add("panel_inputs.csv", columns_csv(trace.times, in_cols));
    rec.outputs.add("panel_voltages.csv", columns_csv(trace.times, v_cols));
    rec.outputs.add("panel_resistances.csv", columns_csv(trace.times, r_cols));

    const auto res = analyze(net, trace, o.sim.dt, o.analysis, rec.outputs);
    std::vector<std::pair<std::string, const std::vector<double>*>> hard;
    for (int k : rank_outputs(res.resistances)) {
        if (hard.size() == 3) break;
        hard.emplace_back("R_link_" + std::to_string(k), &trace.resistances[static_cast<std::size_t>(k)]);
    }
    rec.outputs.add("hardest_memristances.csv", columns_csv(trace.times, hard));
    std::cout << "samples " << trace.samples() << ", voltage reports " << res.voltages.size()
              << ", memristance reports " << res.resistances.size() << '\n';

    if (o.plot_script) {
        rec.outputs.add(
            "plot_cube.py",
            "import csv, sys\nimport matplotlib.pyplot as plt\n\n"
            "def load(path):\n"
            "    with open(path) as f:\n"
            "        rows = list(csv.DictReader(f))\n"
            "    return {k: [float(r[k]) for r in rows] for k in rows[0]}\n\n"
            "fig, axes = plt.subplots(2, 2, figsize=(11, 7))\n"
            "for ax, name in zip(axes[0], [\"panel_voltages.csv\", \"panel_resistances.csv\"]):\n"
            "    d = load(name)\n"
            "    for k, v in d.items():\n"
            "        if k != \"t\":\n"
            "            ax.plot(d[\"t\"], v, lw=0.7)\n"
            "    ax.set_title(name)\n"
            "for ax, name in zip(axes[1], [\"delta_voltages.csv\", \"delta_resistances.csv\"]):\n"
            "    d = load(name)\n"
            "    ax.bar(range(len(d[\"delta\"])), d[\"delta\"])\n"
            "    ax.set_xticks(range(len(d[\"delta\"])), [str(int(i)) for i in d[\"output_id\"]], fontsize=6)\n"
            "    ax.set_title(name)\n"
            "fig.tight_layout()\nfig.savefig(sys.argv[1] if len(sys.argv) > 1 else \"cube.png\")\n");
    }
}

struct SimulateOptions {
    std::string network;
    std::string drives;
    SimOptions sim;
    bool analyze = false;
    AnalysisOptions analysis;
};

void cmd_simulate(const SimulateOptions& o, RunRecord& rec) {
    validate_exclude_dc(o.analysis.exclude_dc);
    parse_basis(o.analysis.basis);
    rec.parameters["network"] = abs_path(o.network);
    rec.parameters["drives"] = abs_path(o.drives);
    o.sim.record(rec.parameters);
    rec.parameters["analyze"] = o.analyze;
    record_analysis(o.analysis, rec.parameters);

    const Network net = load_network_file(rec, o.network);
    const DriveAssignment drives = load_drives_file(rec, o.drives);
    if (auto v = validate_drives(net, drives); !v.empty()) throw ValidationError(std::move(v));
    const SimulationTrace trace = simulate(net, drives, o.sim.config());
    rec.outputs.add("trace.csv", trace_to_csv(trace));
    rec.outputs.add("trace.json", trace_to_json(net, trace));
    if (o.analyze) analyze(net, trace, o.sim.dt, o.analysis, rec.outputs);
    std::cout << "samples " << trace.samples() << '\n';
}

struct ReadoutOptions {
    std::string network;
    WaveformTaskConfig task;
    std::string observables = "voltages";
};

void cmd_readout(ReadoutOptions o, RunRecord& rec) {
    auto obs = parse_observables(o.observables);
    if (!obs) throw UsageError("--observables must be voltages, resistances or both");
    o.task.observables = *obs;
    const auto& t = o.task;
    if (!o.network.empty()) rec.parameters["network"] = abs_path(o.network);
    rec.parameters.update(json{{"episodes", t.episodes},
                               {"train-fraction", t.train_fraction},
                               {"seed", t.seed},
                               {"frequency", t.frequency},
                               {"amplitude", t.amplitude},
                               {"duration", t.duration},
                               {"dt", t.dt},
                               {"samples", t.samples},
                               {"observables", o.observables},
                               {"ridge", t.ridge},
                               {"shuffle-labels", t.shuffle_labels},
                               {"jobs", t.jobs}});

    const Network net = o.network.empty() ? build_cube() : load_network_file(rec, o.network);
    const WaveformTaskResult res = waveform_task(net, t);

    json report;
    report["seed"] = t.seed;
    report["episodes"] = t.episodes;
    report["observables"] = o.observables;
    report["shuffle_labels"] = t.shuffle_labels;
    report["split"] = {{"train_fraction", t.train_fraction},
                       {"train", res.train_count},
                       {"test", res.test_count}};
    report["accuracy"] = res.accuracy;
    report["train_accuracy"] = res.train_accuracy;
    report["feature_columns"] = res.features.cols();
    report["rank_deficient"] = res.weights.rank_deficient;
    auto& eps = report["per_episode"] = json::array();
    for (std::size_t i = 0; i < res.episodes.size(); ++i) {
        const auto& e = res.episodes[i];
        eps.push_back({{"index", i},
                       {"waveform", e.label > 0 ? "square" : "sawtooth"},
                       {"label", e.label},
                       {"phase", e.phase},
                       {"split", e.train ? "train" : "test"},
                       {"score", e.score},
                       {"predicted", e.predicted}});
    }
    rec.outputs.add("report.json", report.dump(1) + "\n");

    std::string csv = "episode,label,split";
    for (const auto& name : res.features.column_names) csv += "," + name;
    csv += '\n';
    for (std::size_t i = 0; i < res.episodes.size(); ++i) {
        csv += std::to_string(i) + ',' + std::to_string(res.episodes[i].label) + ',' +
               (res.episodes[i].train ? "train" : "test");
        const auto row = res.features.values.row(static_cast<Eigen::Index>(i));
        for (Eigen::Index c = 0; c < row.size(); ++c) {
            csv += ',';
            append_number(csv, row(c));
        }
        csv += '\n';
    }
    rec.outputs.add("features.csv", csv);
    std::cout << "accuracy " << format_number(res.accuracy) << " on " << res.test_count
              << " held-out episodes (train " << format_number(res.train_accuracy) << ")\n";
}

struct ValidateOptions {
    std::string network;
    std::string drives;
};

void cmd_validate(const ValidateOptions& o, RunRecord& rec) {
    rec.parameters["network"] = abs_path(o.network);
    if (!o.drives.empty()) rec.parameters["drives"] = abs_path(o.drives);
    const Network net = load_network_file(rec, o.network);
    json doc;
    doc["valid"] = true;
    doc["nodes"] = net.nodes.size();
    doc["links"] = net.links.size();
    if (!o.drives.empty()) {
        const auto drives = load_drives_file(rec, o.drives);
        if (auto v = validate_drives(net, drives); !v.empty()) throw ValidationError(std::move(v));
        doc["drives"] = drives.size();
    }
    rec.outputs.add("validation.json", doc.dump(1) + "\n");
    std::cout << o.network << ": valid (" << net.nodes.size() << " nodes, " << net.links.size()
              << " links)\n";
}

// ---------------------------------------------------------------------------
// Manifest and replay.

// Rebuild the argument list from resolved parameters so replays see exactly
// the values that were used, defaults included.
std::vector<std::string> canonical_args(const RunRecord& rec) {
    std::vector<std::string> args{rec.command};
    for (const auto& [key, value] : rec.parameters.items()) {
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back("--" + key);
            continue;
        }
        args.push_back("--" + key);
        if (value.is_string()) {
            args.push_back(value.get<std::string>());
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) joined += (joined.empty() ? "" : ",") + v.dump();
            args.push_back(joined);
        } else {
            args.push_back(value.dump());
        }
    }
    return args;
}

std::string manifest_json(const RunRecord& rec, double seconds) {
    json m;
    m["tool"] = "memnet_cli";
    m["version"] = kVersion;
    m["command"] = rec.command;
    m["parameters"] = rec.parameters;
    m["arguments"] = canonical_args(rec);
    m["inputs"] = rec.inputs;
    auto& outs = m["outputs"] = json::array();
    for (const auto& [name, content] : rec.outputs.files()) {
        outs.push_back({{"file", name}, {"sha256", sha256_hex(content)}});
    }
    m["duration_seconds"] = seconds;
    return m.dump(2) + "\n";
}

using Runner = std::function<void(RunRecord&)>;

// Options are owned by this struct so that CLI11 bindings stay valid.
struct Commands {
    BenchmarkOptions bench;
    CubeOptions cube;
    SimulateOptions sim;
    ReadoutOptions readout;
    ValidateOptions validate;
    std::string manifest;
    std::string out;
};

void add_sim_options(CLI::App* app, SimOptions& s) {
    app->add_option("--dt", s.dt, "time step in seconds")->capture_default_str();
    app->add_option("--steps", s.steps, "number of implicit Euler steps")->capture_default_str();
    app->add_option("--fp-tolerance", s.fp_tolerance, "fixed-point tolerance on R (ohm)")
        ->capture_default_str();
    app->add_option("--fp-max-iterations", s.fp_max_iterations, "fixed-point iteration budget")
        ->capture_default_str();
    app->add_option("--kcl-tolerance", s.kcl_tolerance, "relative Kirchhoff residual bound")
        ->capture_default_str();
}

void add_analysis_options(CLI::App* app, AnalysisOptions& a) {
    app->add_option("--exclude-dc", a.exclude_dc,
                    "which outputs drop the zero-frequency bin: resistances, all, none")
        ->capture_default_str();
    app->add_option("--basis", a.basis, "fit basis: phase-shifted or direct")->capture_default_str();
    app->add_option("--voltage-delta-threshold", a.voltage_delta_threshold,
                    "flag voltage dissimilarities above this value")
        ->capture_default_str();
    app->add_flag("--no-spectra", a.no_spectra, "skip per-output spectrum files");
}

int exit_code(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Usage:
        case ErrorKind::Parse: return 1;
        case ErrorKind::Validation: return 2;
        case ErrorKind::Numerical: return 3;
    }
    return 1;
}

int run(const std::vector<std::string>& argv, int depth = 0);

int replay(const std::string& manifest_path, const fs::path& out, int depth) {
    if (depth > 0) throw UsageError("a replayed manifest cannot itself be a replay");
    const auto m = detail::parse_document(read_file(manifest_path));
    for (const auto& in : detail::require_array(m, "inputs", "")) {
        const std::string path = in.at("path").get<std::string>();
        if (sha256_hex(read_file(path)) != in.at("sha256").get<std::string>()) {
            throw UsageError("input " + path + " changed since the manifest was written");
        }
    }
    std::vector<std::string> args;
    for (const auto& a : detail::require_array(m, "arguments", "")) args.push_back(a.get<std::string>());
    args.push_back("--out");
    args.push_back(out.string());
    std::cout << "replaying " << args.front() << " into " << out.string() << '\n';
    if (int rc = run(args, depth + 1); rc != 0) return rc;

    std::size_t same = 0;
    std::vector<std::string> differ;
    for (const auto& o : detail::require_array(m, "outputs", "")) {
        const std::string name = o.at("file").get<std::string>();
        std::error_code ec;
        const bool match = fs::exists(out / name, ec) &&
                           sha256_hex(read_file(out / name)) == o.at("sha256").get<std::string>();
        match ? ++same : (differ.push_back(name), same);
    }
    std::cout << "replay: " << same << " files identical, " << differ.size() << " differ\n";
    for (const auto& d : differ) std::cerr << "  differs: " << d << '\n';
    return differ.empty() ? 0 : 3;
}

int run(const std::vector<std::string>& argv, int depth) {
    CLI::App app{"Memristive network simulator and analysis tool", "memnet_cli"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Commands c;
    std::string out_default = default_out().string();

    auto with_out = [&](CLI::App* sub) {
        sub->add_option("--out", c.out,
                        std::string("output directory (default $") + kOutEnv + " or " + kDefaultOut + ")");
        return sub;
    };

    auto* bench = with_out(app.add_subcommand("benchmark", "series resistor-memristor benchmark"));
    bench->add_option("--frequencies", c.bench.frequencies, "drive frequencies in Hz")
        ->delimiter(',')->capture_default_str();
    bench->add_option("--amplitude", c.bench.amplitude, "cosine drive amplitude in V")->capture_default_str();
    bench->add_option("--dt", c.bench.dt, "time step in seconds")->capture_default_str();
    bench->add_option("--duration", c.bench.duration, "simulated time in seconds")->capture_default_str();
    bench->add_option("--stride", c.bench.stride, "write every n-th sample")->capture_default_str();
    bench->add_option("--jobs", c.bench.jobs, "frequencies simulated in parallel")->capture_default_str();
    bench->add_flag("--plot-script", c.bench.plot_script, "also write a matplotlib script");

    auto* cube = with_out(app.add_subcommand("cube", "27-node cube protocol with dissimilarity analysis"));
    cube->add_option("--network", c.cube.network, "network file (default: built-in cube)");
    cube->add_option("--frequencies", c.cube.frequencies, "sine frequencies for the external nodes in id order")
        ->delimiter(',')->capture_default_str();
    cube->add_option("--amplitude", c.cube.amplitude, "sine amplitude in V")->capture_default_str();
    add_sim_options(cube, c.cube.sim);
    add_analysis_options(cube, c.cube.analysis);
    cube->add_flag("--plot-script", c.cube.plot_script, "also write a matplotlib script");

    auto* sim = with_out(app.add_subcommand("simulate", "simulate a network file under a drives file"));
    sim->add_option("--network", c.sim.network, "network file")->required();
    sim->add_option("--drives", c.sim.drives, "drives file")->required();
    add_sim_options(sim, c.sim.sim);
    sim->add_flag("--analyze", c.sim.analyze, "also compute dissimilarity reports");
    add_analysis_options(sim, c.sim.analysis);

    auto* ro = with_out(app.add_subcommand("readout", "square vs sawtooth classification task"));
    auto& t = c.readout.task;
    ro->add_option("--network", c.readout.network, "network file (default: built-in cube)");
    ro->add_option("--episodes", t.episodes, "number of episodes")->capture_default_str();
    ro->add_option("--train-fraction", t.train_fraction, "fraction of episodes used for training")
        ->capture_default_str();
    ro->add_option("--seed", t.seed, "random seed")->capture_default_str();
    ro->add_option("--frequency", t.frequency, "drive frequency in Hz")->capture_default_str();
    ro->add_option("--amplitude", t.amplitude, "drive amplitude in V")->capture_default_str();
    ro->add_option("--duration", t.duration, "episode length in seconds")->capture_default_str();
    ro->add_option("--dt", t.dt, "time step in seconds")->capture_default_str();
    ro->add_option("--samples", t.samples, "observation times per episode")->capture_default_str();
    ro->add_option("--observables", c.readout.observables, "voltages, resistances or both")
        ->capture_default_str();
    ro->add_option("--ridge", t.ridge, "ridge penalty")->capture_default_str();
    ro->add_flag("--shuffle-labels", t.shuffle_labels, "control run with permuted labels");
    ro->add_option("--jobs", t.jobs, "episodes simulated in parallel")->capture_default_str();

    auto* val = with_out(app.add_subcommand("validate", "check a network (and optional drives) file"));
    val->add_option("--network", c.validate.network, "network file")->required();
    val->add_option("--drives", c.validate.drives, "drives file");

    auto* rep = with_out(app.add_subcommand("replay", "re-run a manifest and compare outputs"));
    rep->add_option("manifest", c.manifest, "manifest.json of an earlier run")->required();

    try {
        std::vector<std::string> rev(argv.rbegin(), argv.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    const fs::path out = c.out.empty() ? fs::path(out_default) : fs::path(c.out);
    try {
        if (rep->parsed()) return replay(c.manifest, out, depth);

        RunRecord rec;
        Runner runner;
        if (bench->parsed()) {
            rec.command = "benchmark";
            runner = [&](RunRecord& r) { cmd_benchmark(c.bench, r); };
        } else if (cube->parsed()) {
            rec.command = "cube";
            runner = [&](RunRecord& r) { cmd_cube(c.cube, r); };
        } else if (sim->parsed()) {
            rec.command = "simulate";
            runner = [&](RunRecord& r) { cmd_simulate(c.sim, r); };
        } else if (ro->parsed()) {
            rec.command = "readout";
            runner = [&](RunRecord& r) { cmd_readout(c.readout, r); };
        } else {
            rec.command = "validate";
            runner = [&](RunRecord& r) { cmd_validate(c.validate, r); };
        }
        require_writable_target(out);
        const auto start = std::chrono::steady_clock::now();
        runner(rec);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        rec.outputs.add("manifest.json", manifest_json(rec, seconds));
        rec.outputs.commit(out);
        std::cout << "wrote " << rec.outputs.files().size() << " files to " << out.string() << '\n';
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e);
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace
}  // namespace memnet::cli

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return memnet::cli::run(args);
}
