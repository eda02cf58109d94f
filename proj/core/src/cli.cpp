#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "brunesynth/errors.hpp"
#include "brunesynth/io.hpp"

namespace brunesynth::io {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Formal junction shunt used when quantization needs one and no C_J was given (nF).
constexpr double kQuantizationCJ = 1e-6;

struct Common {
    std::string out_dir;
    std::string config;
    unsigned prec_bits = 0;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--out", c.out_dir, "Output directory (overrides BRUNESYNTH_OUTDIR)");
    sub->add_option("--config", c.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--prec-bits", c.prec_bits, "Extended precision in bits (overrides BRUNESYNTH_PREC_BITS)")
        ->check(CLI::Range(64u, 65536u));
}

RunConfig resolve(const Common& c) {
    RunConfig cfg;
    if (!c.config.empty()) cfg = RunConfig::from_json(read_json(c.config));
    if (const char* env = std::getenv("BRUNESYNTH_OUTDIR"); env && *env) cfg.out_dir = env;
    if (const char* env = std::getenv("BRUNESYNTH_PREC_BITS"); env && *env) {
        try {
            cfg.precision_bits = static_cast<unsigned>(std::stoul(env));
        } catch (const std::exception&) {
            throw ValidationError(std::string("BRUNESYNTH_PREC_BITS: not a number: ") + env);
        }
    }
    if (!c.out_dir.empty()) cfg.out_dir = c.out_dir;
    if (c.prec_bits) cfg.precision_bits = c.prec_bits;
    cfg.validate();
    return cfg;
}

BruneOptions brune_options(const RunConfig& cfg) {
    BruneOptions o;
    o.scan.pr_rel_tol = cfg.pr_rel_tol;
    o.scan.roots.step_tolerance_ulps = cfg.root_step_ulps;
    o.cancellation_tol = cfg.cancellation_tol;
    o.axis_tol = cfg.preamble_tol;
    return o;
}

FosterOptions foster_options(const RunConfig& cfg) {
    FosterOptions o;
    o.f_lo_ghz = cfg.f_lo_ghz;
    o.f_hi_ghz = cfg.f_hi_ghz;
    o.drop_negative_residue = cfg.foster_drop_negative;
    o.drop_out_of_band = cfg.foster_drop_out_of_band;
    o.drop_real_poles = cfg.foster_drop_real;
    return o;
}

// A model or a circuit file, told apart by the presence of "stages".
struct Input {
    std::optional<PoleResidueModel> model;
    std::optional<BruneCircuit> circuit;
};

Input load_input(const std::string& path) {
    const json j = read_json(path);
    Input in;
    if (j.is_object() && j.contains("stages")) in.circuit = circuit_from_json(j);
    else in.model = model_from_json(j);
    return in;
}

BruneCircuit brune_of(const Input& in, const RunConfig& cfg, std::ostream& err) {
    if (in.circuit) return *in.circuit;
    SynthesisResult r = synthesize(*in.model, brune_options(cfg));
    for (const auto& w : r.warnings) err << "warning: " << w << "\n";
    return r.circuit;
}

Impedance network(const Input& in, const std::string& which, const RunConfig& cfg, std::ostream& err) {
    if (in.circuit) {
        if (which != "brune") throw ValidationError("a circuit input only supports --network brune");
        return make_impedance(*in.circuit, "brune");
    }
    if (which == "fit") return make_impedance(*in.model, "fit");
    if (which == "brune") return make_impedance(brune_of(in, cfg, err), "brune");
    if (which == "foster") return make_impedance(build_foster(*in.model, foster_options(cfg)), "foster");
    throw ValidationError("unknown network '" + which + "' (fit, brune or foster)");
}

void emit(const std::string& text, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + path.string());
    f << text;
}

void write_provenance(const std::string& cmd, const std::vector<std::string>& args, const std::vector<std::filesystem::path>& inputs,
                      const RunConfig& cfg) {
    write_json(provenance(cmd, args, inputs, cfg), cfg.out_dir / (cmd + ".provenance.json"));
}

std::string fixed(double x, int digits) {
    std::ostringstream os;
    os << std::setprecision(digits) << x;
    return os.str();
}

double relative_difference(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

int cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return cli(args, std::cout, std::cerr);
}

int cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"brunesynth: Brune/Foster synthesis, quantization and qubit-pole analysis of one-port impedances"};
    app.require_subcommand(1);

    Common common;
    std::string input;
    double lj = 4.5;
    double cj = -1;
    double temperature = -1;
    double f_guess = 6.7;
    double preamble_tol = -1;
    double cancellation_tol = -1;
    double pr_tol = -1;
    bool clamp_negative = false;
    double terminal_cap = 0.0;
    std::string net = "fit";
    std::vector<double> band;
    bool keep_negative = false, keep_out_of_band = false;
    std::string compare;
    double lj_min = -1, lj_max = -1, anchor = 4.5;
    std::size_t lj_points = 0;
    std::size_t port = 1;
    std::string kind = "brune";

    auto input_opt = [&](CLI::App* s, const char* what) { s->add_option("input", input, what)->required()->check(CLI::ExistingFile); };
    auto junction_opts = [&](CLI::App* s) {
        s->add_option("--lj", lj, "Junction inductance L_J (nH)")->check(CLI::PositiveNumber);
        s->add_option("--cj", cj, "Junction shunt capacitance C_J (nF); default 0 (quantization falls back to 1e-6 when the capacitance matrix is singular)")->check(CLI::NonNegativeNumber);
    };
    auto synth_opts = [&](CLI::App* s) {
        s->add_option("--preamble-tol", preamble_tol, "Near-axis tolerance for the lossless preamble (0: exact)")
            ->check(CLI::NonNegativeNumber);
        s->add_option("--cancellation-tol", cancellation_tol, "Relative residual allowed in exact divisions")
            ->check(CLI::PositiveNumber);
        s->add_option("--pr-tol", pr_tol, "Relative tolerance on negative Re Z")->check(CLI::PositiveNumber);
    };

    auto* check = app.add_subcommand("check-pr", "Positive-real check of a pole/residue model");
    input_opt(check, "Model JSON");
    check->add_option("--pr-tol", pr_tol, "Relative tolerance on negative Re Z")->check(CLI::PositiveNumber);

    auto* brune = app.add_subcommand("synth-brune", "Exact Brune synthesis");
    input_opt(brune, "Model JSON");
    synth_opts(brune);
    brune->add_option("--compare", compare, "Reference circuit JSON; prints relative element differences")
        ->check(CLI::ExistingFile);

    auto* foster = app.add_subcommand("synth-foster", "Approximate lossy Foster synthesis");
    input_opt(foster, "Model JSON");
    foster->add_option("--band", band, "Band edges f_lo f_hi (GHz)")->expected(2);
    foster->add_flag("--keep-negative", keep_negative, "Keep pairs with negative real residue (they are skipped with a warning)");
    foster->add_flag("--keep-out-of-band", keep_out_of_band, "Keep poles outside the band");

    auto* quantize = app.add_subcommand("quantize", "Capacitance/stiffness matrices and baths of a Brune circuit");
    input_opt(quantize, "Model or circuit JSON");
    junction_opts(quantize);
    synth_opts(quantize);
    quantize->add_flag("--clamp-negative", clamp_negative, "Replace negative resistances by 0");
    quantize->add_option("--terminal-cap", terminal_cap, "Placeholder capacitance on the last node (nF)")
        ->check(CLI::NonNegativeNumber);

    auto* t1 = app.add_subcommand("t1", "Relaxation rates from the quantized circuit, with the classical pole for comparison");
    input_opt(t1, "Model or circuit JSON");
    junction_opts(t1);
    synth_opts(t1);
    t1->add_flag("--clamp-negative", clamp_negative, "Replace negative resistances by 0");
    t1->add_option("--temperature", temperature, "Bath temperature (K)")->check(CLI::NonNegativeNumber);

    auto* pole = app.add_subcommand("qubit-pole", "Complex qubit pole of the L_J-shunted network");
    input_opt(pole, "Model or circuit JSON");
    junction_opts(pole);
    synth_opts(pole);
    pole->add_option("--network", net, "fit, brune, foster or all")->check(CLI::IsMember({"fit", "brune", "foster", "all"}));
    pole->add_option("--f-guess", f_guess, "Starting frequency (GHz)")->check(CLI::PositiveNumber);

    auto* sweep = app.add_subcommand("sweep-lj", "Track the qubit pole over an L_J grid");
    input_opt(sweep, "Model or circuit JSON");
    synth_opts(sweep);
    sweep->add_option("--cj", cj, "Junction shunt capacitance C_J (nF)")->check(CLI::NonNegativeNumber);
    sweep->add_option("--network", net, "fit, brune, foster or all")->check(CLI::IsMember({"fit", "brune", "foster", "all"}));
    sweep->add_option("--lj-min", lj_min, "First L_J (nH)")->check(CLI::PositiveNumber);
    sweep->add_option("--lj-max", lj_max, "Last L_J (nH)")->check(CLI::PositiveNumber);
    sweep->add_option("--lj-points", lj_points, "Number of grid points")->check(CLI::PositiveNumber);
    sweep->add_option("--anchor", anchor, "L_J where continuation starts (nH)")->check(CLI::PositiveNumber);
    sweep->add_option("--f-seed", f_guess, "Qubit frequency guess at the anchor (GHz)")->check(CLI::PositiveNumber);

    auto* s2z = app.add_subcommand("s2z", "Port impedance from Touchstone S-parameters (other ports matched)");
    input_opt(s2z, "Touchstone .s1p/.s3p file");
    s2z->add_option("--port", port, "1-based port index")->check(CLI::PositiveNumber);

    auto* netlist = app.add_subcommand("export-netlist", "SPICE netlist of a Brune or Foster circuit");
    input_opt(netlist, "Model or circuit JSON");
    synth_opts(netlist);
    netlist->add_option("--kind", kind, "brune or foster")->check(CLI::IsMember({"brune", "foster"}));
    netlist->add_option("--lj", lj, "Add the linearized junction L_J (nH)")->check(CLI::PositiveNumber);
    netlist->add_option("--cj", cj, "Add the junction shunt capacitance (nF)")->check(CLI::NonNegativeNumber);

    for (auto* s : {check, brune, foster, quantize, t1, pole, sweep, s2z, netlist}) add_common(s, common);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 64;
    }

    try {
        RunConfig cfg = resolve(common);
        if (pr_tol > 0) cfg.pr_rel_tol = pr_tol;
        if (preamble_tol >= 0) cfg.preamble_tol = preamble_tol;
        if (cancellation_tol > 0) cfg.cancellation_tol = cancellation_tol;
        if (cj >= 0) cfg.C_J = cj;
        if (temperature >= 0) cfg.temperature = temperature;
        if (band.size() == 2) {
            cfg.f_lo_ghz = band[0];
            cfg.f_hi_ghz = band[1];
        }
        if (keep_negative) cfg.foster_drop_negative = false;
        if (keep_out_of_band) cfg.foster_drop_out_of_band = false;
        if (lj_min > 0) cfg.lj_min = lj_min;
        if (lj_max > 0) cfg.lj_max = lj_max;
        if (lj_points > 0) cfg.lj_points = lj_points;
        cfg.validate();
        PrecisionScope prec(cfg.precision_bits);
        const std::filesystem::path outdir = cfg.out_dir;
        const std::vector<std::filesystem::path> inputs{input};
        std::string cmd;

        JunctionParams jp;
        jp.L_J = lj;
        jp.C_J = cfg.C_J.value_or(0.0);
        const double pole_cj = cfg.C_J.value_or(0.0);
        jp.temperature = cfg.temperature;

        if (check->parsed()) {
            cmd = "check-pr";
            ScanOptions so;
            so.pr_rel_tol = cfg.pr_rel_tol;
            const PrReport r = check_pr(load_model(input), so);
            const json j = pr_report_to_json(r);
            write_json(j, outdir / "pr_report.json");
            out << dump(j);
        } else if (brune->parsed()) {
            cmd = "synth-brune";
            const SynthesisResult r = synthesize(load_model(input), brune_options(cfg));
            for (const auto& w : r.warnings) err << "warning: " << w << "\n";
            write_json(circuit_to_json(r.circuit), outdir / "brune_circuit.json");
            emit(spice_netlist(r.circuit), outdir / "brune_circuit.cir");
            std::ostringstream log;
            for (const auto& rec : r.log) log << rec.describe() << "\n";
            emit(log.str(), outdir / "brune_log.txt");
            out << "stage kind        f1_GHz        R_Ohm           C_nF          L11_nH        L22_nH\n";
            for (std::size_t k = 0; k < r.circuit.stages.size(); ++k) {
                const auto& s = r.circuit.stages[k];
                out << std::left << std::setw(6) << k + 1 << std::setw(12) << to_string(s.kind) << std::setw(14)
                    << (s.kind == StageKind::Regular ? fixed(s.omega1 / kTwoPi, 8) : "-") << std::setw(16) << fixed(s.R, 8)
                    << std::setw(14) << fixed(s.C, 8) << std::setw(14) << (s.kind == StageKind::Regular ? fixed(s.L11, 8) : "-")
                    << (s.kind == StageKind::Regular ? fixed(s.L22, 8) : "-") << "\n";
            }
            out << "terminal " << to_string(r.circuit.terminal);
            if (r.circuit.terminal == TerminalKind::Resistor) out << " R=" << fixed(r.circuit.r_terminal, 8);
            out << "\n";
            if (!compare.empty()) {
                const BruneCircuit ref = load_circuit(compare);
                out << "relative difference against " << compare << "\n";
                const std::size_t n = std::min(ref.stages.size(), r.circuit.stages.size());
                if (ref.stages.size() != r.circuit.stages.size()) {
                    out << "  stage count differs: " << r.circuit.stages.size() << " vs " << ref.stages.size() << "\n";
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const auto &a = r.circuit.stages[k], &b = ref.stages[k];
                    out << "  stage " << k + 1 << ": R " << fixed(relative_difference(a.R, b.R), 3) << "  C "
                        << fixed(relative_difference(a.C, b.C), 3);
                    if (a.kind == StageKind::Regular && b.kind == StageKind::Regular) {
                        out << "  L11 " << fixed(relative_difference(a.L11, b.L11), 3) << "  L22 "
                            << fixed(relative_difference(a.L22, b.L22), 3);
                    } else if (a.kind != b.kind) {
                        out << "  kind " << to_string(a.kind) << " vs " << to_string(b.kind);
                    }
                    out << "\n";
                }
                out << "  terminal R " << fixed(relative_difference(r.circuit.r_terminal, ref.r_terminal), 3) << "\n";
            }
        } else if (foster->parsed()) {
            cmd = "synth-foster";
            const FosterCircuit fc = build_foster(load_model(input), foster_options(cfg));
            for (const auto& w : fc.warnings) err << "warning: " << w << "\n";
            const json j = foster_to_json(fc);
            write_json(j, outdir / "foster_circuit.json");
            emit(spice_netlist(fc), outdir / "foster_circuit.cir");
            out << dump(j);
        } else if (quantize->parsed() || t1->parsed()) {
            cmd = quantize->parsed() ? "quantize" : "t1";
            const Input in = load_input(input);
            const BruneCircuit c = brune_of(in, cfg, err);
            QuantOptions qo;
            qo.clamp_negative = clamp_negative;
            qo.terminal_capacitance = terminal_cap;
            QuantizedSystem sys;
            try {
                sys = build_system(c, jp, qo);
            } catch (const ValidationError&) {
                // Without a degenerate stage the capacitance matrix needs a formal junction shunt.
                if (cfg.C_J) throw;
                jp.C_J = kQuantizationCJ;
                sys = build_system(c, jp, qo);
                err << "warning: capacitance matrix is singular without C_J; using C_J = " << kQuantizationCJ << " nF\n";
            }
            for (const auto& w : sys.warnings) err << "warning: " << w << "\n";
            if (quantize->parsed()) {
                const json j = system_to_json(sys);
                write_json(j, outdir / "quantized_system.json");
                out << dump(j);
            } else {
                const auto modes = harmonic_modes(sys);
                const std::size_t q = qubit_mode_index(sys, modes);
                const RelaxationRates r = relaxation_rates(sys, modes, q, cfg.temperature);
                json j = rates_to_json(sys, r);
                PoleSearchOptions po;
                po.C_J = jp.C_J;
                const auto cp = find_qubit_pole(make_impedance(c), lj, modes[q].f_ghz(), po);
                j["classical_pole"] = pole_to_json(cp.pole);
                j["ratio_total_rate_to_abs_re_s"] = r.total / std::abs(cp.pole.xi_qb);
                // Sensitivity of the result to the formal shunt capacitance.
                JunctionParams jp10 = jp;
                jp10.C_J = jp.C_J > 0 ? 10 * jp.C_J : kQuantizationCJ;
                const QuantizedSystem s10 = build_system(c, jp10, qo);
                const auto m10 = harmonic_modes(s10);
                const RelaxationRates r10 = relaxation_rates(s10, m10, qubit_mode_index(s10, m10), cfg.temperature);
                j["C_J_sensitivity"] = json{{"C_J_alt", jp10.C_J},
                                            {"f_qb_rel_change", relative_difference(r10.omega_qb, r.omega_qb)},
                                            {"total_rate_rel_change", relative_difference(r10.total, r.total)}};
                write_json(j, outdir / "t1.json");
                out << dump(j);
            }
        } else if (pole->parsed()) {
            cmd = "qubit-pole";
            const Input in = load_input(input);
            std::vector<std::string> nets;
            if (net == "all") nets = in.circuit ? std::vector<std::string>{"brune"} : std::vector<std::string>{"fit", "brune", "foster"};
            else nets = {in.circuit ? std::string("brune") : net};
            PoleSearchOptions po;
            po.C_J = pole_cj;
            json j = json::object();
            for (const auto& n : nets) {
                const auto res = find_qubit_pole(network(in, n, cfg, err), lj, f_guess, po);
                for (const auto& w : res.warnings) err << "warning (" << n << "): " << w << "\n";
                json pj = pole_to_json(res.pole);
                pj["cavity_warning"] = res.cavity_warning;
                j[n] = pj;
                out << n << ": f_qb = " << fixed(res.pole.f_qb, 9) << " GHz, Re s = " << fixed(res.pole.xi_qb, 6)
                    << " 1/ns, Q = " << fixed(res.pole.Q_qb, 6) << ", T1 = " << fixed(res.pole.T1, 6) << " ns\n";
            }
            write_json(j, outdir / "qubit_pole.json");
        } else if (sweep->parsed()) {
            cmd = "sweep-lj";
            const Input in = load_input(input);
            std::vector<std::string> nets;
            if (net == "all") nets = in.circuit ? std::vector<std::string>{"brune"} : std::vector<std::string>{"fit", "brune", "foster"};
            else nets = {in.circuit ? std::string("brune") : net};
            SweepOptions so;
            so.search.C_J = pole_cj;
            so.f_seed_ghz = f_guess;
            so.anchor_LJ = anchor;
            for (const auto& n : nets) {
                const auto rows = sweep_LJ(network(in, n, cfg, err), cfg.lj_grid(), so);
                const std::string csv = csv_sweep(rows);
                emit(csv, outdir / ("sweep_" + n + ".csv"));
                out << "# " << n << "\n" << csv;
            }
        } else if (s2z->parsed()) {
            cmd = "s2z";
            const TouchstoneData ts = load_touchstone(input);
            if (port < 1 || port > ts.ports) throw ValidationError("--port must be in 1.." + std::to_string(ts.ports));
            const std::string csv = csv_impedance(s_to_z(ts, port - 1));
            emit(csv, outdir / ("z_port" + std::to_string(port) + ".csv"));
            out << csv;
        } else if (netlist->parsed()) {
            cmd = "export-netlist";
            const Input in = load_input(input);
            std::optional<JunctionParams> jopt;
            if (netlist->count("--lj")) jopt = jp;
            std::string text;
            if (kind == "foster") {
                if (!in.model) throw ValidationError("a Foster netlist needs a model input");
                text = spice_netlist(build_foster(*in.model, foster_options(cfg)), jopt);
            } else {
                text = spice_netlist(brune_of(in, cfg, err), jopt);
            }
            emit(text, outdir / (kind + "_circuit.cir"));
            out << text;
        }
        write_provenance(cmd, args, inputs, cfg);
        return 0;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConditioningError& e) {
        err << "numerical error: " << e.what() << "\n";
        for (const auto& l : e.log()) err << "  " << l << "\n";
        return 3;
    } catch (const ConvergenceError& e) {
        err << "numerical error: " << e.what() << "\n";
        for (const auto& l : e.trajectory()) err << "  " << l << "\n";
        return 3;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace brunesynth::io
