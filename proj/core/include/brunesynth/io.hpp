#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "brunesynth/brune.hpp"
#include "brunesynth/foster.hpp"
#include "brunesynth/quant.hpp"
#include "brunesynth/ratmodel.hpp"
#include "brunesynth/response.hpp"

namespace brunesynth::io {

using json = nlohmann::ordered_json;

// Shortest decimal that reads back to the same double.
std::string format_double(double x);

// ---- pole/residue model ------------------------------------------------------------------------
// {"poles":[{"re","im"}...], "residues":[...], "d", "e", "freq_unit": "rad_per_ns" | "GHz_2pi"}
// GHz_2pi: poles are given in GHz and scaled by 2*pi; residues are taken as is.
// Schema problems throw ValidationError naming the offending field path.
PoleResidueModel model_from_json(const json& j);
json model_to_json(const PoleResidueModel& m);  // always rad_per_ns
PoleResidueModel load_model(const std::filesystem::path& path);
void save_model(const PoleResidueModel& m, const std::filesystem::path& path);

// ---- circuits ----------------------------------------------------------------------------------
// {"stages":[{"kind":"regular","R","C","L11","L22"} | {"kind":"degenerate","R","C"}
//            | {"kind":"inductive_degenerate","R","L"}], "terminal":{"kind":"resistor","R"} }
BruneCircuit circuit_from_json(const json& j);
json circuit_to_json(const BruneCircuit& c);
BruneCircuit load_circuit(const std::filesystem::path& path);

json foster_to_json(const FosterCircuit& c);
json pr_report_to_json(const PrReport& r);
json pole_to_json(const QubitPole& p);
json system_to_json(const QuantizedSystem& sys);
json rates_to_json(const QuantizedSystem& sys, const RelaxationRates& r);

// Reads a JSON file; ValidationError with the parser message on malformed input.
json read_json(const std::filesystem::path& path);
// Deterministic: two-space indent, keys in insertion order, trailing newline.
void write_json(const json& j, const std::filesystem::path& path);
std::string dump(const json& j);

// ---- Touchstone 1.x ----------------------------------------------------------------------------
enum class TouchstoneFormat { RI, MA, DB };

struct TouchstoneData {
    std::size_t ports = 1;
    std::vector<double> freq_ghz;
    // Per frequency: row-major ports x ports matrix.
    std::vector<std::vector<cdouble>> s;
    double z0 = 50.0;
    // Number pairs as read, in the file's format; lets serialization reproduce them exactly.
    TouchstoneFormat source_format = TouchstoneFormat::RI;
    std::vector<std::vector<std::array<double, 2>>> raw;

    cdouble at(std::size_t k, std::size_t i, std::size_t j) const { return s[k][i * ports + j]; }
};

// ports = 0 infers the port count from the first data record. Only 1- and 3-port data are supported.
// Errors carry the offending line number.
TouchstoneData parse_touchstone(std::istream& in, std::size_t ports = 0);
TouchstoneData load_touchstone(const std::filesystem::path& path);
std::string serialize_touchstone(const TouchstoneData& ts, TouchstoneFormat fmt = TouchstoneFormat::RI);

struct ZSample {
    double f_ghz = 0.0;
    cdouble z{};
    bool infinite = false;  // S_pp = 1: open circuit
};

// Z = Z0 (1 + S_pp)/(1 - S_pp) with the other ports matched. port is 0-based.
std::vector<ZSample> s_to_z(const TouchstoneData& ts, std::size_t port);

// ---- netlists ----------------------------------------------------------------------------------
// SPICE, SI values. Node 1 is the port (junction side), node 0 is ground.
// Coupled pairs are written as two inductors and a K line with k = M/sqrt(L11 L22).
std::string spice_netlist(const BruneCircuit& c, const std::optional<JunctionParams>& jp = {},
                          const std::string& title = "brune");
std::string spice_netlist(const FosterCircuit& c, const std::optional<JunctionParams>& jp = {},
                          const std::string& title = "foster");

// ---- CSV ---------------------------------------------------------------------------------------
std::string csv_sweep(const std::vector<SweepRow>& rows);
std::string csv_impedance(const std::vector<ZSample>& rows);

// ---- configuration and provenance --------------------------------------------------------------
struct RunConfig {
    double f_lo_ghz = 3.0;
    double f_hi_ghz = 15.0;
    unsigned precision_bits = kDefaultPrecisionBits;
    double cancellation_tol = 1e-10;
    double pr_rel_tol = 1e-5;
    double root_step_ulps = 256;
    double preamble_tol = 0.0;  // 0: exact axis classification
    bool foster_drop_negative = true;
    bool foster_drop_out_of_band = true;
    bool foster_drop_real = true;
    double lj_min = 4.0;
    double lj_max = 6.5;
    std::size_t lj_points = 26;
    // Unset: 0, except that quantization falls back to 1e-6 nF when the capacitance matrix is singular.
    std::optional<double> C_J;
    double temperature = 0.0;
    std::filesystem::path out_dir = ".";

    void validate() const;
    // Unknown keys are rejected.
    static RunConfig from_json(const json& j);
    json to_json() const;
    std::vector<double> lj_grid() const;
};

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

// Machine-readable run record: command, arguments, input hashes, config and library versions.
json provenance(const std::string& command, const std::vector<std::string>& args,
                const std::vector<std::filesystem::path>& inputs, const RunConfig& cfg);

// ---- command line ------------------------------------------------------------------------------
// Exit codes: 0 success, 2 validation error, 3 numerical failure, 64 usage error.
int cli(int argc, const char* const* argv);
int cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace brunesynth::io
