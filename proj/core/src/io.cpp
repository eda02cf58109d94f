#include "brunesynth/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <mpfr.h>
#include <openssl/evp.h>

#include "brunesynth/errors.hpp"
#include "brunesynth/version.hpp"

namespace brunesynth::io {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string upper(std::string s) {
    for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return s;
}

// Field access with path-qualified errors.
const json& field(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) throw ValidationError(path + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ValidationError(path + "." + key + ": missing");
    return *it;
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ValidationError(path + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ValidationError(path + ": must be finite");
    return v;
}

double number_field(const json& j, const std::string& key, const std::string& path) {
    return number(field(j, key, path), path + "." + key);
}

double number_field_or(const json& j, const std::string& key, const std::string& path, double def) {
    if (!j.contains(key)) return def;
    return number(j.at(key), path + "." + key);
}

cdouble complex_entry(const json& j, const std::string& path) {
    if (j.is_array()) {
        if (j.size() != 2) throw ValidationError(path + ": expected [re, im]");
        return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
    }
    return {number_field(j, "re", path), number_field_or(j, "im", path, 0.0)};
}

json complex_json(cdouble z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
        rows.push_back(std::move(r));
    }
    return rows;
}

json vector_json(const Eigen::VectorXd& v) {
    json r = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) r.push_back(v[i]);
    return r;
}

AxisElementKind axis_kind_from(const std::string& s, const std::string& path) {
    for (auto k : {AxisElementKind::SeriesL, AxisElementKind::SeriesC, AxisElementKind::SeriesParallelLC,
                   AxisElementKind::SeriesParallelRC, AxisElementKind::ShuntC, AxisElementKind::ShuntL,
                   AxisElementKind::ShuntSeriesLC, AxisElementKind::ShuntSeriesRL}) {
        if (s == to_string(k)) return k;
    }
    throw ValidationError(path + ": unknown axis element kind '" + s + "'");
}

json axis_json(const AxisElement& e) {
    json j{{"kind", to_string(e.kind)}};
    if (e.R != 0) j["R"] = e.R;
    if (e.L != 0) j["L"] = e.L;
    if (e.C != 0) j["C"] = e.C;
    if (e.approximate) j["approximate"] = true;
    return j;
}

AxisElement axis_from(const json& j, const std::string& path) {
    if (!j.is_object()) throw ValidationError(path + ": expected an object");
    if (!field(j, "kind", path).is_string()) throw ValidationError(path + ".kind: expected a string");
    AxisElement e;
    e.kind = axis_kind_from(j.at("kind").get<std::string>(), path + ".kind");
    e.R = number_field_or(j, "R", path, 0.0);
    e.L = number_field_or(j, "L", path, 0.0);
    e.C = number_field_or(j, "C", path, 0.0);
    e.approximate = j.value("approximate", false);
    return e;
}

std::vector<AxisElement> axis_list(const json& j, const std::string& key, const std::string& path) {
    std::vector<AxisElement> out;
    if (!j.contains(key)) return out;
    const json& a = j.at(key);
    if (!a.is_array()) throw ValidationError(path + "." + key + ": expected an array");
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(axis_from(a[i], path + "." + key + "[" + std::to_string(i) + "]"));
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& text, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << text;
}

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

// ---- model -------------------------------------------------------------------------------------

PoleResidueModel model_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("model: expected an object");
    double scale = 1.0;
    if (j.contains("freq_unit")) {
        const json& u = j.at("freq_unit");
        if (!u.is_string()) throw ValidationError("model.freq_unit: expected a string");
        const std::string unit = u.get<std::string>();
        if (unit == "GHz_2pi") {
            scale = kTwoPi;
        } else if (unit != "rad_per_ns") {
            throw ValidationError("model.freq_unit: unsupported unit '" + unit + "' (use rad_per_ns or GHz_2pi)");
        }
    }
    PoleResidueModel m;
    const json& poles = field(j, "poles", "model");
    const json& res = field(j, "residues", "model");
    if (!poles.is_array()) throw ValidationError("model.poles: expected an array");
    if (!res.is_array()) throw ValidationError("model.residues: expected an array");
    if (poles.size() != res.size()) {
        throw ValidationError("model.residues: length " + std::to_string(res.size()) + " does not match model.poles (" +
                              std::to_string(poles.size()) + ")");
    }
    for (std::size_t i = 0; i < poles.size(); ++i) {
        m.poles.push_back(scale * complex_entry(poles[i], "model.poles[" + std::to_string(i) + "]"));
        m.residues.push_back(complex_entry(res[i], "model.residues[" + std::to_string(i) + "]"));
    }
    m.d = number_field_or(j, "d", "model", 0.0);
    m.e = number_field_or(j, "e", "model", 0.0);
    m.validate();
    return m;
}

json model_to_json(const PoleResidueModel& m) {
    json poles = json::array(), res = json::array();
    for (std::size_t i = 0; i < m.poles.size(); ++i) {
        poles.push_back(complex_json(m.poles[i]));
        res.push_back(complex_json(m.residues[i]));
    }
    return json{{"poles", poles}, {"residues", res}, {"d", m.d}, {"e", m.e}, {"freq_unit", "rad_per_ns"}};
}

PoleResidueModel load_model(const std::filesystem::path& path) { return model_from_json(read_json(path)); }

void save_model(const PoleResidueModel& m, const std::filesystem::path& path) { write_json(model_to_json(m), path); }

// ---- circuits ----------------------------------------------------------------------------------

BruneCircuit circuit_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("circuit: expected an object");
    BruneCircuit c;
    c.preamble = axis_list(j, "preamble", "circuit");
    const json& st = field(j, "stages", "circuit");
    if (!st.is_array()) throw ValidationError("circuit.stages: expected an array");
    for (std::size_t i = 0; i < st.size(); ++i) {
        const std::string path = "circuit.stages[" + std::to_string(i) + "]";
        const json& s = st[i];
        if (!field(s, "kind", path).is_string()) throw ValidationError(path + ".kind: expected a string");
        const std::string kind = s.at("kind").get<std::string>();
        BruneStage stage;
        const double R = number_field(s, "R", path);
        if (kind == "regular") {
            const double C = number_field(s, "C", path);
            const double L11 = number_field(s, "L11", path);
            const double L22 = number_field(s, "L22", path);
            try {
                stage = make_regular_stage(R, C, L11, L22);
            } catch (const ValidationError& e) {
                throw ValidationError(path + ": " + e.what());
            }
            stage.omega1 = number_field_or(s, "f1_GHz", path, 0.0) * kTwoPi;
        } else if (kind == "degenerate") {
            try {
                stage = make_degenerate_stage(R, number_field(s, "C", path));
            } catch (const ValidationError& e) {
                throw ValidationError(path + ": " + e.what());
            }
        } else if (kind == "inductive_degenerate") {
            stage.kind = StageKind::InductiveDegenerate;
            stage.R = R;
            stage.L_shunt = number_field(s, "L", path);
            if (!(stage.L_shunt > 0)) throw ValidationError(path + ".L: must be positive");
        } else {
            throw ValidationError(path + ".kind: unknown stage kind '" + kind + "'");
        }
        stage.tail = axis_list(s, "tail", path);
        c.stages.push_back(std::move(stage));
    }
    const json& t = field(j, "terminal", "circuit");
    if (!field(t, "kind", "circuit.terminal").is_string()) throw ValidationError("circuit.terminal.kind: expected a string");
    const std::string tk = t.at("kind").get<std::string>();
    if (tk == "resistor") {
        c.terminal = TerminalKind::Resistor;
        c.r_terminal = number_field(t, "R", "circuit.terminal");
        if (!(c.r_terminal > 0)) throw ValidationError("circuit.terminal.R: must be positive");
    } else if (tk == "short") {
        c.terminal = TerminalKind::Short;
    } else if (tk == "open") {
        c.terminal = TerminalKind::Open;
    } else {
        throw ValidationError("circuit.terminal.kind: unknown terminal '" + tk + "'");
    }
    validate_circuit(c);
    return c;
}

json circuit_to_json(const BruneCircuit& c) {
    json j;
    if (!c.preamble.empty()) {
        json p = json::array();
        for (const auto& e : c.preamble) p.push_back(axis_json(e));
        j["preamble"] = p;
    }
    json stages = json::array();
    for (const auto& s : c.stages) {
        json o;
        switch (s.kind) {
            case StageKind::Regular:
                o = json{{"kind", "regular"}, {"R", s.R},   {"C", s.C},   {"L11", s.L11}, {"L22", s.L22},
                         {"M", s.M},          {"t", s.t},   {"L1", s.L1}, {"L2", s.L2},   {"L3", s.L3},
                         {"f1_GHz", s.omega1 / kTwoPi}};
                break;
            case StageKind::Degenerate: o = json{{"kind", "degenerate"}, {"R", s.R}, {"C", s.C}}; break;
            case StageKind::InductiveDegenerate:
                o = json{{"kind", "inductive_degenerate"}, {"R", s.R}, {"L", s.L_shunt}};
                break;
        }
        if (!s.tail.empty()) {
            json t = json::array();
            for (const auto& e : s.tail) t.push_back(axis_json(e));
            o["tail"] = t;
        }
        stages.push_back(std::move(o));
    }
    j["stages"] = stages;
    switch (c.terminal) {
        case TerminalKind::Resistor: j["terminal"] = json{{"kind", "resistor"}, {"R", c.r_terminal}}; break;
        case TerminalKind::Short: j["terminal"] = json{{"kind", "short"}}; break;
        case TerminalKind::Open: j["terminal"] = json{{"kind", "open"}}; break;
    }
    j["units"] = json{{"R", "Ohm"}, {"C", "nF"}, {"L", "nH"}};
    return j;
}

BruneCircuit load_circuit(const std::filesystem::path& path) { return circuit_from_json(read_json(path)); }

// Pole indices are 1-based here, matching the numbering of a printed pole table.
json foster_to_json(const FosterCircuit& c) {
    json stages = json::array();
    for (const auto& s : c.stages) {
        stages.push_back(json{{"R", s.R},
                              {"L", s.L},
                              {"C", s.C},
                              {"f0_GHz", s.omega0 / kTwoPi},
                              {"Q", s.Q},
                              {"residue_ratio", s.residue_ratio()},
                              {"poles", {s.source_pole_indices[0] + 1, s.source_pole_indices[1] + 1}}});
    }
    json dropped = json::array();
    for (const auto& d : c.dropped) {
        json idx = json::array();
        for (auto i : d.pole_indices)
            if (i != PoleResidueModel::npos) idx.push_back(i + 1);
        dropped.push_back(json{{"poles", idx}, {"reason", to_string(d.reason)}});
    }
    return json{{"stages", stages},
                {"dropped", dropped},
                {"warnings", c.warnings},
                {"units", {{"R", "Ohm"}, {"C", "nF"}, {"L", "nH"}}}};
}

json pr_report_to_json(const PrReport& r) {
    json v = json::array();
    for (const auto& x : r.violations) {
        v.push_back(json{{"kind", to_string(x.kind)}, {"location", complex_json(x.location)}, {"magnitude", x.magnitude}});
    }
    return json{{"is_pr", r.is_pr},
                {"violations", v},
                {"min_real_part", r.min_real_part},
                {"f_at_min_GHz", r.omega_at_min / kTwoPi},
                {"notes", r.notes}};
}

json pole_to_json(const QubitPole& p) {
    return json{{"f_qb_GHz", p.f_qb}, {"re_s", p.xi_qb}, {"im_s", p.omega_qb}, {"Q", p.Q_qb}, {"T1_ns", p.T1}};
}

json system_to_json(const QuantizedSystem& sys) {
    json m = json::array();
    for (const auto& v : sys.coupling_vectors) m.push_back(vector_json(v));
    json baths = json::array();
    for (const auto& b : sys.baths) {
        json o{{"kind", to_string(b.kind)}, {"R", b.R}};
        if (b.kind == BathKind::MidLadder) o["C_tail"] = b.C_tail;
        if (b.clamped) o["clamped"] = true;
        baths.push_back(std::move(o));
    }
    json j{{"dimension", sys.dimension()},
           {"cap_matrix", matrix_json(sys.cap)},
           {"stiffness", matrix_json(sys.stiffness)},
           {"junction_vector", vector_json(sys.junction_vector)},
           {"coupling_vectors", m},
           {"baths", baths},
           {"t", sys.t},
           {"C_prime", sys.C_prime},
           {"L_prime", sys.L_prime},
           {"junction", {{"L_J", sys.junction.L_J}, {"C_J", sys.junction.C_J}, {"temperature", sys.junction.temperature}}},
           {"units", {{"cap_matrix", "nF"}, {"stiffness", "1/nH"}, {"C", "nF"}, {"L", "nH"}, {"R", "Ohm"}}},
           {"warnings", sys.warnings}};
    if (sys.degenerate_index) j["degenerate_stage"] = *sys.degenerate_index + 1;
    return j;
}

json rates_to_json(const QuantizedSystem& sys, const RelaxationRates& r) {
    json per = json::array();
    for (std::size_t j = 0; j < r.rates.size(); ++j) {
        per.push_back(json{{"resistor", j + 1}, {"kind", to_string(sys.baths[j].kind)}, {"R", sys.baths[j].R}, {"rate_per_ns", r.rates[j]}});
    }
    return json{{"mode_index", r.mode_index},
                {"f_qb_GHz", r.omega_qb / kTwoPi},
                {"rates", per},
                {"total_rate_per_ns", r.total},
                {"T1_ns", r.total > 0 ? 1.0 / r.total : std::numeric_limits<double>::infinity()}};
}

json read_json(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_json(const json& j, const std::filesystem::path& path) { write_file(dump(j), path); }

// ---- Touchstone --------------------------------------------------------------------------------

namespace {

struct Token {
    double value;
    std::size_t line;
};

cdouble from_pair(TouchstoneFormat fmt, double a, double b) {
    switch (fmt) {
        case TouchstoneFormat::RI: return {a, b};
        case TouchstoneFormat::MA: return std::polar(a, b * std::numbers::pi / 180);
        case TouchstoneFormat::DB: return std::polar(std::pow(10.0, a / 20), b * std::numbers::pi / 180);
    }
    return {};
}

[[noreturn]] void ts_error(std::size_t line, const std::string& what) {
    throw ValidationError("touchstone line " + std::to_string(line) + ": " + what);
}

}  // namespace

TouchstoneData parse_touchstone(std::istream& in, std::size_t ports) {
    double freq_scale = 1.0;  // to GHz; Touchstone default unit is GHz
    TouchstoneFormat fmt = TouchstoneFormat::MA;
    double z0 = 50.0;
    bool have_option = false;
    std::vector<Token> tokens;
    std::vector<std::size_t> first_line_counts;  // tokens on the first data line
    std::size_t first_data_line = 0;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto bang = line.find('!'); bang != std::string::npos) line.erase(bang);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok[0] == '[') ts_error(lineno, "Touchstone 2.x keywords are not supported");
        if (tok[0] == '#') {
            if (have_option) continue;  // only the first option line counts
            have_option = true;
            std::vector<std::string> opts;
            if (tok.size() > 1) opts.push_back(tok.substr(1));
            while (ls >> tok) opts.push_back(tok);
            for (std::size_t i = 0; i < opts.size(); ++i) {
                const std::string o = upper(opts[i]);
                if (o == "HZ") freq_scale = 1e-9;
                else if (o == "KHZ") freq_scale = 1e-6;
                else if (o == "MHZ") freq_scale = 1e-3;
                else if (o == "GHZ") freq_scale = 1.0;
                else if (o == "S") continue;
                else if (o == "Y" || o == "Z" || o == "H" || o == "G") ts_error(lineno, "only S parameters are supported");
                else if (o == "RI") fmt = TouchstoneFormat::RI;
                else if (o == "MA") fmt = TouchstoneFormat::MA;
                else if (o == "DB") fmt = TouchstoneFormat::DB;
                else if (o == "R") {
                    if (i + 1 >= opts.size()) ts_error(lineno, "option R needs a value");
                    try {
                        std::size_t pos = 0;
                        z0 = std::stod(opts[++i], &pos);
                    } catch (const std::exception&) {
                        ts_error(lineno, "bad reference impedance '" + opts[i] + "'");
                    }
                    if (!(z0 > 0)) ts_error(lineno, "reference impedance must be positive");
                } else {
                    ts_error(lineno, "unknown option '" + opts[i] + "'");
                }
            }
            continue;
        }
        std::size_t count = 0;
        std::istringstream ds(line);
        while (ds >> tok) {
            double v = 0;
            auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) ts_error(lineno, "not a number: '" + tok + "'");
            if (!std::isfinite(v)) ts_error(lineno, "non-finite value");
            tokens.push_back({v, lineno});
            ++count;
        }
        if (first_data_line == 0) {
            first_data_line = lineno;
            first_line_counts.push_back(count);
        }
    }
    if (tokens.empty()) throw ValidationError("touchstone: no data");
    if (ports == 0) {
        const std::size_t c = first_line_counts.front();
        if (c == 3) ports = 1;
        else if (c == 7) ports = 3;
        else ts_error(first_data_line, "cannot infer port count from " + std::to_string(c) + " values (1- or 3-port expected)");
    }
    if (ports != 1 && ports != 3) throw UnsupportedError("touchstone: only 1- and 3-port data are supported");

    TouchstoneData ts;
    ts.ports = ports;
    ts.z0 = z0;
    ts.source_format = fmt;
    const std::size_t rec = 1 + 2 * ports * ports;
    if (tokens.size() % rec != 0) ts_error(tokens.back().line, "incomplete data record");
    for (std::size_t k = 0; k < tokens.size(); k += rec) {
        const double f = tokens[k].value * freq_scale;
        if (!ts.freq_ghz.empty() && !(f > ts.freq_ghz.back())) ts_error(tokens[k].line, "frequencies must be strictly increasing");
        if (f < 0) ts_error(tokens[k].line, "negative frequency");
        ts.freq_ghz.push_back(f);
        std::vector<cdouble> row;
        std::vector<std::array<double, 2>> raw;
        for (std::size_t p = 0; p < ports * ports; ++p) {
            const double a = tokens[k + 1 + 2 * p].value, b = tokens[k + 2 + 2 * p].value;
            row.push_back(from_pair(fmt, a, b));
            raw.push_back({a, b});
        }
        ts.s.push_back(std::move(row));
        ts.raw.push_back(std::move(raw));
    }
    return ts;
}

TouchstoneData load_touchstone(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::size_t ports = 0;
    const std::string ext = upper(path.extension().string());
    if (ext.size() == 4 && ext[1] == 'S' && ext[3] == 'P' && std::isdigit(static_cast<unsigned char>(ext[2]))) {
        ports = static_cast<std::size_t>(ext[2] - '0');
    }
    return parse_touchstone(in, ports);
}

std::string serialize_touchstone(const TouchstoneData& ts, TouchstoneFormat fmt) {
    std::ostringstream os;
    const char* name = fmt == TouchstoneFormat::RI ? "RI" : fmt == TouchstoneFormat::MA ? "MA" : "DB";
    os << "! " << ts.ports << "-port S-parameters\n";
    os << "# GHZ S " << name << " R " << format_double(ts.z0) << "\n";
    const bool have_raw = fmt == ts.source_format && ts.raw.size() == ts.s.size();
    auto pair = [&](std::size_t k, std::size_t p) {
        const cdouble z = ts.s[k][p];
        // Reuse the numbers as read while they still describe the stored value.
        if (have_raw && ts.raw[k].size() == ts.s[k].size()) {
            const auto [ra, rb] = ts.raw[k][p];
            if (from_pair(fmt, ra, rb) == z) {
                os << " " << format_double(ra) << " " << format_double(rb);
                return;
            }
        }
        double a = z.real(), b = z.imag();
        if (fmt != TouchstoneFormat::RI) {
            a = std::abs(z);
            if (fmt == TouchstoneFormat::DB) a = 20 * std::log10(a);
            b = std::arg(z) * 180 / std::numbers::pi;
        }
        os << " " << format_double(a) << " " << format_double(b);
    };
    for (std::size_t k = 0; k < ts.freq_ghz.size(); ++k) {
        os << format_double(ts.freq_ghz[k]);
        for (std::size_t i = 0; i < ts.ports; ++i) {
            if (i > 0) os << "\n ";
            for (std::size_t j = 0; j < ts.ports; ++j) pair(k, i * ts.ports + j);
        }
        os << "\n";
    }
    return os.str();
}

std::vector<ZSample> s_to_z(const TouchstoneData& ts, std::size_t port) {
    if (port >= ts.ports) throw ValidationError("s_to_z: port index out of range");
    std::vector<ZSample> out;
    for (std::size_t k = 0; k < ts.freq_ghz.size(); ++k) {
        const cdouble s = ts.at(k, port, port);
        ZSample z;
        z.f_ghz = ts.freq_ghz[k];
        if (s == cdouble(1.0, 0.0)) {
            z.infinite = true;
            z.z = {std::numeric_limits<double>::infinity(), 0.0};
        } else {
            z.z = ts.z0 * (1.0 + s) / (1.0 - s);
        }
        out.push_back(z);
    }
    return out;
}

// ---- netlists ----------------------------------------------------------------------------------

namespace {

class NetlistWriter {
public:
    explicit NetlistWriter(std::ostringstream& os) : os_(os) {}
    int node() { return ++last_; }
    void R(const std::string& name, int a, int b, double v) { line("R" + name, a, b, v); }
    void L(const std::string& name, int a, int b, double nH) { line("L" + name, a, b, nH * 1e-9); }
    void C(const std::string& name, int a, int b, double nF) { line("C" + name, a, b, nF * 1e-9); }
    void K(const std::string& name, const std::string& l1, const std::string& l2, double k) {
        os_ << "K" << name << " L" << l1 << " L" << l2 << " " << format_double(k) << "\n";
    }

    // Two-terminal element between a and b, as a small subcircuit of its own.
    void axis(const std::string& name, const AxisElement& e, int a, int b) {
        switch (e.kind) {
            case AxisElementKind::SeriesL:
            case AxisElementKind::ShuntL: L(name, a, b, e.L); break;
            case AxisElementKind::SeriesC:
            case AxisElementKind::ShuntC: C(name, a, b, e.C); break;
            case AxisElementKind::SeriesParallelLC:
                L(name, a, b, e.L);
                C(name, a, b, e.C);
                break;
            case AxisElementKind::SeriesParallelRC:
                R(name, a, b, e.R);
                C(name, a, b, e.C);
                break;
            case AxisElementKind::ShuntSeriesLC: {
                const int m = node();
                L(name, a, m, e.L);
                C(name, m, b, e.C);
                break;
            }
            case AxisElementKind::ShuntSeriesRL: {
                const int m = node();
                R(name, a, m, e.R);
                L(name, m, b, e.L);
                break;
            }
        }
    }

    // Returns the node after the element (series) or the same node (shunt).
    int place(const std::string& name, const AxisElement& e, int at) {
        if (is_series(e.kind)) {
            const int nxt = node();
            axis(name, e, at, nxt);
            return nxt;
        }
        axis(name, e, at, 0);
        return at;
    }

private:
    void line(const std::string& name, int a, int b, double v) {
        os_ << name << " " << a << " " << b << " " << format_double(v) << "\n";
    }
    std::ostringstream& os_;
    int last_ = 1;
};

void junction_lines(std::ostringstream& os, const std::optional<JunctionParams>& jp) {
    if (!jp) return;
    os << "* linearized junction\n";
    os << "LJ 1 0 " << format_double(jp->L_J * 1e-9) << "\n";
    if (jp->C_J > 0) os << "CJ 1 0 " << format_double(jp->C_J * 1e-9) << "\n";
}

}  // namespace

std::string spice_netlist(const BruneCircuit& c, const std::optional<JunctionParams>& jp, const std::string& title) {
    std::ostringstream os;
    os << "* " << title << "\n* port: node 1 to ground; SI units\n";
    junction_lines(os, jp);
    NetlistWriter w(os);
    int at = 1;
    for (std::size_t i = 0; i < c.preamble.size(); ++i) at = w.place("P" + std::to_string(i + 1), c.preamble[i], at);
    for (std::size_t k = 0; k < c.stages.size(); ++k) {
        const auto& s = c.stages[k];
        const std::string id = std::to_string(k + 1);
        os << "* stage " << id << " (" << to_string(s.kind) << ")\n";
        const int b = w.node();
        w.R(id, at, b, s.R);
        switch (s.kind) {
            case StageKind::Regular: {
                // L11 from b to the capacitor node, L22 from the output to the same node; dots on b and the output.
                const int mid = w.node();
                const int out = w.node();
                w.L(id + "a", b, mid, s.L11);
                w.L(id + "b", out, mid, s.L22);
                w.K(id, id + "a", id + "b", s.M / std::sqrt(s.L11 * s.L22));
                w.C(id, mid, 0, s.C);
                at = out;
                break;
            }
            case StageKind::Degenerate:
                w.C(id, b, 0, s.C);
                at = b;
                break;
            case StageKind::InductiveDegenerate:
                w.L(id, b, 0, s.L_shunt);
                at = b;
                break;
        }
        for (std::size_t i = 0; i < s.tail.size(); ++i) at = w.place(id + "t" + std::to_string(i + 1), s.tail[i], at);
    }
    switch (c.terminal) {
        case TerminalKind::Resistor: os << "RT " << at << " 0 " << format_double(c.r_terminal) << "\n"; break;
        case TerminalKind::Short: os << "VT " << at << " 0 0\n"; break;
        case TerminalKind::Open: break;
    }
    os << ".end\n";
    return os.str();
}

std::string spice_netlist(const FosterCircuit& c, const std::optional<JunctionParams>& jp, const std::string& title) {
    std::ostringstream os;
    os << "* " << title << "\n* port: node 1 to ground; series chain of parallel RLC blocks; SI units\n";
    junction_lines(os, jp);
    NetlistWriter w(os);
    int at = 1;
    for (std::size_t k = 0; k < c.stages.size(); ++k) {
        const auto& s = c.stages[k];
        const std::string id = std::to_string(k + 1);
        const int b = (k + 1 == c.stages.size()) ? 0 : w.node();
        w.R(id, at, b, s.R);
        w.L(id, at, b, s.L);
        w.C(id, at, b, s.C);
        at = b;
    }
    os << ".end\n";
    return os.str();
}

// ---- CSV ---------------------------------------------------------------------------------------

std::string csv_sweep(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "L_J_nH,f_qb_GHz,abs_re_s_per_ns,Q,T1_ns,re_s_per_ns,im_s_rad_per_ns,branch_jump,cavity_warning\n";
    for (const auto& r : rows) {
        os << format_double(r.L_J) << "," << format_double(r.pole.f_qb) << "," << format_double(std::abs(r.pole.xi_qb)) << ","
           << format_double(r.pole.Q_qb) << "," << format_double(r.pole.T1) << "," << format_double(r.pole.xi_qb) << ","
           << format_double(r.pole.omega_qb) << ","
           << (r.branch_jump ? 1 : 0) << "," << (r.cavity_warning ? 1 : 0) << "\n";
    }
    return os.str();
}

std::string csv_impedance(const std::vector<ZSample>& rows) {
    std::ostringstream os;
    os << "f_GHz,re_Z_Ohm,im_Z_Ohm,infinite\n";
    for (const auto& r : rows) {
        os << format_double(r.f_ghz) << "," << format_double(r.z.real()) << "," << format_double(r.z.imag()) << ","
           << (r.infinite ? 1 : 0) << "\n";
    }
    return os.str();
}

// ---- configuration -----------------------------------------------------------------------------

void RunConfig::validate() const {
    if (!(f_lo_ghz >= 0) || !(f_hi_ghz > f_lo_ghz)) throw ValidationError("config: band must satisfy 0 <= f_lo < f_hi");
    if (precision_bits < 64 || precision_bits > 65536) throw ValidationError("config: precision_bits must be in [64, 65536]");
    if (!(cancellation_tol > 0) || !(pr_rel_tol > 0) || !(root_step_ulps > 0)) {
        throw ValidationError("config: tolerances must be positive");
    }
    if (!(preamble_tol >= 0)) throw ValidationError("config: preamble_tol must be >= 0");
    if (!(lj_min > 0) || !(lj_max >= lj_min) || lj_points < 1 || (lj_points == 1 && lj_max != lj_min)) {
        throw ValidationError("config: L_J sweep needs 0 < lj_min <= lj_max and lj_points >= 1");
    }
    if (C_J && !(*C_J >= 0)) throw ValidationError("config: C_J must be >= 0");
    if (!(temperature >= 0)) throw ValidationError("config: temperature must be >= 0");
}

RunConfig RunConfig::from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("config: expected an object");
    RunConfig c;
    for (const auto& [key, v] : j.items()) {
        const std::string path = "config." + key;
        auto boolean = [&]() {
            if (!v.is_boolean()) throw ValidationError(path + ": expected a boolean");
            return v.get<bool>();
        };
        auto count = [&]() {
            const double x = number(v, path);
            if (x < 0 || x != std::floor(x)) throw ValidationError(path + ": expected a non-negative integer");
            return static_cast<std::size_t>(x);
        };
        if (key == "band") {
            if (!v.is_array() || v.size() != 2) throw ValidationError(path + ": expected [f_lo, f_hi]");
            c.f_lo_ghz = number(v[0], path + "[0]");
            c.f_hi_ghz = number(v[1], path + "[1]");
        } else if (key == "precision_bits") c.precision_bits = static_cast<unsigned>(count());
        else if (key == "cancellation_tol") c.cancellation_tol = number(v, path);
        else if (key == "pr_rel_tol") c.pr_rel_tol = number(v, path);
        else if (key == "root_step_ulps") c.root_step_ulps = number(v, path);
        else if (key == "preamble_tol") c.preamble_tol = number(v, path);
        else if (key == "foster_drop_negative") c.foster_drop_negative = boolean();
        else if (key == "foster_drop_out_of_band") c.foster_drop_out_of_band = boolean();
        else if (key == "foster_drop_real") c.foster_drop_real = boolean();
        else if (key == "lj_min") c.lj_min = number(v, path);
        else if (key == "lj_max") c.lj_max = number(v, path);
        else if (key == "lj_points") c.lj_points = count();
        else if (key == "C_J") c.C_J = number(v, path);
        else if (key == "temperature") c.temperature = number(v, path);
        else if (key == "out_dir") {
            if (!v.is_string()) throw ValidationError(path + ": expected a string");
            c.out_dir = v.get<std::string>();
        } else {
            throw ValidationError(path + ": unknown key");
        }
    }
    c.validate();
    return c;
}

json RunConfig::to_json() const {
    json j{{"band", {f_lo_ghz, f_hi_ghz}},
                {"precision_bits", precision_bits},
                {"cancellation_tol", cancellation_tol},
                {"pr_rel_tol", pr_rel_tol},
                {"root_step_ulps", root_step_ulps},
                {"preamble_tol", preamble_tol},
                {"foster_drop_negative", foster_drop_negative},
                {"foster_drop_out_of_band", foster_drop_out_of_band},
                {"foster_drop_real", foster_drop_real},
                {"lj_min", lj_min},
                {"lj_max", lj_max},
                {"lj_points", lj_points},
                {"temperature", temperature},
                {"out_dir", out_dir.string()}};
    if (C_J) j["C_J"] = *C_J;
    return j;
}

std::vector<double> RunConfig::lj_grid() const {
    std::vector<double> g;
    if (lj_points == 1) return {lj_min};
    for (std::size_t i = 0; i < lj_points; ++i) {
        g.push_back(lj_min + (lj_max - lj_min) * static_cast<double>(i) / static_cast<double>(lj_points - 1));
    }
    return g;
}

// ---- provenance --------------------------------------------------------------------------------

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw NumericalError("sha256: digest failed");
    }
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

json provenance(const std::string& command, const std::vector<std::string>& args,
                const std::vector<std::filesystem::path>& inputs, const RunConfig& cfg) {
    json in = json::array();
    for (const auto& p : inputs) in.push_back(json{{"path", p.string()}, {"sha256", sha256_file(p)}});
    return json{{"tool", "brunesynth"},
                {"version", kVersion},
                {"command", command},
                {"arguments", args},
                {"inputs", in},
                {"config", cfg.to_json()},
                {"libraries",
                 {{"boost", BOOST_LIB_VERSION},
                  {"mpfr", mpfr_get_version()},
                  {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION)},
                  {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                  {"compiler", __VERSION__}}}};
}

}  // namespace brunesynth::io
