#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "brunesynth/brune.hpp"

namespace brunesynth {

// Units: nH, nF, Ohm, rad/ns. Physical constants are SI and only enter through the temperature factor.
struct JunctionParams {
    double L_J = 0.0;
    double C_J = 0.0;
    double temperature = 0.0;  // K
    double flux_quantum = 2.067833848e-15;
    double hbar = 1.054571817e-34;
    double k_B = 1.380649e-23;

    void validate() const;
};

enum class BathKind { MidLadder, Terminal };
const char* to_string(BathKind k);

struct SpectralDensity {
    BathKind kind = BathKind::MidLadder;
    double R = 0.0;
    double C_tail = 0.0;  // sum of the stage capacitances from this resistor on (MidLadder)
    bool clamped = false;  // negative resistance replaced by zero; contributes nothing
};

// J(w); odd in w. Throws ValidationError for R <= 0.
double spectral_density(const SpectralDensity& sd, double omega);

struct QuantOptions {
    // C_{M+1}: placeholder capacitance on the last node (the terminal resistor is a bath, not an element).
    double terminal_capacitance = 0.0;
    // Replace negative stage resistances by 0 instead of rejecting the circuit.
    bool clamp_negative = false;
};

struct QuantizedSystem {
    Eigen::MatrixXd cap;        // nF, tridiagonal
    Eigen::MatrixXd stiffness;  // 1/nH, tridiagonal
    // One per resistor: stages 1..M, then the terminal (if it is a resistor).
    std::vector<Eigen::VectorXd> coupling_vectors;
    std::vector<SpectralDensity> baths;
    // Junction flux in terms of the mode coordinates: phi_J = sigma . Phi.
    Eigen::VectorXd junction_vector;
    std::optional<std::size_t> degenerate_index;  // 0-based stage index
    std::vector<double> t;
    std::vector<double> C_prime;
    std::vector<double> L_prime;
    JunctionParams junction;
    std::vector<std::string> warnings;

    std::size_t dimension() const { return static_cast<std::size_t>(cap.rows()); }
};

// Throws UnsupportedError for preamble/tail elements, inductive-degenerate stages, more than one
// degenerate stage or a shorted terminal; ValidationError for negative R (unless clamped) or a
// singular capacitance matrix.
QuantizedSystem build_system(const BruneCircuit& c, const JunctionParams& jp, const QuantOptions& opt = {});

// Same matrices assembled from branch quantities: F_C, C0 = F_C C F_C^t, the full inverse inductance
// matrix at finite L0, rotation U, truncation and the banding transformation T.
// Non-degenerate circuits only. Throws ConditioningError when L0 does not separate the two sectors.
QuantizedSystem build_system_via_transformations(const BruneCircuit& c, const JunctionParams& jp, double L0,
                                                 const QuantOptions& opt = {});

// Pieces of the transformation path, exposed for inspection.
Eigen::MatrixXd fc_matrix(std::size_t M);
Eigen::MatrixXd rotation_matrix(const std::vector<double>& t);
Eigen::MatrixXd banding_matrix(const std::vector<double>& t);

// 1-based resistor index j in 1..M+1 (M+1 is the terminal resistor).
Eigen::VectorXd coupling_vector(const QuantizedSystem& sys, std::size_t j);

// Projection used for a degenerate stage k (0-based): n -> n-1 coordinates with Phi_{k+1} = -Phi_k.
Eigen::MatrixXd degenerate_projection(std::size_t n, std::size_t k);

struct HarmonicMode {
    double omega = 0.0;  // rad/ns
    Eigen::VectorXd v;   // v^t C v = 1
    double f_ghz() const;
};

// Linearized junction: (M0 + sigma sigma^t / L_J) v = w^2 C v, ascending in w.
std::vector<HarmonicMode> harmonic_modes(const QuantizedSystem& sys);
std::size_t qubit_mode_index(const QuantizedSystem& sys, const std::vector<HarmonicMode>& modes);

// sigma^t n for the unit null vector n of M0 (non-degenerate case); nonzero means L_J lifts the zero mode.
double null_space_overlap(const QuantizedSystem& sys);

struct RelaxationRates {
    std::size_t mode_index = 0;
    double omega_qb = 0.0;      // rad/ns
    std::vector<double> rates;  // 1/ns, one per bath
    double total = 0.0;
};

// rate_j = 4 |m_j . v|^2 J_j(w)/(2w) coth(hbar w / 2 k_B T); T <= 0 takes coth = 1.
RelaxationRates relaxation_rates(const QuantizedSystem& sys, const std::vector<HarmonicMode>& modes,
                                 std::size_t qubit_index, double temperature);
RelaxationRates relaxation_rates(const QuantizedSystem& sys);

}  // namespace brunesynth
