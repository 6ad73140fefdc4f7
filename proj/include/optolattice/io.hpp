#pragma once

// CSV and JSON exports. Numbers are written with 17 significant digits so a
// file read back reproduces the in-memory doubles.

#include "optolattice/disorder.hpp"
#include "optolattice/experiment.hpp"
#include "optolattice/lattice.hpp"
#include "optolattice/measure.hpp"
#include "optolattice/topology.hpp"
#include "optolattice/circuit.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace optolattice::io {

using Json = nlohmann::ordered_json;

[[nodiscard]] std::string num(double v);
/// "re" for real values, "re+imj" otherwise.
[[nodiscard]] std::string num(Complex v, bool real);

void write_text(const std::string& path, const std::string& text);
[[nodiscard]] std::string read_text(const std::string& path);

/// Header row of site labels, one matrix row per line.
[[nodiscard]] std::string hamiltonian_csv(const CouplingHamiltonian& h);
[[nodiscard]] Json hamiltonian_json(const CouplingHamiltonian& h);
[[nodiscard]] CouplingHamiltonian hamiltonian_from_csv(const std::string& text);

[[nodiscard]] std::string eigenfreqs_csv(const ModeSet& m);
/// mode, eigenfreq, then one column per site label.
[[nodiscard]] std::string modeshapes_csv(const ModeSet& m, const std::vector<std::string>& labels);
[[nodiscard]] Json modes_json(const ModeSet& m, const std::vector<std::string>& labels);
[[nodiscard]] std::string participation_csv(const ParticipationMatrix& p, const std::vector<std::string>& labels);

/// k, Re rho, Im rho, E-, E+ with E-+ = offset(k) -+ |rho|.
[[nodiscard]] std::string curve_csv(const BulkCurve& c, const std::vector<double>& offset = {});
[[nodiscard]] Json prediction_json(const EdgePrediction& p);

/// sigma, mean, p5, p15, p85, p95.
[[nodiscard]] std::string ensemble_csv(const EnsembleResult& e);
[[nodiscard]] Json ensemble_json(const EnsembleResult& e);
/// sigma, then mean and std of every eigenfrequency.
[[nodiscard]] std::string ensemble_spectrum_csv(const EnsembleResult& e);

[[nodiscard]] Json recovery_json(const RecoveryResult& r);

/// Directory layout: manifest.json, eta_tilde.csv, traces/k<K>_i<I>.csv with
/// time and power column pairs per drive flux, and optionally truth.csv.
void save_dataset(const std::string& dir, const MeasurementDataset& d,
                  const std::optional<CouplingHamiltonian>& truth = std::nullopt);
struct LoadedDataset {
    MeasurementDataset data;
    std::optional<CouplingHamiltonian> truth;
};
[[nodiscard]] LoadedDataset load_dataset(const std::string& dir);

/// x,y,z per row in meters; an optional non-numeric header row is skipped.
[[nodiscard]] WireCurve wire_from_csv(const std::string& text);

}  // namespace optolattice::io
