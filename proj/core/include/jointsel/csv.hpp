#pragma once

#include "jointsel/data.hpp"
#include "jointsel/synthgen.hpp"

#include <string>
#include <utility>
#include <vector>

namespace jointsel {

// Shortest decimal form that round-trips the double exactly.
std::string format_double(double x);

// Reads a headered comma-separated file into the pooled form. The named
// treatment column may hold integers or arbitrary level strings; levels are
// mapped to 0..q-1 in sorted order (numeric when all levels parse as
// integers, lexicographic otherwise). Every other column except the outcome
// becomes a covariate. Malformed or non-finite cells are errors naming the
// line and column. No quoting support; cells must not contain commas.
PooledDataset ingest_csv(const std::string& path,
                         const std::string& treatment_column,
                         const std::string& outcome_column);

// Inverse of ingest_csv up to column order: treatment first (original
// labels), outcome second, covariates after.
void export_csv(const PooledDataset& data, const std::string& path);

// key = value metadata, one entry per line, written in the given order.
// The format doubles as a CLI config file, so re-running a recorded
// experiment is just pointing the tool at the sidecar.
void write_metadata(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& entries);
std::vector<std::pair<std::string, std::string>> read_metadata(
    const std::string& path);

// Ground-truth sidecar for a generated draw: dimensions, support, nonzero
// coefficient rows, and the ATE maps. Generator parameters (seed included)
// belong in the run metadata, not here.
void write_truth_sidecar(const SynthDraw& draw, const std::string& path);

}  // namespace jointsel
