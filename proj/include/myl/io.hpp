#pragma once

#include "myl/grid.hpp"
#include "myl/kinetics.hpp"
#include "myl/operator.hpp"
#include "myl/weights.hpp"

#include <optional>
#include <string>

namespace myl {

// ---------------------------------------------------------------------------
// MYL1 array container. Layout (little endian):
//   bytes 0..3   magic 4D 59 4C 31 ("MYL1")
//   u32          rank
//   u32[rank]    dims
//   u32          block tag: 0 none, 1 phase-grid block, 2 basis block
//   if tag != 0: f64[6] + u32[2] header block
//                  tag 1: {q_min, q_max, p_min, p_max, 0, 0}, {n_q, n_p}
//                  tag 2: {x_min, x_max, 0, 0, 0, 0}, {n_x, 0}
//   payload      prod(dims) complex values as interleaved (re, im) f64,
//                row-major
// ---------------------------------------------------------------------------

struct MylArray {
    std::vector<uint32_t> dims;
    uint32_t block_tag = 0;
    double header_f64[6] = {0, 0, 0, 0, 0, 0};
    uint32_t header_u32[2] = {0, 0};
    std::vector<cplx> data;
};

void write_myl(const std::string& path, const MylArray& array);
MylArray read_myl(const std::string& path);

MylArray to_myl(const GridFunction& f);
MylArray to_myl(const OperatorMatrix& m);
GridFunction grid_function_from_myl(const MylArray& a);
OperatorMatrix operator_from_myl(const MylArray& a);

void write_myl(const std::string& path, const GridFunction& f);
void write_myl(const std::string& path, const OperatorMatrix& m);

/// CSV export: one row per q index, complex entries as "re+imj".
void write_csv(const std::string& path, const GridFunction& f);
void write_audit_csv(const std::string& path, const std::vector<AuditRow>& rows);

// ---------------------------------------------------------------------------
// Run configuration (JSON). Unknown keys are rejected; errors name the field.
// ---------------------------------------------------------------------------

struct GridConfig {
    PhaseGrid grid = make_grid(8.0, 64);
    double taper_radius = 0;  // 0: default fraction of the half extent
    double taper_width = 0;
};

struct ModelConfig {
    std::string hamiltonian;           // polynomial text
    std::vector<std::string> jumps;    // polynomial texts
    std::string lamb_shift;            // optional polynomial text
    double lambda_coupling = 1.0;
};

struct RunConfig {
    GridConfig grid;
    PositionBasis basis = make_basis(-8.0, 8.0, 128);
    WeightFunction weight;  // hbar = 1 weyl by default
    std::optional<ModelConfig> model;
    std::string digest;  // flattened key=value record for reproducibility logs
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Sample a model symbol (polynomial text) onto the grid with the configured
/// boundary taper.
GridFunction sample_model_symbol(const std::string& poly_text, const GridConfig& gc,
                                 double hbar);

/// Build the phase-space Lindblad model described by the config.
LindbladModel model_from_config(const RunConfig& cfg);

}  // namespace myl
