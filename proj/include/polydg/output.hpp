#pragma once

#include "polydg/analysis.hpp"
#include "polydg/config.hpp"
#include "polydg/run.hpp"

#include <filesystem>
#include <iosfwd>

namespace polydg {

/// Legacy ASCII VTK unstructured grid: one polygon cell per element, with
/// per-cell vertex copies so discontinuous fields display as computed.
void write_vtk(std::ostream& out, const DGSpace& space, const FieldCoeffs& U, const std::string& field = "u");

/// t,u,<state names...>
void write_probe_csv(std::ostream& out, const ProbeTrace& trace);
/// t,l2_sq,grad_sq,jump_sq,l4_4,flux_sq
void write_norms_csv(std::ostream& out, const NormHistory& h);
/// t,min,max
void write_range_csv(std::ostream& out, const RunArtifacts& art);
/// h,p,dofs,n_elements,error,l2_error,rate
void write_convergence_csv(std::ostream& out, const ConvergenceTable& table);
/// probe_x,probe_y,threshold,crossing_time,cv
void write_velocity_csv(std::ostream& out, const VelocityEstimate& v);

/// h,p,dofs,n_elements,cv,final_overshoot,final_undershoot,peak_overshoot,peak_undershoot,note
void write_wave_csv(std::ostream& out, const std::vector<WaveRow>& rows);

/// Writes the artifact directory of a run:
///   metadata.json, config.json, probe_<i>.csv, norms.csv, errors.csv,
///   range.csv, snapshots/u_<step>.vtk, checkpoint.txt
void write_artifacts(const std::filesystem::path& dir, const SimulationConfig& cfg, const RunArtifacts& art);

}  // namespace polydg
