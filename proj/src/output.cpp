#include "polydg/output.hpp"

#include "polydg/checkpoint.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace polydg {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw std::ios_base::failure("cannot write " + p.string());
  return out;
}

}  // namespace

void write_vtk(std::ostream& out, const DGSpace& space, const FieldCoeffs& U, const std::string& field) {
  const PolyMesh& mesh = space.mesh();
  std::size_t n_pts = 0;
  for (const auto& e : mesh.elements()) n_pts += e.vertices.size();
  out << "# vtk DataFile Version 3.0\npolydg field " << field << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << n_pts << " double\n";
  for (const auto& e : mesh.elements())
    for (int v : e.vertices) out << num(mesh.vertices()[v].x()) << ' ' << num(mesh.vertices()[v].y()) << " 0\n";
  out << "CELLS " << mesh.n_elements() << ' ' << n_pts + mesh.n_elements() << '\n';
  std::size_t next = 0;
  for (const auto& e : mesh.elements()) {
    out << e.vertices.size();
    for (std::size_t i = 0; i < e.vertices.size(); ++i) out << ' ' << next++;
    out << '\n';
  }
  out << "CELL_TYPES " << mesh.n_elements() << '\n';
  for (std::size_t k = 0; k < mesh.n_elements(); ++k) out << "7\n";
  out << "CELL_DATA " << mesh.n_elements() << "\nSCALARS region int 1\nLOOKUP_TABLE default\n";
  for (int r : mesh.region_index()) out << r << '\n';
  out << "POINT_DATA " << n_pts << "\nSCALARS " << field << " double 1\nLOOKUP_TABLE default\n";
  for (std::size_t k = 0; k < mesh.n_elements(); ++k) {
    const Element& e = mesh.element(k);
    PointSet v(static_cast<Eigen::Index>(e.vertices.size()), 2);
    for (std::size_t i = 0; i < e.vertices.size(); ++i)
      v.row(static_cast<Eigen::Index>(i)) = mesh.vertices()[e.vertices[i]].transpose();
    const Eigen::VectorXd vals = space.evaluate(U, k, v);
    for (Eigen::Index i = 0; i < vals.size(); ++i) out << num(vals(i)) << '\n';
  }
}

void write_probe_csv(std::ostream& out, const ProbeTrace& trace) {
  out << 't';
  for (const auto& c : trace.columns) out << ',' << c;
  out << '\n';
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    out << num(trace.t[i]);
    for (double v : trace.values[i]) out << ',' << num(v);
    out << '\n';
  }
}

void write_norms_csv(std::ostream& out, const NormHistory& h) {
  out << "t,l2_sq,grad_sq,jump_sq,l4_4,flux_sq\n";
  for (const auto& s : h.samples())
    out << num(s.t) << ',' << num(s.l2_sq) << ',' << num(s.grad_sq) << ',' << num(s.jump_sq) << ',' << num(s.l4_4)
        << ',' << num(s.flux_sq) << '\n';
}

void write_range_csv(std::ostream& out, const RunArtifacts& art) {
  out << "t,min,max\n";
  for (std::size_t i = 0; i < art.range_t.size(); ++i)
    out << num(art.range_t[i]) << ',' << num(art.range_min[i]) << ',' << num(art.range_max[i]) << '\n';
}

void write_convergence_csv(std::ostream& out, const ConvergenceTable& table) {
  out << "h,p,dofs,n_elements,error,l2_error,rate\n";
  for (const auto& r : table.rows)
    out << num(r.h) << ',' << r.p << ',' << r.dofs << ',' << r.n_elements << ',' << num(r.error) << ','
        << num(r.l2_error) << ',' << (std::isnan(r.rate) ? std::string() : num(r.rate)) << '\n';
}

void write_velocity_csv(std::ostream& out, const VelocityEstimate& v) {
  out << "probe_x,probe_y,threshold,crossing_time,cv\n";
  for (std::size_t i = 0; i < v.positions.size(); ++i)
    out << num(v.positions[i].x()) << ',' << num(v.positions[i].y()) << ',' << num(v.threshold) << ','
        << num(v.crossing_times[i]) << ',' << num(v.cv) << '\n';
}

void write_wave_csv(std::ostream& out, const std::vector<WaveRow>& rows) {
  out << "h,p,dofs,n_elements,cv,final_overshoot,final_undershoot,peak_overshoot,peak_undershoot,note\n";
  for (const auto& r : rows) {
    std::string note = r.cv_error;
    std::replace(note.begin(), note.end(), ',', ';');
    out << num(r.h) << ',' << r.p << ',' << r.dofs << ',' << r.n_elements << ','
        << (std::isnan(r.cv) ? std::string() : num(r.cv)) << ',' << num(r.final_shoot.overshoot) << ','
        << num(r.final_shoot.undershoot) << ',' << num(r.peak_shoot.overshoot) << ','
        << num(r.peak_shoot.undershoot) << ',' << note << '\n';
  }
}

void write_artifacts(const std::filesystem::path& dir, const SimulationConfig& cfg, const RunArtifacts& art) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::ios_base::failure("cannot create output directory " + dir.string());
  open_out(dir / "metadata.json") << art.metadata.dump(2) << '\n';
  open_out(dir / "config.json") << config_to_json(cfg).dump(2) << '\n';
  for (std::size_t i = 0; i < art.probes.size(); ++i) {
    auto out = open_out(dir / ("probe_" + std::to_string(i) + ".csv"));
    write_probe_csv(out, art.probes[i]);
  }
  if (!art.norms.empty()) {
    auto out = open_out(dir / "norms.csv");
    write_norms_csv(out, art.norms);
  }
  if (!art.error_norms.empty()) {
    auto out = open_out(dir / "errors.csv");
    write_norms_csv(out, art.error_norms);
  }
  if (!art.range_t.empty()) {
    auto out = open_out(dir / "range.csv");
    write_range_csv(out, art);
  }
  if (cfg.outputs.vtk) {
    std::filesystem::create_directories(dir / "snapshots", ec);
    for (const auto& s : art.snapshots) {
      auto out = open_out(dir / "snapshots" / ("u_" + std::to_string(s.step) + ".vtk"));
      write_vtk(out, *art.space, s.U);
    }
  }
  if (cfg.outputs.checkpoint) save_checkpoint(dir / "checkpoint.txt", art.final_state, art.dt);
}

}  // namespace polydg
