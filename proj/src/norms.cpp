#include "polydg/norms.hpp"

#include <cmath>

namespace polydg {

void NormHistory::push(const NormSample& s) {
  if (!samples_.empty()) {
    const NormSample& prev = samples_.back();
    if (!(s.t > prev.t)) throw NormError("norm samples must have increasing times");
    const double dt = s.t - prev.t;
    int_dg_ += 0.5 * dt * (prev.dg_sq() + s.dg_sq());
    int_l4_ += 0.5 * dt * (prev.l4_4 + s.l4_4);
  }
  samples_.push_back(s);
}

const NormSample& NormHistory::latest() const {
  if (samples_.empty()) throw NormError("norm history is empty");
  return samples_.back();
}

double NormHistory::energy_sq(const EnergyWeights& w) const {
  if (samples_.empty()) throw NormError("energy norm requested without an accumulated norm history");
  return latest().l2_sq + 2.0 * w.mu / (w.C_m * w.chi_m) * int_dg_ + w.a / w.C_m * int_l4_;
}

std::vector<double> NormHistory::energy_sq_trace(const EnergyWeights& w) const {
  if (samples_.empty()) throw NormError("energy norm requested without an accumulated norm history");
  std::vector<double> out;
  out.reserve(samples_.size());
  double dg = 0.0, l4 = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (i > 0) {
      const double dt = samples_[i].t - samples_[i - 1].t;
      dg += 0.5 * dt * (samples_[i - 1].dg_sq() + samples_[i].dg_sq());
      l4 += 0.5 * dt * (samples_[i - 1].l4_4 + samples_[i].l4_4);
    }
    out.push_back(samples_[i].l2_sq + 2.0 * w.mu / (w.C_m * w.chi_m) * dg + w.a / w.C_m * l4);
  }
  return out;
}

namespace {

NormSample accumulate(const DGSpace& space, const FieldCoeffs* u, const Eigen::VectorXd* eta,
                      const ExactField* exact, double t) {
  const PolyMesh& mesh = space.mesh();
  NormSample s;
  s.t = t;
  for (std::size_t k = 0; k < mesh.n_elements(); ++k) {
    const ElementQuadrature& q = space.volume(k);
    const Eigen::Index nq = q.weights.size();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(nq);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(nq, 2);
    if (u) {
      v = q.phi * space.local(*u, k);
      g = space.gradient(*u, k, q.points);
    }
    if (exact) {
      for (Eigen::Index r = 0; r < nq; ++r) {
        const Point2 x = q.points.row(r).transpose();
        v(r) -= exact->value(x, t);
        g.row(r) -= exact->gradient(x, t).transpose();
      }
    }
    const Eigen::ArrayXd v2 = v.array().square();
    s.l2_sq += (q.weights.array() * v2).sum();
    s.l4_4 += (q.weights.array() * v2.square()).sum();
    s.grad_sq += (q.weights.array() * g.rowwise().squaredNorm().array()).sum();
  }
  if (!u || !eta) return s;

  // u_ex is continuous, so the jump of the error is the jump of u_h; the
  // flux average of the error subtracts Sigma grad u_ex.
  for (std::size_t f = 0; f < mesh.faces().size(); ++f) {
    const Face& face = mesh.faces()[f];
    if (face.is_boundary()) continue;
    const double e = (*eta)(static_cast<Eigen::Index>(f));
    if (!(e > 0.0)) continue;
    const FaceQuadrature& fq = space.face_rule(f);
    const FaceTrace tr = space.face_trace(*u, f);
    const Matrix2 sp = mesh.region_of(face.plus).conductivity();
    const Matrix2 sm = mesh.region_of(face.minus).conductivity();
    for (Eigen::Index r = 0; r < fq.weights.size(); ++r) {
      const double jump = tr.plus(r) - tr.minus(r);
      Point2 gp = tr.grad_plus.row(r).transpose();
      Point2 gm = tr.grad_minus.row(r).transpose();
      if (exact) {
        const Point2 ge = exact->gradient(fq.points.row(r).transpose(), t);
        gp -= ge;
        gm -= ge;
      }
      const Point2 avg = 0.5 * (sp * gp + sm * gm);
      s.jump_sq += fq.weights(r) * e * jump * jump;
      s.flux_sq += fq.weights(r) * avg.squaredNorm() / e;
    }
  }
  return s;
}

}  // namespace

double l2_norm(const DGSpace& space, const FieldCoeffs& u) {
  return std::sqrt(accumulate(space, &u, nullptr, nullptr, 0.0).l2_sq);
}

double l4_norm(const DGSpace& space, const FieldCoeffs& u) {
  return std::pow(accumulate(space, &u, nullptr, nullptr, 0.0).l4_4, 0.25);
}

double dg_norm(const DGSpace& space, const FieldCoeffs& u, const Eigen::VectorXd& eta) {
  return std::sqrt(accumulate(space, &u, &eta, nullptr, 0.0).dg_sq());
}

NormSample sample_norms(const DGSpace& space, const FieldCoeffs& u, const Eigen::VectorXd& eta, double t) {
  return accumulate(space, &u, &eta, nullptr, t);
}

NormSample sample_error_norms(const DGSpace& space, const FieldCoeffs& u, const Eigen::VectorXd& eta,
                              const ExactField& exact, double t) {
  return accumulate(space, &u, &eta, &exact, t);
}

NormSample sample_exact_norms(const DGSpace& space, const ExactField& exact, double t) {
  return accumulate(space, nullptr, nullptr, &exact, t);
}

}  // namespace polydg
