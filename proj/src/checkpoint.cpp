#include "polydg/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace polydg {

namespace {

void write_vector(std::ostream& out, const char* label, const Eigen::VectorXd& v) {
  out << label;
  char buf[40];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, " %a", v(i));
    out << buf;
  }
  out << '\n';
}

double parse_hex(const std::string& tok) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size()) throw std::runtime_error("checkpoint: bad number '" + tok + "'");
  return v;
}

std::string expect(std::istream& in, const std::string& key) {
  std::string k, v;
  if (!(in >> k >> v) || k != key) throw std::runtime_error("checkpoint: expected '" + key + "'");
  return v;
}

Eigen::VectorXd read_vector(std::istream& in, const std::string& label, Eigen::Index n) {
  std::string k;
  if (!(in >> k) || k != label) throw std::runtime_error("checkpoint: expected '" + label + "'");
  Eigen::VectorXd v(n);
  std::string tok;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(in >> tok)) throw std::runtime_error("checkpoint: truncated '" + label + "'");
    v(i) = parse_hex(tok);
  }
  return v;
}

}  // namespace

void write_checkpoint(std::ostream& out, const SimState& s, double dt) {
  char buf[40];
  out << "polydg-checkpoint 1\n";
  out << "step " << s.step << '\n';
  std::snprintf(buf, sizeof buf, "%a", s.t0);
  out << "t0 " << buf << '\n';
  std::snprintf(buf, sizeof buf, "%a", dt);
  out << "dt " << buf << '\n';
  out << "dofs " << s.U.size() << " state " << s.Y.size() << " history " << (s.I_prev.size() > 0 ? 1 : 0)
      << '\n';
  write_vector(out, "U", s.U);
  for (std::size_t j = 0; j < s.Y.size(); ++j) write_vector(out, ("Y" + std::to_string(j)).c_str(), s.Y[j]);
  if (s.I_prev.size() > 0) write_vector(out, "I_prev", s.I_prev);
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string magic, version;
  if (!(in >> magic >> version) || magic != "polydg-checkpoint" || version != "1")
    throw std::runtime_error("checkpoint: missing 'polydg-checkpoint 1' header");
  Checkpoint c;
  c.state.step = std::stol(expect(in, "step"));
  c.state.t0 = parse_hex(expect(in, "t0"));
  c.dt = parse_hex(expect(in, "dt"));
  const long n = std::stol(expect(in, "dofs"));
  const long ns = std::stol(expect(in, "state"));
  const long hist = std::stol(expect(in, "history"));
  if (n <= 0 || ns < 0) throw std::runtime_error("checkpoint: bad sizes");
  c.state.U = read_vector(in, "U", n);
  for (long j = 0; j < ns; ++j) c.state.Y.push_back(read_vector(in, "Y" + std::to_string(j), n));
  if (hist) c.state.I_prev = read_vector(in, "I_prev", n);
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const SimState& s, double dt) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write checkpoint " + path.string());
  write_checkpoint(out, s, dt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace polydg
