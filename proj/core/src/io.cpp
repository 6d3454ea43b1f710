#include "defectlab/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace defectlab {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

double parse_double(const std::string& tok, const std::string& path) {
  char* end = nullptr;
  const double x = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    throw std::runtime_error("bad number '" + tok + "' in " + path);
  return x;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_profile_csv(const std::string& path, const Profile& profile) {
  std::ofstream out = open_out(path);
  out << "r,u,v,du,dv\n";
  for (std::size_t i = 0; i < profile.mesh.nodes.size(); ++i) {
    out << format_double(profile.mesh.nodes[i]) << ',' << format_double(profile.u[i]) << ','
        << format_double(profile.v[i]) << ',' << format_double(profile.du[i]) << ','
        << format_double(profile.dv[i]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

ProfileTable read_profile_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "r,u,v,du,dv")
    throw std::runtime_error("unexpected header in " + path);
  ProfileTable t;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    double vals[5];
    for (int c = 0; c < 5; ++c) {
      if (!std::getline(ss, tok, ',')) throw std::runtime_error("short row in " + path);
      vals[c] = parse_double(tok, path);
    }
    t.r.push_back(vals[0]);
    t.u.push_back(vals[1]);
    t.v.push_back(vals[2]);
    t.du.push_back(vals[3]);
    t.dv.push_back(vals[4]);
  }
  return t;
}

void write_perturbation_csv(const std::string& path, const PerturbationField& field) {
  std::ofstream out = open_out(path);
  out << "r,phi,w0,w1,w2,w3,w4\n";
  const int nn = static_cast<int>(field.radii.size());
  for (int i = 0; i < nn; ++i) {
    for (int j = 0; j < field.n_phi; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / field.n_phi;
      out << format_double(field.radii[i]) << ',' << format_double(phi);
      for (int l = 0; l < 5; ++l) out << ',' << format_double(field.at(l, i, j));
      out << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_qtensor_csv(const std::string& path, const QTensorField& field) {
  std::ofstream out = open_out(path);
  out << "r,phi,q11,q12,q13,q22,q23,q33\n";
  for (int i = 0; i < field.n_r(); ++i) {
    for (int j = 0; j < field.n_phi; ++j) {
      const Mat3 q = field.matrix(i, j);
      out << format_double(field.radii[i]) << ',' << format_double(field.phi(j)) << ','
          << format_double(q.a[0][0]) << ',' << format_double(q.a[0][1]) << ','
          << format_double(q.a[0][2]) << ',' << format_double(q.a[1][1]) << ','
          << format_double(q.a[1][2]) << ',' << format_double(q.a[2][2]) << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace defectlab
