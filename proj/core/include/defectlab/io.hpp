#pragma once

#include <string>
#include <vector>

#include "defectlab/field2d.hpp"
#include "defectlab/profile.hpp"

namespace defectlab {

// Writes r,u,v,du,dv rows with enough digits that reading them back is exact.
void write_profile_csv(const std::string& path, const Profile& profile);

struct ProfileTable {
  std::vector<double> r, u, v, du, dv;
};

ProfileTable read_profile_table(const std::string& path);

// One row per grid point: r,phi,w0,w1,w2,w3,w4.
void write_perturbation_csv(const std::string& path, const PerturbationField& field);

// One row per grid point: r,phi followed by the six distinct tensor entries.
void write_qtensor_csv(const std::string& path, const QTensorField& field);

std::string format_double(double x);

}  // namespace defectlab
