#pragma once

#include <memory>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "tlesim/material.hpp"
#include "tlesim/mesh.hpp"
#include "tlesim/physics.hpp"

namespace tlesim {

// Discrete heat balance for one backward-Euler step on linear tetrahedral
// elements. The nodal residual is
//
//   R_i = sum_E int_E [ rho c (T - T_prev)/dt phi_i + k grad T . grad phi_i ] dv
//       + int_boundary [ eps sigma (T^4 - Tamb^4) + q_evap(T) ] phi_i da
//       - int_top L(x, y) e^{-tau} phi_i da
//
// with a lumped (nodal) rule for the storage term, exact one-point
// integration of conduction, and a three-point degree-2 rule on boundary
// triangles. The laser integral is promoted to a six-point degree-4 rule on
// facets wider than a third of the spot radius. tau is held fixed during a
// step (lagged coupling), so the laser load carries no Jacobian block.
class ThermalSystem {
 public:
  ThermalSystem(std::shared_ptr<const Mesh> mesh, Material material, LaserSpec laser,
                ChamberSpec chamber);

  void assemble(const std::vector<double>& T, const std::vector<double>& T_prev, double dt,
                double optical_depth, Eigen::VectorXd& residual,
                Eigen::SparseMatrix<double>* jacobian) const;

  // Top-surface load vector l_i = int L e^{-tau} phi_i da; its l2 norm scales
  // the Newton convergence test.
  const Eigen::VectorXd& laser_load(double optical_depth) const;

  double peak_boundary_temperature(const std::vector<double>& T) const;

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  const Material& material() const { return material_; }
  const LaserSpec& laser() const { return laser_; }
  const ChamberSpec& chamber() const { return chamber_; }
  double reflectivity() const { return reflectivity_; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  Material material_;
  LaserSpec laser_;
  ChamberSpec chamber_;
  double reflectivity_ = 0.0;

  std::vector<double> volume_;                    // per tet
  std::vector<std::array<Vec3, 4>> grad_;         // per tet, basis gradients
  std::vector<double> facet_area_;                // per boundary facet
  std::vector<char> facet_fine_laser_;            // per top facet: six-point rule?
  std::vector<int> boundary_vertices_;
  mutable Eigen::VectorXd laser_load_;            // cached for the last tau
  mutable double laser_load_tau_ = -1.0;
  mutable bool laser_load_valid_ = false;

  void build_laser_load(double optical_depth) const;
};

// One-call convenience used by tests: residual and Jacobian at T.
std::pair<Eigen::VectorXd, Eigen::SparseMatrix<double>> assemble_system(
    const ThermalSystem& system, const std::vector<double>& T, const std::vector<double>& T_prev,
    double dt, double optical_depth = 0.0);

} // namespace tlesim
