#include "tlesim/assembly.hpp"

#include <cmath>
#include <stdexcept>

#include "tlesim/constants.hpp"

namespace tlesim {

namespace {

struct TriRule {
  int n;
  const double (*bary)[3];
  const double* weight;
};

// Degree-2, three points.
constexpr double kBary3[3][3] = {{2.0 / 3, 1.0 / 6, 1.0 / 6},
                                 {1.0 / 6, 2.0 / 3, 1.0 / 6},
                                 {1.0 / 6, 1.0 / 6, 2.0 / 3}};
constexpr double kWeight3[3] = {1.0 / 3, 1.0 / 3, 1.0 / 3};

// Degree-4, six points.
constexpr double kA1 = 0.816847572980459, kB1 = 0.091576213509771;
constexpr double kA2 = 0.108103018168070, kB2 = 0.445948490915965;
constexpr double kW1 = 0.109951743655322, kW2 = 0.223381589678011;
constexpr double kBary6[6][3] = {{kA1, kB1, kB1}, {kB1, kA1, kB1}, {kB1, kB1, kA1},
                                 {kA2, kB2, kB2}, {kB2, kA2, kB2}, {kB2, kB2, kA2}};
constexpr double kWeight6[6] = {kW1, kW1, kW1, kW2, kW2, kW2};

constexpr TriRule kRule3{3, kBary3, kWeight3};
constexpr TriRule kRule6{6, kBary6, kWeight6};

} // namespace

ThermalSystem::ThermalSystem(std::shared_ptr<const Mesh> mesh, Material material, LaserSpec laser,
                             ChamberSpec chamber)
    : mesh_(std::move(mesh)),
      material_(std::move(material)),
      laser_(laser),
      chamber_(chamber) {
  validate(laser_);
  validate(chamber_, laser_);
  reflectivity_ = reflectivity_at(material_, laser_.wavelength);

  const auto& m = *mesh_;
  volume_.resize(m.num_tets());
  grad_.resize(m.num_tets());
  for (int t = 0; t < m.num_tets(); ++t) {
    const auto& e = m.tets[t];
    const double vol = m.tet_volume(t);
    if (!(vol > 0.0)) throw std::runtime_error("assembly requires positively oriented tets");
    volume_[t] = vol;
    for (int i = 0; i < 4; ++i) {
      const auto& lf = tet_face_vertices[i];
      const Vec3 area_vec = 0.5 * cross(m.vertices[e[lf[1]]] - m.vertices[e[lf[0]]],
                                        m.vertices[e[lf[2]]] - m.vertices[e[lf[0]]]);
      grad_[t][i] = (-1.0 / (3.0 * vol)) * area_vec;
    }
  }

  facet_area_.resize(m.num_facets());
  facet_fine_laser_.assign(m.num_facets(), 0);
  std::vector<char> on_boundary(m.num_vertices(), 0);
  for (int f = 0; f < m.num_facets(); ++f) {
    facet_area_[f] = m.facet_area(f);
    const auto& fv = m.facets[f].v;
    for (int v : fv) on_boundary[v] = 1;
    if (m.facets[f].tag == BoundaryTag::TopSurface) {
      double diameter = 0.0;
      for (int e = 0; e < 3; ++e)
        diameter = std::max(diameter, norm(m.vertices[fv[e]] - m.vertices[fv[(e + 1) % 3]]));
      facet_fine_laser_[f] = laser_.gaussian_radius < 3.0 * diameter;
    }
  }
  for (int v = 0; v < m.num_vertices(); ++v)
    if (on_boundary[v]) boundary_vertices_.push_back(v);
}

void ThermalSystem::build_laser_load(double optical_depth) const {
  const auto& m = *mesh_;
  laser_load_.setZero(m.num_vertices());
  for (int f = 0; f < m.num_facets(); ++f) {
    if (m.facets[f].tag != BoundaryTag::TopSurface) continue;
    const auto& fv = m.facets[f].v;
    const TriRule& rule = facet_fine_laser_[f] ? kRule6 : kRule3;
    for (int q = 0; q < rule.n; ++q) {
      double x = 0.0, y = 0.0;
      for (int i = 0; i < 3; ++i) {
        x += rule.bary[q][i] * m.vertices[fv[i]].x;
        y += rule.bary[q][i] * m.vertices[fv[i]].y;
      }
      const double flux = laser_flux(laser_, reflectivity_, x, y, optical_depth);
      const double wq = rule.weight[q] * facet_area_[f];
      for (int i = 0; i < 3; ++i) laser_load_[fv[i]] += wq * rule.bary[q][i] * flux;
    }
  }
  laser_load_tau_ = optical_depth;
  laser_load_valid_ = true;
}

const Eigen::VectorXd& ThermalSystem::laser_load(double optical_depth) const {
  if (!laser_load_valid_ || laser_load_tau_ != optical_depth) build_laser_load(optical_depth);
  return laser_load_;
}

double ThermalSystem::peak_boundary_temperature(const std::vector<double>& T) const {
  double peak = 0.0;
  for (int v : boundary_vertices_) peak = std::max(peak, T[v]);
  return peak;
}

void ThermalSystem::assemble(const std::vector<double>& T, const std::vector<double>& T_prev,
                             double dt, double optical_depth, Eigen::VectorXd& residual,
                             Eigen::SparseMatrix<double>* jacobian) const {
  const auto& m = *mesh_;
  const int n = m.num_vertices();
  if (static_cast<int>(T.size()) != n || static_cast<int>(T_prev.size()) != n)
    throw std::invalid_argument("temperature vector size does not match the mesh");
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");

  residual.setZero(n);
  std::vector<Eigen::Triplet<double>> trips;
  if (jacobian) trips.reserve(static_cast<size_t>(m.num_tets()) * 16 + m.num_facets() * 9 + n);

  const double rho_c = material_.density * material_.specific_heat;
  const double kappa = material_.thermal_conductivity;

  for (int t = 0; t < m.num_tets(); ++t) {
    const auto& e = m.tets[t];
    const double vol = volume_[t];
    const double mass = rho_c * vol / (4.0 * dt);
    for (int i = 0; i < 4; ++i) {
      residual[e[i]] += mass * (T[e[i]] - T_prev[e[i]]);
      if (jacobian) trips.emplace_back(e[i], e[i], mass);
    }
    for (int i = 0; i < 4; ++i) {
      double flux = 0.0;
      for (int j = 0; j < 4; ++j) {
        const double k_ij = kappa * vol * dot(grad_[t][i], grad_[t][j]);
        flux += k_ij * T[e[j]];
        if (jacobian) trips.emplace_back(e[i], e[j], k_ij);
      }
      residual[e[i]] += flux;
    }
  }

  const double t_amb = chamber_.ambient_temperature;
  for (int f = 0; f < m.num_facets(); ++f) {
    const auto& fv = m.facets[f].v;
    const double area = facet_area_[f];
    for (int q = 0; q < kRule3.n; ++q) {
      double tq = 0.0;
      for (int i = 0; i < 3; ++i) tq += kRule3.bary[q][i] * T[fv[i]];
      const double loss = radiative_flux(material_.emissivity, tq, t_amb) +
                          evaporative_heat_flux(material_, tq);
      const double wq = kRule3.weight[q] * area;
      for (int i = 0; i < 3; ++i) residual[fv[i]] += wq * kRule3.bary[q][i] * loss;
      if (jacobian) {
        const double dloss = radiative_flux_derivative(material_.emissivity, tq) +
                             evaporative_heat_flux_derivative(material_, tq);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            trips.emplace_back(fv[i], fv[j], wq * kRule3.bary[q][i] * kRule3.bary[q][j] * dloss);
      }
    }
  }

  residual -= laser_load(optical_depth);

  if (jacobian) {
    jacobian->resize(n, n);
    jacobian->setFromTriplets(trips.begin(), trips.end());
  }
}

std::pair<Eigen::VectorXd, Eigen::SparseMatrix<double>> assemble_system(
    const ThermalSystem& system, const std::vector<double>& T, const std::vector<double>& T_prev,
    double dt, double optical_depth) {
  Eigen::VectorXd residual;
  Eigen::SparseMatrix<double> jacobian;
  system.assemble(T, T_prev, dt, optical_depth, residual, &jacobian);
  return {std::move(residual), std::move(jacobian)};
}

} // namespace tlesim
