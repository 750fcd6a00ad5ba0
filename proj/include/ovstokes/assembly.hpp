#pragma once

#include <memory>
#include <vector>

#include <Eigen/Sparse>

#include "ovstokes/manufactured.hpp"
#include "ovstokes/stabilization.hpp"
#include "ovstokes/union_geometry.hpp"

namespace ovs {

struct AssemblyConfig {
    double t = 0.5;        // flux weight, 1/2 symmetric or 1 one-sided
    double gamma0 = 10.0;  // penalty base
    bool stabilize = true;
    bool project_visible = false;
    // use n_j literally in the j-side flux of the average (kept for comparison only)
    bool literal_flux_normal = false;
    bool mean_zero_pressure = false;
    int extra_quadrature = 0; // added to every default rule size
};

// gamma = gamma0 (k+2)^2 for velocity degree k+1
double gamma_penalty(const AssemblyConfig& cfg, int velocity_degree);

// global numbering over all basis functions of all patches:
// patch p owns [offset[p], offset[p+1]) = ux | uy | p
struct DofMap {
    std::vector<int> offset, nv, np;
    std::vector<char> active;    // basis function support meets the visible region (pressure: a good element when stabilized)
    std::vector<char> dirichlet; // prescribed velocity value
    Eigen::VectorXd prescribed;  // values on dirichlet entries, 0 elsewhere
    std::vector<int> free_index; // full -> reduced, -1 when not free
    int num_free = 0;
    int num_velocity_free = 0;
    int num_pressure_free = 0;

    int size() const { return offset.back(); }
    int ux(int p, int a) const { return offset[p] + a; }
    int uy(int p, int a) const { return offset[p] + nv[p] + a; }
    int pr(int p, int a) const { return offset[p] + 2 * nv[p] + a; }
    bool is_pressure(int g) const;
};

DofMap build_dofmap(const PatchHierarchy& h, bool stabilized);

// volume terms: A (grad:grad) and both B blocks (-q div v), full numbering
Eigen::SparseMatrix<double> assemble_volume(const PatchHierarchy& h, const DofMap& dm, const StabOperators* stab,
                                            int extra_quadrature = 0);
// Nitsche flux, symmetry, penalty and pressure-average terms over all interface segments
Eigen::SparseMatrix<double> assemble_interface(const PatchHierarchy& h, const DofMap& dm, const AssemblyConfig& cfg,
                                               const StabOperators* stab);
// body force over visible parts and tractions over Neumann boundary pieces
Eigen::VectorXd assemble_rhs(const PatchHierarchy& h, const DofMap& dm, const ExactSolution& ex, int extra_quadrature = 0);
// L2 projection of u on Dirichlet faces; marks the constrained entries of dm
void apply_dirichlet(const PatchHierarchy& h, DofMap& dm, const ExactSolution& ex);
// reduced numbering after Dirichlet and inactive entries are removed
void finalize_dofmap(DofMap& dm);

struct StokesSystem {
    DofMap dofs;
    Eigen::SparseMatrix<double> full; // symmetric, full numbering, before elimination
    Eigen::VectorXd full_rhs;
    Eigen::SparseMatrix<double> matrix; // reduced, symmetric indefinite
    Eigen::VectorXd rhs;
    bool mean_constraint = false;
    // full-numbering vector from a reduced solution
    Eigen::VectorXd expand(const Eigen::VectorXd& x) const;
};

StokesSystem assemble_system(const PatchHierarchy& h, const ExactSolution& ex, const AssemblyConfig& cfg,
                             const StabOperators* stab);

DiscreteField to_field(const PatchHierarchy& h, const DofMap& dm, const Eigen::VectorXd& full);

struct ErrorReport {
    double energy = 0.0;    // ||u - u_h||_{1,h}
    double l2_u = 0.0;
    double pressure = 0.0;  // ||p - p_h||_{0,h}
    double l2_p = 0.0;
    double p_jump = 0.0;    // sum over pairs of ||h^{1/2}[p_h]||
};

// exact may be null: norms of the discrete field itself
ErrorReport errors_vs_exact(const PatchHierarchy& h, const StabOperators* stab, const DiscreteField& f,
                            const ExactSolution* exact, int extra_quadrature = 0);
double energy_norm(const PatchHierarchy& h, const DiscreteField& f);
double pressure_norm(const PatchHierarchy& h, const StabOperators* stab, const DiscreteField& f);
double interface_pressure_jump(const PatchHierarchy& h, const StabOperators* stab, const DiscreteField& f);

} // namespace ovs
