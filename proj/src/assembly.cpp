#include "ddlab/assembly.hpp"

#include "ddlab/elements.hpp"
#include "ddlab/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace ddlab {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Triplet = Eigen::Triplet<double>;

Vec2 perp(const Vec2& n) { return {-n.y(), n.x()}; }

FacetConditionKind to_facet_kind(BCKind k) {
  switch (k) {
    case BCKind::Dirichlet: return FacetConditionKind::Dirichlet;
    case BCKind::Traction: return FacetConditionKind::Traction;
    case BCKind::TVNF: return FacetConditionKind::TVNF;
    case BCKind::NVTF: return FacetConditionKind::NVTF;
    case BCKind::TDNNS: return FacetConditionKind::TDNNS;
    case BCKind::NDTNS: return FacetConditionKind::NDTNS;
  }
  throw std::logic_error("unreachable");
}

bool constrains_tangential(FacetConditionKind k) {
  return k == FacetConditionKind::TVNF || k == FacetConditionKind::TDNNS;
}

// Per-node constraint state collected from all facets touching the node.
struct NodeCon {
  bool dirichlet = false;
  bool tangential = false;
  bool normal = false;
  Vec2 value = Vec2::Zero();
  Vec2 n_accum = Vec2::Zero();
};

class Assembler {
 public:
  Assembler(const Space& space, const Problem& problem, const FacetConditionMap& bc,
            std::span<const int> elements, std::span<const int> dof_set,
            const AssemblyOptions& options)
      : space_(space),
        mesh_(*space.mesh),
        problem_(problem),
        bc_(bc),
        options_(options),
        coeffs_(problem_coefficients(problem, std::max(mesh_.num_regions(), 1))) {
    if (dof_set.empty()) {
      n_ = space_.total_dofs;
      identity_map_ = true;
    } else {
      n_ = static_cast<int>(dof_set.size());
      identity_map_ = false;
      global_to_local_.assign(space_.total_dofs, -1);
      for (int i = 0; i < n_; ++i) global_to_local_[dof_set[i]] = i;
      dof_set_.assign(dof_set.begin(), dof_set.end());
    }
    if (elements.empty()) {
      all_elements_.resize(mesh_.num_triangles());
      std::iota(all_elements_.begin(), all_elements_.end(), 0);
      elements_ = all_elements_;
    } else {
      all_elements_.assign(elements.begin(), elements.end());
      elements_ = all_elements_;
    }
    in_subset_.assign(mesh_.num_triangles(), 0);
    for (int k : elements_) in_subset_[k] = 1;
    rhs_ = VectorXd::Zero(n_);
    pressure_integral_.assign(n_, 0.0);
  }

  LinearSystem run() {
    if (space_.scheme == Scheme::TaylorHood)
      assemble_taylor_hood();
    else
      assemble_hdg();
    apply_rotations();
    eliminate_constraints();
    return finalize();
  }

 private:
  int local(int gdof) const { return identity_map_ ? gdof : global_to_local_[gdof]; }

  int local_checked(int gdof) const {
    int l = local(gdof);
    if (l < 0) throw std::logic_error("assemble: dof outside the subdomain dof set");
    return l;
  }

  void add(int i, int j, double v) { trips_.emplace_back(i, j, v); }

  void add_b(int prow, int vcol, double v) {
    // b-form entry and its transpose; track the block scale for the
    // mean-zero-pressure detection.
    if (v != 0.0) max_b_entry_ = std::max(max_b_entry_, std::abs(v));
    add(prow, vcol, v);
    add(vcol, prow, v);
  }

  // Facets of the subset that carry a condition, ascending for determinism,
  // each with its inside element.
  std::vector<std::pair<int, int>> conditioned_facets() const {
    std::vector<std::pair<int, int>> out;
    for (int k : elements_)
      for (int f : mesh_.triangle_facets[k])
        if (bc_.count(f)) out.emplace_back(f, k);
    std::sort(out.begin(), out.end());
    // A facet shared by two subset elements can appear twice (never happens
    // for boundary/interface facets, which have one inside element).
    out.erase(std::unique(out.begin(), out.end(),
                          [](auto& a, auto& b) { return a.first == b.first; }),
              out.end());
    return out;
  }

  //--------------------------------------------------------------------------
  // Taylor-Hood
  //--------------------------------------------------------------------------

  void assemble_taylor_hood() {
    const int k = space_.degree;
    const LagrangeBasis& vb = LagrangeBasis::get(k);
    const LagrangeBasis& pb = LagrangeBasis::get(k - 1);
    const TriangleRule& mat_rule = triangle_rule(std::max(2 * (k - 1), 2));
    const TriangleRule& rhs_rule = triangle_rule(8);
    const int nn = vb.size(), np = pb.size();

    // reference values at quadrature points
    std::vector<VectorXd> vvals(mat_rule.points.size()), pvals(mat_rule.points.size());
    std::vector<Eigen::MatrixX2d> vgrads(mat_rule.points.size());
    for (size_t q = 0; q < mat_rule.points.size(); ++q) {
      vvals[q] = vb.values(mat_rule.points[q]);
      pvals[q] = pb.values(mat_rule.points[q]);
      vgrads[q] = vb.gradients(mat_rule.points[q]);
    }
    std::vector<VectorXd> rhs_vals(rhs_rule.points.size());
    for (size_t q = 0; q < rhs_rule.points.size(); ++q) rhs_vals[q] = vb.values(rhs_rule.points[q]);

    MatrixXd gx(nn, 1), gy(nn, 1);
    for (int k_el : elements_) {
      AffineMap map = AffineMap::from_triangle(mesh_, k_el);
      const double area = 0.5 * map.det;
      const int region = mesh_.region_tags[k_el];
      const double acoef = coeffs_.a_coef[region];
      const double invl = coeffs_.inv_lambda[region];

      const auto& vnodes = space_.velocity_layout.element_nodes[k_el];
      const auto& pnodes = space_.pressure_layout.element_nodes[k_el];
      std::vector<int> vdof(2 * nn), pdof(np);
      for (int i = 0; i < nn; ++i) {
        vdof[2 * i] = local_checked(2 * vnodes[i]);
        vdof[2 * i + 1] = local_checked(2 * vnodes[i] + 1);
      }
      for (int m = 0; m < np; ++m)
        pdof[m] = local_checked(space_.pressure_offset() + pnodes[m]);

      MatrixXd a_xx = MatrixXd::Zero(nn, nn), a_yy = MatrixXd::Zero(nn, nn),
               a_xy = MatrixXd::Zero(nn, nn), lap = MatrixXd::Zero(nn, nn);
      MatrixXd bx = MatrixXd::Zero(np, nn), by = MatrixXd::Zero(np, nn);
      MatrixXd c = MatrixXd::Zero(np, np);

      for (size_t q = 0; q < mat_rule.points.size(); ++q) {
        const double w = mat_rule.weights[q] * area;
        // physical gradients: grad_x N = J^{-T} grad_xi N
        Eigen::MatrixX2d g = vgrads[q] * map.jac_inv;  // row i: (dN_i/dx, dN_i/dy)
        gx = g.col(0);
        gy = g.col(1);
        lap.noalias() += w * (gx * gx.transpose() + gy * gy.transpose());
        if (coeffs_.symmetric_gradient) {
          a_xx.noalias() += w * (gx * gx.transpose());
          a_yy.noalias() += w * (gy * gy.transpose());
          a_xy.noalias() += w * (gy * gx.transpose());  // (i,c=x),(j,d=y): dx N_j dy N_i
        }
        bx.noalias() -= w * (pvals[q] * gx.transpose());
        by.noalias() -= w * (pvals[q] * gy.transpose());
        if (invl != 0.0) c.noalias() -= (w * invl) * (pvals[q] * pvals[q].transpose());
        for (int m = 0; m < np; ++m) pressure_integral_[pdof[m]] += w * pvals[q](m);
      }

      for (int i = 0; i < nn; ++i)
        for (int j = 0; j < nn; ++j) {
          if (!coeffs_.symmetric_gradient) {
            // nu (grad u, grad v): component-diagonal
            add(vdof[2 * i], vdof[2 * j], acoef * lap(i, j));
            add(vdof[2 * i + 1], vdof[2 * j + 1], acoef * lap(i, j));
          } else {
            // 2 mu (eps u, eps v) = mu [delta_cd grad.grad + dN_j/dc dN_i/dd]
            const double mu = 0.5 * acoef;
            add(vdof[2 * i], vdof[2 * j], mu * (lap(i, j) + a_xx(i, j)));
            add(vdof[2 * i + 1], vdof[2 * j + 1], mu * (lap(i, j) + a_yy(i, j)));
            add(vdof[2 * i], vdof[2 * j + 1], mu * a_xy(i, j));
            add(vdof[2 * i + 1], vdof[2 * j], mu * a_xy(j, i));
          }
        }
      for (int m = 0; m < np; ++m)
        for (int j = 0; j < nn; ++j) {
          add_b(pdof[m], vdof[2 * j], bx(m, j));
          add_b(pdof[m], vdof[2 * j + 1], by(m, j));
        }
      if (invl != 0.0)
        for (int m = 0; m < np; ++m)
          for (int l = 0; l < np; ++l) add(pdof[m], pdof[l], c(m, l));

      for (size_t q = 0; q < rhs_rule.points.size(); ++q) {
        const double w = rhs_rule.weights[q] * area;
        Vec2 f = coeffs_.body_force(map.to_physical(rhs_rule.points[q]));
        for (int i = 0; i < nn; ++i) {
          rhs_[vdof[2 * i]] += w * f.x() * rhs_vals[q](i);
          rhs_[vdof[2 * i + 1]] += w * f.y() * rhs_vals[q](i);
        }
      }
    }

    assemble_taylor_hood_facets();
    resolve_node_constraints();
  }

  void assemble_taylor_hood_facets() {
    const int k = space_.degree;
    const LagrangeBasis& vb = LagrangeBasis::get(k);
    const EdgeRule& mass_rule = edge_rule(2 * k);
    const EdgeRule& load_rule = edge_rule(9);

    for (auto [f, k_el] : conditioned_facets()) {
      const FacetCondition& cond = bc_.at(f);
      const Facet& fc = mesh_.facets[f];
      const Vec2 p0 = mesh_.vertices[fc.v0], p1 = mesh_.vertices[fc.v1];
      const double len = (p1 - p0).norm();
      const Vec2 n_out = mesh_.outward_normal(f, k_el);
      const Vec2 t_out = perp(n_out);
      AffineMap map = AffineMap::from_triangle(mesh_, k_el);

      const auto& fnodes = space_.velocity_layout.facet_nodes[f];
      const auto& enodes = space_.velocity_layout.element_nodes[k_el];
      // local basis index of each facet node
      std::vector<int> bidx(fnodes.size());
      for (size_t a = 0; a < fnodes.size(); ++a) {
        auto it = std::find(enodes.begin(), enodes.end(), fnodes[a]);
        bidx[a] = static_cast<int>(it - enodes.begin());
      }

      switch (cond.kind) {
        case FacetConditionKind::Dirichlet:
          for (int node : fnodes) {
            NodeCon& nc = node_con_[node];
            nc.dirichlet = true;
            nc.value = cond.value(space_.velocity_layout.node_xy[node]);
          }
          break;
        case FacetConditionKind::TVNF:
        case FacetConditionKind::TDNNS:
        case FacetConditionKind::NVTF:
        case FacetConditionKind::NDTNS: {
          const bool tang = constrains_tangential(cond.kind);
          for (int node : fnodes) {
            NodeCon& nc = node_con_[node];
            (tang ? nc.tangential : nc.normal) = true;
            nc.n_accum += n_out;
          }
          // flux load: sigma_nn = g pairs with v.n, sigma_nt = g with v.t
          const Vec2 dir = tang ? n_out : t_out;
          for (size_t q = 0; q < load_rule.points.size(); ++q) {
            const double s = load_rule.points[q];
            const Vec2 x = p0 + s * (p1 - p0);
            const double w = load_rule.weights[q] * len * cond.g(x);
            VectorXd nv = vb.values(map.to_reference(x));
            for (size_t a = 0; a < fnodes.size(); ++a) {
              rhs_[local_checked(2 * fnodes[a])] += w * nv(bidx[a]) * dir.x();
              rhs_[local_checked(2 * fnodes[a] + 1)] += w * nv(bidx[a]) * dir.y();
            }
          }
          break;
        }
        case FacetConditionKind::Robin: {
          const double coef =
              options_.robin_alpha * coeffs_.robin_base[mesh_.region_tags[k_el]];
          MatrixXd mass = MatrixXd::Zero(fnodes.size(), fnodes.size());
          for (size_t q = 0; q < mass_rule.points.size(); ++q) {
            const double s = mass_rule.points[q];
            const double w = mass_rule.weights[q] * len;
            VectorXd nv = vb.values(map.to_reference(p0 + s * (p1 - p0)));
            for (size_t a = 0; a < fnodes.size(); ++a)
              for (size_t b = 0; b < fnodes.size(); ++b)
                mass(a, b) += w * nv(bidx[a]) * nv(bidx[b]);
          }
          for (size_t a = 0; a < fnodes.size(); ++a)
            for (size_t b = 0; b < fnodes.size(); ++b) {
              add(local_checked(2 * fnodes[a]), local_checked(2 * fnodes[b]),
                  coef * mass(a, b));
              add(local_checked(2 * fnodes[a] + 1), local_checked(2 * fnodes[b] + 1),
                  coef * mass(a, b));
            }
          break;
        }
        case FacetConditionKind::Traction: {
          for (size_t q = 0; q < load_rule.points.size(); ++q) {
            const double s = load_rule.points[q];
            const Vec2 x = p0 + s * (p1 - p0);
            const Vec2 tr = cond.value(x);
            if (tr.squaredNorm() == 0.0) continue;
            const double w = load_rule.weights[q] * len;
            VectorXd nv = vb.values(map.to_reference(x));
            for (size_t a = 0; a < fnodes.size(); ++a) {
              rhs_[local_checked(2 * fnodes[a])] += w * tr.x() * nv(bidx[a]);
              rhs_[local_checked(2 * fnodes[a] + 1)] += w * tr.y() * nv(bidx[a]);
            }
          }
          break;
        }
        case FacetConditionKind::Neumann:
          break;
      }
    }
  }

  void resolve_node_constraints() {
    for (const auto& [node, nc] : node_con_) {
      const int dx = local_checked(2 * node);
      const int dy = local_checked(2 * node + 1);
      if (nc.dirichlet) {
        constrain(dx, nc.value.x());
        constrain(dy, nc.value.y());
      } else if (nc.tangential && nc.normal) {
        constrain(dx, 0.0);
        constrain(dy, 0.0);
      } else {
        // averaged outward normal at staircase corners, recorded per node
        const Vec2 n = nc.n_accum.normalized();
        rotations_.push_back({dx, dy, n.x(), n.y()});
        constrain(nc.tangential ? dy : dx, 0.0);
      }
    }
  }

  //--------------------------------------------------------------------------
  // hdG
  //--------------------------------------------------------------------------

  void assemble_hdg() {
    const TriangleRule& rhs_rule = triangle_rule(8);
    const EdgeRule& erule = edge_rule(5);

    for (int k_el : elements_) {
      AffineMap map = AffineMap::from_triangle(mesh_, k_el);
      const double area = 0.5 * map.det;
      const int region = mesh_.region_tags[k_el];
      const double acoef = coeffs_.a_coef[region];
      const double invl = coeffs_.inv_lambda[region];
      const BdmBasis bdm = build_bdm1(mesh_, k_el);

      std::array<int, 6> vd;
      std::array<int, 3> md;
      for (int e = 0; e < 3; ++e) {
        const int f = mesh_.triangle_facets[k_el][e];
        vd[2 * e] = local_checked(space_.bdm_dof(f, 0));
        vd[2 * e + 1] = local_checked(space_.bdm_dof(f, 1));
        md[e] = local_checked(space_.multiplier_dof(f));
      }
      const int pd = local_checked(space_.hdg_pressure_dof(k_el));

      std::array<Eigen::Matrix2d, 6> G, Gop;
      for (int i = 0; i < 6; ++i) {
        G[i] = bdm.gradient(i);
        Gop[i] = coeffs_.symmetric_gradient ? (0.5 * (G[i] + G[i].transpose())).eval() : G[i];
      }

      // volume terms (constant integrands for BDM_1)
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
          add(vd[i], vd[j], acoef * area * Gop[i].cwiseProduct(Gop[j]).sum());
      for (int j = 0; j < 6; ++j) add_b(pd, vd[j], -area * bdm.divergence(j));
      if (invl != 0.0) add(pd, pd, -invl * area);
      pressure_integral_[pd] += area;

      for (size_t q = 0; q < rhs_rule.points.size(); ++q) {
        const double w = rhs_rule.weights[q] * area;
        const Vec2 x = map.to_physical(rhs_rule.points[q]);
        const Vec2 fv = coeffs_.body_force(x);
        for (int i = 0; i < 6; ++i) rhs_[vd[i]] += w * fv.dot(bdm.value(i, x));
      }

      // facet terms of the a-form
      const double h_k = bdm.scale;  // max edge length = diam(K)
      for (int e = 0; e < 3; ++e) {
        const int f = mesh_.triangle_facets[k_el][e];
        const Facet& fc = mesh_.facets[f];
        const Vec2 p0 = mesh_.vertices[fc.v0], p1 = mesh_.vertices[fc.v1];
        const double len = (p1 - p0).norm();
        const Vec2 t_e = mesh_.facet_tangent(f);
        const Vec2 n_k = mesh_.outward_normal(f, k_el);

        std::array<double, 6> dnt, mean_t;
        for (int i = 0; i < 6; ++i) {
          dnt[i] = t_e.dot(Gop[i] * n_k);
          double m = 0;
          for (size_t q = 0; q < erule.points.size(); ++q) {
            const Vec2 x = p0 + erule.points[q] * (p1 - p0);
            m += erule.weights[q] * t_e.dot(bdm.value(i, x));
          }
          mean_t[i] = m;
        }

        for (int j = 0; j < 6; ++j) {
          for (int i = 0; i < 6; ++i) {
            // consistency terms, both directions
            add(vd[i], vd[j], -acoef * len * (dnt[j] * mean_t[i] + dnt[i] * mean_t[j]));
          }
          add(md[e], vd[j], acoef * len * dnt[j]);
          add(vd[j], md[e], acoef * len * dnt[j]);
        }
        // penalty on the projected tangential jump: coefficients of
        // Phi(w_t - w~) are mean_t for BDM dofs and -1 for the multiplier.
        const double pen = acoef * options_.tau / h_k * len;
        for (int i = 0; i < 7; ++i)
          for (int j = 0; j < 7; ++j) {
            const double pi = i < 6 ? mean_t[i] : -1.0;
            const double pj = j < 6 ? mean_t[j] : -1.0;
            add(i < 6 ? vd[i] : md[e], j < 6 ? vd[j] : md[e], pen * pi * pj);
          }
      }
    }

    assemble_hdg_facet_conditions();
  }

  void assemble_hdg_facet_conditions() {
    const EdgeRule& rule = edge_rule(9);
    for (auto [f, k_el] : conditioned_facets()) {
      const FacetCondition& cond = bc_.at(f);
      const Facet& fc = mesh_.facets[f];
      const Vec2 p0 = mesh_.vertices[fc.v0], p1 = mesh_.vertices[fc.v1];
      const double len = (p1 - p0).norm();
      const Vec2 t_e = mesh_.facet_tangent(f);
      const Vec2 n_e = mesh_.facet_normal(f);
      const Vec2 n_out = mesh_.outward_normal(f, k_el);
      const int d0 = local_checked(space_.bdm_dof(f, 0));
      const int d1 = local_checked(space_.bdm_dof(f, 1));
      const int dm = local_checked(space_.multiplier_dof(f));

      auto facet_moments = [&](const VectorField& u) {
        // BDM dof values and multiplier value of the interpolant of u
        double m0 = 0, m1 = 0, mt = 0;
        for (size_t q = 0; q < rule.points.size(); ++q) {
          const double s = rule.points[q];
          const Vec2 x = p0 + s * (p1 - p0);
          const double w = rule.weights[q] * len;
          const Vec2 uv = u(x);
          m0 += w * uv.dot(n_e);
          m1 += w * uv.dot(n_e) * (2 * s - 1);
          mt += rule.weights[q] * uv.dot(t_e);
        }
        return std::array<double, 3>{m0, m1, mt};
      };

      switch (cond.kind) {
        case FacetConditionKind::Dirichlet: {
          auto m = facet_moments(cond.value);
          constrain(d0, m[0]);
          constrain(d1, m[1]);
          constrain(dm, m[2]);
          break;
        }
        case FacetConditionKind::TVNF:
        case FacetConditionKind::TDNNS: {
          constrain(dm, 0.0);
          // sigma_nn = g loads the free normal trace
          const BdmBasis bdm = build_bdm1(mesh_, k_el);
          int bloc0 = -1, bloc1 = -1;
          for (int e = 0; e < 3; ++e)
            if (mesh_.triangle_facets[k_el][e] == f) {
              bloc0 = 2 * e;
              bloc1 = 2 * e + 1;
            }
          for (size_t q = 0; q < rule.points.size(); ++q) {
            const double s = rule.points[q];
            const Vec2 x = p0 + s * (p1 - p0);
            const double w = rule.weights[q] * len * cond.g(x);
            rhs_[d0] += w * bdm.value(bloc0, x).dot(n_out);
            rhs_[d1] += w * bdm.value(bloc1, x).dot(n_out);
          }
          break;
        }
        case FacetConditionKind::NVTF:
        case FacetConditionKind::NDTNS: {
          constrain(d0, 0.0);
          constrain(d1, 0.0);
          // sigma_nt = g loads the multiplier; g is stated in the outward
          // (n, t) frame, the multiplier lives in the facet frame.
          const double sign = t_e.dot(perp(n_out));
          double gsum = 0;
          for (size_t q = 0; q < rule.points.size(); ++q) {
            const Vec2 x = p0 + rule.points[q] * (p1 - p0);
            gsum += rule.weights[q] * len * cond.g(x);
          }
          rhs_[dm] += sign * gsum;
          break;
        }
        case FacetConditionKind::Robin: {
          const double coef =
              options_.robin_alpha * coeffs_.robin_base[mesh_.region_tags[k_el]];
          const BdmBasis bdm = build_bdm1(mesh_, k_el);
          Eigen::Matrix<double, 6, 6> mass = Eigen::Matrix<double, 6, 6>::Zero();
          for (size_t q = 0; q < rule.points.size(); ++q) {
            const Vec2 x = p0 + rule.points[q] * (p1 - p0);
            const double w = rule.weights[q] * len;
            std::array<Vec2, 6> vals;
            for (int i = 0; i < 6; ++i) vals[i] = bdm.value(i, x);
            for (int i = 0; i < 6; ++i)
              for (int j = 0; j < 6; ++j) mass(i, j) += w * vals[i].dot(vals[j]);
          }
          std::array<int, 6> vd;
          for (int e = 0; e < 3; ++e) {
            const int fe = mesh_.triangle_facets[k_el][e];
            vd[2 * e] = local_checked(space_.bdm_dof(fe, 0));
            vd[2 * e + 1] = local_checked(space_.bdm_dof(fe, 1));
          }
          for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) add(vd[i], vd[j], coef * mass(i, j));
          break;
        }
        case FacetConditionKind::Traction: {
          const BdmBasis bdm = build_bdm1(mesh_, k_el);
          std::array<int, 6> vd;
          for (int e = 0; e < 3; ++e) {
            const int fe = mesh_.triangle_facets[k_el][e];
            vd[2 * e] = local_checked(space_.bdm_dof(fe, 0));
            vd[2 * e + 1] = local_checked(space_.bdm_dof(fe, 1));
          }
          for (size_t q = 0; q < rule.points.size(); ++q) {
            const Vec2 x = p0 + rule.points[q] * (p1 - p0);
            const Vec2 tr = cond.value(x);
            if (tr.squaredNorm() == 0.0) continue;
            const double w = rule.weights[q] * len;
            for (int i = 0; i < 6; ++i) rhs_[vd[i]] += w * tr.dot(bdm.value(i, x));
          }
          break;
        }
        case FacetConditionKind::Neumann:
          break;
      }
    }
  }

  //--------------------------------------------------------------------------
  // constraints, rotation, augmentation
  //--------------------------------------------------------------------------

  void constrain(int dof, double value) { constraint_value_[dof] = value; }

  void apply_rotations() {
    if (rotations_.empty()) return;
    // Basis change A := Q^T A Q at the triplet level. For a rotated node with
    // dofs (dx, dy), row dx spreads to {(dx, nx), (dy, -ny)} and row dy to
    // {(dx, ny), (dy, nx)}; columns likewise.
    std::vector<int> rot_of(n_, -1);
    std::vector<char> is_x_slot(n_, 0);
    for (size_t r = 0; r < rotations_.size(); ++r) {
      rot_of[rotations_[r].dof_n] = static_cast<int>(r);
      is_x_slot[rotations_[r].dof_n] = 1;
      rot_of[rotations_[r].dof_t] = static_cast<int>(r);
    }
    auto expand = [&](int i, std::array<std::pair<int, double>, 2>& out) -> int {
      const int r = rot_of[i];
      if (r < 0) {
        out[0] = {i, 1.0};
        return 1;
      }
      const NodeRotation& rot = rotations_[r];
      if (is_x_slot[i]) {
        out[0] = {rot.dof_n, rot.nx};
        out[1] = {rot.dof_t, -rot.ny};
      } else {
        out[0] = {rot.dof_n, rot.ny};
        out[1] = {rot.dof_t, rot.nx};
      }
      return 2;
    };

    std::vector<Triplet> rotated;
    rotated.reserve(trips_.size() * 2);
    std::array<std::pair<int, double>, 2> ri, rj;
    for (const Triplet& t : trips_) {
      const int ni = expand(t.row(), ri);
      const int nj = expand(t.col(), rj);
      for (int a = 0; a < ni; ++a)
        for (int b = 0; b < nj; ++b)
          rotated.emplace_back(ri[a].first, rj[b].first, t.value() * ri[a].second * rj[b].second);
    }
    trips_.swap(rotated);

    // F := Q^T F
    for (const NodeRotation& r : rotations_) {
      const double fx = rhs_[r.dof_n], fy = rhs_[r.dof_t];
      rhs_[r.dof_n] = r.nx * fx + r.ny * fy;
      rhs_[r.dof_t] = -r.ny * fx + r.nx * fy;
    }
  }

  void eliminate_constraints() {
    if (constraint_value_.empty()) return;
    std::vector<char> fixed(n_, 0);
    std::vector<double> value(n_, 0.0);
    for (const auto& [d, v] : constraint_value_) {
      fixed[d] = 1;
      value[d] = v;
    }
    std::vector<Triplet> kept;
    kept.reserve(trips_.size());
    for (const Triplet& t : trips_) {
      const bool ci = fixed[t.row()], cj = fixed[t.col()];
      if (!ci && !cj) {
        kept.push_back(t);
      } else if (!ci && cj) {
        rhs_[t.row()] -= t.value() * value[t.col()];
      }
      // rows of constrained dofs are dropped entirely
    }
    for (const auto& [d, v] : constraint_value_) {
      kept.emplace_back(d, d, 1.0);
      rhs_[d] = v;
    }
    trips_.swap(kept);
  }

  LinearSystem finalize() {
    SparseMat mat(n_, n_);
    mat.setFromTriplets(trips_.begin(), trips_.end());

    bool augment = false;
    if (is_stokes(problem_) && options_.allow_augmentation && max_b_entry_ > 0) {
      // Constant pressure lies in the kernel exactly when no boundary term
      // fixes the pressure level; detect it structurally.
      VectorXd c = VectorXd::Zero(n_);
      for (int i = 0; i < n_; ++i)
        if (is_local_pressure(i)) c[i] = 1.0;
      const double resid = (mat * c).cwiseAbs().maxCoeff();
      augment = resid <= 1e-8 * max_b_entry_;
    }

    LinearSystem sys;
    sys.rotations = rotations_;
    for (const auto& [d, v] : constraint_value_) sys.constrained.push_back(d);
    std::sort(sys.constrained.begin(), sys.constrained.end());

    // block sizes of the subset
    BlockLayout bl;
    if (identity_map_) {
      bl.velocity = space_.velocity_dofs;
      bl.pressure = space_.pressure_dofs;
      bl.multiplier = space_.multiplier_dofs;
    } else {
      for (int g : dof_set_) {
        if (g < space_.velocity_dofs)
          ++bl.velocity;
        else if (g < space_.multiplier_offset())
          ++bl.pressure;
        else
          ++bl.multiplier;
      }
    }
    bl.augmented = augment;

    if (!augment) {
      sys.A.mat = std::move(mat);
      sys.A.blocks = bl;
      sys.F = rhs_;
      return sys;
    }

    for (int i = 0; i < n_; ++i)
      if (is_local_pressure(i) && pressure_integral_[i] != 0.0) {
        trips_.emplace_back(n_, i, pressure_integral_[i]);
        trips_.emplace_back(i, n_, pressure_integral_[i]);
      }
    SparseMat amat(n_ + 1, n_ + 1);
    amat.setFromTriplets(trips_.begin(), trips_.end());
    sys.A.mat = std::move(amat);
    sys.A.blocks = bl;
    sys.F = VectorXd::Zero(n_ + 1);
    sys.F.head(n_) = rhs_;
    return sys;
  }

  bool is_local_pressure(int l) const {
    const int g = identity_map_ ? l : dof_set_[l];
    return space_.is_pressure_dof(g);
  }

  const Space& space_;
  const Mesh& mesh_;
  const Problem& problem_;
  const FacetConditionMap& bc_;
  AssemblyOptions options_;
  ProblemCoefficients coeffs_;

  int n_ = 0;
  bool identity_map_ = true;
  std::vector<int> global_to_local_;
  std::vector<int> dof_set_;
  std::vector<int> all_elements_;
  std::span<const int> elements_;
  std::vector<char> in_subset_;

  std::vector<Triplet> trips_;
  VectorXd rhs_;
  std::vector<double> pressure_integral_;
  double max_b_entry_ = 0;

  std::map<int, NodeCon> node_con_;           // TH velocity node constraints
  std::map<int, double> constraint_value_;    // local dof -> boundary value
  std::vector<NodeRotation> rotations_;
};

}  // namespace

const char* to_string(InterfaceCondition c) {
  switch (c) {
    case InterfaceCondition::TVNF: return "tvnf";
    case InterfaceCondition::NVTF: return "nvtf";
    case InterfaceCondition::TDNNS: return "tdnns";
    case InterfaceCondition::NDTNS: return "ndtns";
    case InterfaceCondition::Robin: return "robin";
    case InterfaceCondition::Neumann: return "neumann";
    case InterfaceCondition::InheritGlobal: return "inherit";
  }
  return "?";
}

FacetConditionMap global_facet_conditions(const Mesh& mesh, const Problem& problem) {
  const BoundaryConditionSpec& spec = boundary_conditions(problem);
  FacetConditionMap map;
  for (const auto& [f, tag] : mesh.boundary_tags) {
    const BoundaryCondition& bc = spec.at(tag);
    map[f] = FacetCondition{to_facet_kind(bc.kind), bc.value, bc.g};
  }
  return map;
}

FacetConditionMap local_facet_conditions(const Mesh& mesh, const Problem& problem,
                                         std::span<const int> elements,
                                         InterfaceCondition interface) {
  if (elements.empty()) throw std::invalid_argument("local_facet_conditions: empty subdomain");
  const BoundaryConditionSpec& spec = boundary_conditions(problem);
  std::vector<char> inside(mesh.num_triangles(), 0);
  for (int k : elements) inside[k] = 1;

  FacetConditionMap map;
  for (int k : elements) {
    for (int f : mesh.triangle_facets[k]) {
      const Facet& fc = mesh.facets[f];
      if (fc.tri_out < 0) {
        // global boundary: inherit the global condition
        const BoundaryCondition& bc = spec.at(mesh.boundary_tags.at(f));
        map[f] = FacetCondition{to_facet_kind(bc.kind), bc.value, bc.g};
        continue;
      }
      const bool both = inside[fc.tri_in] && inside[fc.tri_out];
      if (both) continue;  // interior to the subdomain
      FacetCondition cond;
      cond.value = zero_vector_field();
      cond.g = zero_scalar_field();
      switch (interface) {
        case InterfaceCondition::TVNF: cond.kind = FacetConditionKind::TVNF; break;
        case InterfaceCondition::NVTF: cond.kind = FacetConditionKind::NVTF; break;
        case InterfaceCondition::TDNNS: cond.kind = FacetConditionKind::TDNNS; break;
        case InterfaceCondition::NDTNS: cond.kind = FacetConditionKind::NDTNS; break;
        case InterfaceCondition::Robin: cond.kind = FacetConditionKind::Robin; break;
        case InterfaceCondition::Neumann: cond.kind = FacetConditionKind::Neumann; break;
        case InterfaceCondition::InheritGlobal: continue;  // leave unconstrained
      }
      map[f] = cond;
    }
  }
  return map;
}

LinearSystem assemble(const Space& space, const Problem& problem, const FacetConditionMap& bc,
                      std::span<const int> elements, std::span<const int> dof_set,
                      const AssemblyOptions& options) {
  if (space.scheme == Scheme::HDG && options.tau <= 0)
    throw std::invalid_argument("assemble: hdG stabilisation tau must be positive");
  return Assembler(space, problem, bc, elements, dof_set, options).run();
}

LinearSystem assemble_taylor_hood(const Space& space, const Problem& problem,
                                  const AssemblyOptions& options) {
  if (space.scheme != Scheme::TaylorHood)
    throw std::invalid_argument("assemble_taylor_hood: space is not Taylor-Hood");
  return assemble(space, problem, global_facet_conditions(*space.mesh, problem), {}, {}, options);
}

LinearSystem assemble_hdg(const Space& space, const Problem& problem,
                          const AssemblyOptions& options) {
  if (space.scheme != Scheme::HDG)
    throw std::invalid_argument("assemble_hdg: space is not hdG");
  return assemble(space, problem, global_facet_conditions(*space.mesh, problem), {}, {}, options);
}

LinearSystem assemble_local(const Space& space, const Problem& problem,
                            std::span<const int> elements, std::span<const int> dof_set,
                            InterfaceCondition interface, const AssemblyOptions& options) {
  if (elements.empty()) throw std::invalid_argument("assemble_local: empty subdomain");
  // non-standard conditions must match the equation family
  const bool stokes = is_stokes(problem);
  if ((stokes && (interface == InterfaceCondition::TDNNS ||
                  interface == InterfaceCondition::NDTNS)) ||
      (!stokes && (interface == InterfaceCondition::TVNF ||
                   interface == InterfaceCondition::NVTF)))
    throw std::invalid_argument(std::string("assemble_local: interface condition ") +
                                to_string(interface) + " does not match the equation");
  return assemble(space, problem, local_facet_conditions(*space.mesh, problem, elements, interface),
                  elements, dof_set, options);
}

//------------------------------------------------------------------------------
// LinearSystem frame helpers
//------------------------------------------------------------------------------

void LinearSystem::to_system_frame(Eigen::VectorXd& v) const {
  for (const NodeRotation& r : rotations) {
    const double vx = v[r.dof_n], vy = v[r.dof_t];
    v[r.dof_n] = r.nx * vx + r.ny * vy;
    v[r.dof_t] = -r.ny * vx + r.nx * vy;
  }
}

void LinearSystem::from_system_frame(Eigen::VectorXd& v) const {
  for (const NodeRotation& r : rotations) {
    const double wn = v[r.dof_n], wt = v[r.dof_t];
    v[r.dof_n] = r.nx * wn - r.ny * wt;
    v[r.dof_t] = r.ny * wn + r.nx * wt;
  }
}

SparseMat LinearSystem::standard_frame_matrix() const {
  if (rotations.empty()) return A.mat;
  const int n = A.rows();
  std::vector<Eigen::Triplet<double>> qt;
  std::vector<char> rotated(n, 0);
  for (const NodeRotation& r : rotations) {
    rotated[r.dof_n] = rotated[r.dof_t] = 1;
    qt.emplace_back(r.dof_n, r.dof_n, r.nx);
    qt.emplace_back(r.dof_n, r.dof_t, -r.ny);
    qt.emplace_back(r.dof_t, r.dof_n, r.ny);
    qt.emplace_back(r.dof_t, r.dof_t, r.nx);
  }
  for (int i = 0; i < n; ++i)
    if (!rotated[i]) qt.emplace_back(i, i, 1.0);
  SparseMat q(n, n);
  q.setFromTriplets(qt.begin(), qt.end());
  return (q * A.mat * SparseMat(q.transpose())).eval();
}

//------------------------------------------------------------------------------
// L2 errors
//------------------------------------------------------------------------------

SolutionError l2_error(const Space& space, const LinearSystem& system,
                       const Eigen::VectorXd& solution, const VectorField& u_exact,
                       const ScalarField& p_exact) {
  const Mesh& mesh = *space.mesh;
  Eigen::VectorXd u = solution;
  system.from_system_frame(u);

  const TriangleRule& rule = triangle_rule(8);
  double verr = 0, perr = 0;

  if (space.scheme == Scheme::TaylorHood) {
    const LagrangeBasis& vb = LagrangeBasis::get(space.degree);
    const LagrangeBasis& pb = LagrangeBasis::get(space.degree - 1);
    for (int k = 0; k < mesh.num_triangles(); ++k) {
      AffineMap map = AffineMap::from_triangle(mesh, k);
      const double area = 0.5 * map.det;
      const auto& vnodes = space.velocity_layout.element_nodes[k];
      const auto& pnodes = space.pressure_layout.element_nodes[k];
      for (size_t q = 0; q < rule.points.size(); ++q) {
        const Vec2 xi = rule.points[q];
        const Vec2 x = map.to_physical(xi);
        const double w = rule.weights[q] * area;
        Eigen::VectorXd nv = vb.values(xi), pv = pb.values(xi);
        Vec2 uh = Vec2::Zero();
        double ph = 0;
        for (int i = 0; i < vb.size(); ++i)
          uh += nv(i) * Vec2(u[2 * vnodes[i]], u[2 * vnodes[i] + 1]);
        for (int m = 0; m < pb.size(); ++m)
          ph += pv(m) * u[space.pressure_offset() + pnodes[m]];
        verr += w * (uh - u_exact(x)).squaredNorm();
        const double dp = ph - p_exact(x);
        perr += w * dp * dp;
      }
    }
  } else {
    for (int k = 0; k < mesh.num_triangles(); ++k) {
      AffineMap map = AffineMap::from_triangle(mesh, k);
      const double area = 0.5 * map.det;
      const BdmBasis bdm = build_bdm1(mesh, k);
      std::array<int, 6> vd;
      for (int e = 0; e < 3; ++e) {
        const int f = mesh.triangle_facets[k][e];
        vd[2 * e] = space.bdm_dof(f, 0);
        vd[2 * e + 1] = space.bdm_dof(f, 1);
      }
      const double ph = u[space.hdg_pressure_dof(k)];
      for (size_t q = 0; q < rule.points.size(); ++q) {
        const Vec2 x = map.to_physical(rule.points[q]);
        const double w = rule.weights[q] * area;
        Vec2 uh = Vec2::Zero();
        for (int i = 0; i < 6; ++i) uh += u[vd[i]] * bdm.value(i, x);
        verr += w * (uh - u_exact(x)).squaredNorm();
        const double dp = ph - p_exact(x);
        perr += w * dp * dp;
      }
    }
  }
  return {std::sqrt(verr), std::sqrt(perr)};
}

}  // namespace ddlab
