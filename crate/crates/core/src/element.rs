//! Single trilinear hexahedron on the unit cube, solved quasi-statically.

use alloc::vec::Vec;

use crate::activation::ActivationInput;
use crate::error::{Error, Result};
use crate::kinematics::DeformationState;
use crate::linalg::DenseMatrix;
use crate::loadcases::LoadCase;
use crate::materials::Material;
use crate::num;
use crate::tensor::{Mat3, Vec3};

pub const NODES: usize = 8;
pub const DOFS: usize = 24;

const CORNERS: [[f64; 3]; NODES] = [
    [0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0],
    [1.0, 1.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
    [1.0, 0.0, 1.0],
    [1.0, 1.0, 1.0],
    [0.0, 1.0, 1.0],
];

#[derive(Debug, Clone)]
struct GaussPoint {
    /// Reference gradients of the shape functions.
    grads: [Vec3; NODES],
    /// Weight times reference Jacobian determinant.
    weight: f64,
}

/// Eight-node hexahedron with a 2×2×2 Gauss rule.
#[derive(Debug, Clone)]
pub struct HexElement {
    nodes: [[f64; 3]; NODES],
    fiber: Vec3,
    points: Vec<GaussPoint>,
    volume: f64,
}

impl HexElement {
    /// Cube of edge length `d` with one corner at the origin and fiber
    /// direction `e₃`.
    pub fn cube(d: f64) -> Result<Self> {
        let mut nodes = CORNERS;
        for n in nodes.iter_mut() {
            for x in n.iter_mut() {
                *x *= d;
            }
        }
        Self::new(nodes, Vec3::e(2))
    }

    pub fn unit_cube() -> Self {
        Self::cube(1.0).expect("unit cube is a valid element")
    }

    pub fn new(nodes: [[f64; 3]; NODES], fiber: Vec3) -> Result<Self> {
        if num::abs(fiber.norm() - 1.0) > 1e-12 {
            return Err(Error::input("fiber direction must be a unit vector"));
        }
        let g = 1.0 / num::sqrt(3.0);
        let mut points = Vec::with_capacity(8);
        for (idx, corner) in CORNERS.iter().enumerate() {
            let xi = [
                (2.0 * corner[0] - 1.0) * g,
                (2.0 * corner[1] - 1.0) * g,
                (2.0 * corner[2] - 1.0) * g,
            ];
            let dn = natural_gradients(xi);
            let mut jac = Mat3::zeros();
            for (a, d) in dn.iter().enumerate() {
                for i in 0..3 {
                    for j in 0..3 {
                        jac[(i, j)] += nodes[a][i] * d[j];
                    }
                }
            }
            let det = jac.det();
            if !(det > 0.0) {
                return Err(Error::ElementInversion {
                    det,
                    gauss_point: idx,
                });
            }
            let jinv_t = jac.inverse().expect("positive determinant").transpose();
            let grads = dn.map(|d| jinv_t.mul_vec(&Vec3(d)));
            points.push(GaussPoint {
                grads,
                weight: det,
            });
        }
        let volume = points.iter().map(|p| p.weight).sum();
        Ok(HexElement {
            nodes,
            fiber,
            points,
            volume,
        })
    }

    pub fn nodes(&self) -> &[[f64; 3]; NODES] {
        &self.nodes
    }

    pub fn reference_volume(&self) -> f64 {
        self.volume
    }

    /// Deformation gradients at the Gauss points.
    pub fn deformation_gradients(&self, u: &[f64; DOFS]) -> Vec<Mat3> {
        self.points
            .iter()
            .map(|gp| {
                let mut f = Mat3::identity();
                for (a, g) in gp.grads.iter().enumerate() {
                    for i in 0..3 {
                        for j in 0..3 {
                            f[(i, j)] += u[3 * a + i] * g[j];
                        }
                    }
                }
                f
            })
            .collect()
    }

    fn states(&self, u: &[f64; DOFS]) -> Result<Vec<DeformationState>> {
        self.deformation_gradients(u)
            .into_iter()
            .enumerate()
            .map(|(idx, f)| {
                let det = f.det();
                if !(det > 0.0) {
                    return Err(Error::ElementInversion {
                        det,
                        gauss_point: idx,
                    });
                }
                DeformationState::new(f, self.fiber)
            })
            .collect()
    }

    /// Nodal internal forces `∫ P : ∇N dV`.
    pub fn internal_force(
        &self,
        u: &[f64; DOFS],
        material: &Material,
        input: &ActivationInput,
    ) -> Result<[f64; DOFS]> {
        let mut f = [0.0; DOFS];
        for (gp, state) in self.points.iter().zip(self.states(u)?) {
            let p = material.first_pk(&state, input)?;
            add_force(&mut f, gp, &p);
        }
        Ok(f)
    }

    /// Internal forces and the consistent stiffness matrix.
    pub fn linearize(
        &self,
        u: &[f64; DOFS],
        material: &Material,
        input: &ActivationInput,
    ) -> Result<([f64; DOFS], DenseMatrix)> {
        let mut force = [0.0; DOFS];
        let mut k = DenseMatrix::zeros(DOFS);
        for (gp, state) in self.points.iter().zip(self.states(u)?) {
            let s = material.second_pk(&state, input)?;
            let p = state.f * s;
            add_force(&mut force, gp, &p);
            let c = material.tangent(&state, input)?;
            let f = &state.f;
            // A_iJkL = δ_ik S_LJ + F_iI F_kK ℂ_IJKL
            let mut a = [[[[0.0; 3]; 3]; 3]; 3];
            for i in 0..3 {
                for jj in 0..3 {
                    for kk in 0..3 {
                        for ll in 0..3 {
                            let mut v = if i == kk { s[(ll, jj)] } else { 0.0 };
                            for ii in 0..3 {
                                for k2 in 0..3 {
                                    v += f[(i, ii)] * f[(kk, k2)] * c.get(ii, jj, k2, ll);
                                }
                            }
                            a[i][jj][kk][ll] = v;
                        }
                    }
                }
            }
            for (na, ga) in gp.grads.iter().enumerate() {
                for (nb, gb) in gp.grads.iter().enumerate() {
                    for i in 0..3 {
                        for kk in 0..3 {
                            let mut v = 0.0;
                            for jj in 0..3 {
                                for ll in 0..3 {
                                    v += ga[jj] * a[i][jj][kk][ll] * gb[ll];
                                }
                            }
                            k.add(3 * na + i, 3 * nb + kk, v * gp.weight);
                        }
                    }
                }
            }
        }
        Ok((force, k))
    }

    /// Volume average of the first Piola-Kirchhoff stress.
    pub fn average_first_pk(
        &self,
        u: &[f64; DOFS],
        material: &Material,
        input: &ActivationInput,
    ) -> Result<Mat3> {
        let mut avg = Mat3::zeros();
        for (gp, state) in self.points.iter().zip(self.states(u)?) {
            avg += material.first_pk(&state, input)? * gp.weight;
        }
        Ok(avg * (1.0 / self.volume))
    }

    /// Volume-averaged fiber stretch.
    pub fn average_fiber_stretch(&self, u: &[f64; DOFS]) -> Result<f64> {
        let states = self.states(u)?;
        Ok(self
            .points
            .iter()
            .zip(states)
            .map(|(gp, s)| s.lambda * gp.weight)
            .sum::<f64>()
            / self.volume)
    }

    /// Current volume `∫ det F dV`.
    pub fn current_volume(&self, u: &[f64; DOFS]) -> f64 {
        self.points
            .iter()
            .zip(self.deformation_gradients(u))
            .map(|(gp, f)| f.det() * gp.weight)
            .sum()
    }

    /// Nodal displacements of the affine field `x = F X`.
    pub fn affine_displacement(&self, f: &Mat3) -> [f64; DOFS] {
        let mut u = [0.0; DOFS];
        for (a, x) in self.nodes.iter().enumerate() {
            let fx = f.mul_vec(&Vec3(*x));
            for i in 0..3 {
                u[3 * a + i] = fx[i] - x[i];
            }
        }
        u
    }
}

fn add_force(f: &mut [f64; DOFS], gp: &GaussPoint, p: &Mat3) {
    for (a, g) in gp.grads.iter().enumerate() {
        for i in 0..3 {
            let mut v = 0.0;
            for j in 0..3 {
                v += p[(i, j)] * g[j];
            }
            f[3 * a + i] += v * gp.weight;
        }
    }
}

fn natural_gradients(xi: [f64; 3]) -> [[f64; 3]; NODES] {
    let mut out = [[0.0; 3]; NODES];
    for (a, c) in CORNERS.iter().enumerate() {
        let s = [2.0 * c[0] - 1.0, 2.0 * c[1] - 1.0, 2.0 * c[2] - 1.0];
        let f = [1.0 + s[0] * xi[0], 1.0 + s[1] * xi[1], 1.0 + s[2] * xi[2]];
        out[a] = [
            0.125 * s[0] * f[1] * f[2],
            0.125 * f[0] * s[1] * f[2],
            0.125 * f[0] * f[1] * s[2],
        ];
    }
    out
}

/// Constraint on one displacement component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constraint {
    Free,
    Fixed,
    /// Follows the affine field of the load case at the current load value.
    Prescribed,
}

/// What drives the program.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Loading {
    /// Load case ramped from the reference state to `target`.
    Case { case: LoadCase, target: f64 },
    /// Only the activation is ramped; no prescribed motion.
    FreeContraction,
}

/// Boundary conditions and load schedule of a quasi-static solve.
#[derive(Debug, Clone, PartialEq)]
pub struct BcProgram {
    pub loading: Loading,
    pub constraints: [Constraint; DOFS],
    pub activation: ActivationInput,
    /// Ramp the activation amplitude with pseudo-time.
    pub ramp_activation: bool,
}

impl BcProgram {
    /// Symmetry-plane constraints with the loaded and held faces prescribed.
    pub fn load_case(
        element: &HexElement,
        case: LoadCase,
        target: f64,
        activation: ActivationInput,
    ) -> Self {
        use Constraint::*;
        let mut constraints = [Free; DOFS];
        // per direction: behaviour on the far face (the near face is a
        // symmetry plane unless stated otherwise)
        let far: [Constraint; 3] = match case {
            LoadCase::Utcaf => [Free, Free, Prescribed],
            LoadCase::Utctf => [Prescribed, Free, Prescribed],
            LoadCase::Saf => [Prescribed; 3],
            LoadCase::Psaf => [Free, Fixed, Prescribed],
            LoadCase::Pstf => [Prescribed, Fixed, Free],
            LoadCase::Pstif => [Prescribed, Free, Fixed],
        };
        let extent = element_extent(element);
        for (a, x) in element.nodes.iter().enumerate() {
            for i in 0..3 {
                constraints[3 * a + i] = if case == LoadCase::Saf {
                    Prescribed
                } else if x[i] <= extent[i].0 + 1e-12 {
                    Fixed
                } else if x[i] >= extent[i].1 - 1e-12 {
                    far[i]
                } else {
                    Free
                };
            }
        }
        BcProgram {
            loading: Loading::Case { case, target },
            constraints,
            activation,
            ramp_activation: !activation.is_passive(),
        }
    }

    /// Symmetry planes only; the activation is ramped from zero.
    pub fn free_contraction(element: &HexElement, activation: ActivationInput) -> Self {
        let mut constraints = [Constraint::Free; DOFS];
        let extent = element_extent(element);
        for (a, x) in element.nodes.iter().enumerate() {
            for i in 0..3 {
                if x[i] <= extent[i].0 + 1e-12 {
                    constraints[3 * a + i] = Constraint::Fixed;
                }
            }
        }
        BcProgram {
            loading: Loading::FreeContraction,
            constraints,
            activation,
            ramp_activation: true,
        }
    }

    /// Load-case value at pseudo-time `t ∈ [0, 1]`.
    pub fn load_value(&self, t: f64) -> Option<f64> {
        match self.loading {
            Loading::Case { case, target } => Some(if case.is_shear() {
                t * target
            } else {
                1.0 + t * (target - 1.0)
            }),
            Loading::FreeContraction => None,
        }
    }

    fn input_at(&self, t: f64) -> ActivationInput {
        if self.ramp_activation {
            self.activation.scaled(self.activation.scale * t)
        } else {
            self.activation
        }
    }

    fn prescribed_field(&self, element: &HexElement, t: f64) -> Result<[f64; DOFS]> {
        match self.loading {
            Loading::Case { case, .. } => {
                let f = case.deformation_gradient(self.load_value(t).unwrap_or(1.0))?;
                Ok(element.affine_displacement(&f))
            }
            Loading::FreeContraction => Ok([0.0; DOFS]),
        }
    }
}

fn element_extent(element: &HexElement) -> [(f64, f64); 3] {
    let mut ext = [(f64::INFINITY, f64::NEG_INFINITY); 3];
    for x in &element.nodes {
        for i in 0..3 {
            ext[i].0 = ext[i].0.min(x[i]);
            ext[i].1 = ext[i].1.max(x[i]);
        }
    }
    ext
}

/// Newton and load-stepping controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub steps: usize,
    pub max_iterations: usize,
    pub max_halvings: usize,
    pub tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            steps: 20,
            max_iterations: 25,
            max_halvings: 4,
            tolerance: 1e-8,
        }
    }
}

/// One converged load step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    /// Stretch or shear of the load case; `None` for free contraction.
    pub load_value: Option<f64>,
    pub displacement: [f64; DOFS],
    /// Volume-averaged first Piola-Kirchhoff stress.
    pub first_pk: Mat3,
    /// Volume-averaged fiber stretch.
    pub fiber_stretch: f64,
    pub volume: f64,
    pub iterations: usize,
    /// Free-dof residual norms of the Newton iterations.
    pub residuals: Vec<f64>,
}

/// Converged states of a quasi-static solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub reference_volume: f64,
    pub steps: Vec<StepRecord>,
    /// Ratio of extremal eigenvalues of the free-dof stiffness at the last
    /// step, when available.
    pub final_eigen_ratio: Option<f64>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&StepRecord> {
        self.steps.last()
    }
}

/// Relative volume change `(V - V₀)/V₀` per recorded step.
pub fn volume_change(trajectory: &Trajectory) -> Vec<f64> {
    trajectory
        .steps
        .iter()
        .map(|s| (s.volume - trajectory.reference_volume) / trajectory.reference_volume)
        .collect()
}

/// Ramps the program over pseudo-time with Newton iterations per increment,
/// halving increments that fail to converge.
pub fn solve_quasi_static(
    element: &HexElement,
    material: &Material,
    program: &BcProgram,
    options: &SolverOptions,
) -> Result<Trajectory> {
    if options.steps == 0 {
        return Err(Error::input("at least one load step is required"));
    }
    let free: Vec<usize> = (0..DOFS)
        .filter(|&d| program.constraints[d] == Constraint::Free)
        .collect();
    let mut u = [0.0; DOFS];
    let mut time = 0.0;
    let base_dt = 1.0 / options.steps as f64;
    let mut steps = Vec::with_capacity(options.steps);
    let mut final_eigen_ratio = None;
    let mut step_index = 0;
    while time < 1.0 - 1e-12 {
        let mut dt = base_dt.min(1.0 - time);
        let mut halvings = 0;
        loop {
            let t_new = (time + dt).min(1.0);
            match newton_increment(element, material, program, options, &free, &u, time, t_new) {
                Ok((u_new, residuals, ratio)) => {
                    u = u_new;
                    time = t_new;
                    step_index += 1;
                    let input = program.input_at(time);
                    steps.push(StepRecord {
                        step: step_index,
                        time,
                        load_value: program.load_value(time),
                        displacement: u,
                        first_pk: element.average_first_pk(&u, material, &input)?,
                        fiber_stretch: element.average_fiber_stretch(&u)?,
                        volume: element.current_volume(&u),
                        iterations: residuals.len().saturating_sub(1),
                        residuals,
                    });
                    final_eigen_ratio = ratio;
                    break;
                }
                Err(err) => {
                    if halvings >= options.max_halvings || !err.is_numerical() {
                        return Err(match err {
                            Error::NonConvergence { residual, .. } => Error::NonConvergence {
                                step: step_index + 1,
                                residual,
                            },
                            other => other,
                        });
                    }
                    halvings += 1;
                    dt *= 0.5;
                }
            }
        }
    }
    Ok(Trajectory {
        reference_volume: element.reference_volume(),
        steps,
        final_eigen_ratio,
    })
}

type Increment = ([f64; DOFS], Vec<f64>, Option<f64>);

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| {
        if x.is_finite() {
            m.max(num::abs(*x))
        } else {
            f64::INFINITY
        }
    })
}

/// Free-dof residual and reaction scale at `u`.
fn evaluate(
    element: &HexElement,
    material: &Material,
    program: &BcProgram,
    free: &[usize],
    u: &[f64; DOFS],
    input: &ActivationInput,
) -> Result<(f64, f64)> {
    let force = element.internal_force(u, material, input)?;
    let r: Vec<f64> = free.iter().map(|&d| force[d]).collect();
    let reaction: Vec<f64> = (0..DOFS)
        .filter(|d| program.constraints[*d] != Constraint::Free)
        .map(|d| force[d])
        .collect();
    Ok((max_norm(&r), max_norm(&reaction)))
}

#[allow(clippy::too_many_arguments)]
fn newton_increment(
    element: &HexElement,
    material: &Material,
    program: &BcProgram,
    options: &SolverOptions,
    free: &[usize],
    u_prev: &[f64; DOFS],
    t_prev: f64,
    t: f64,
) -> Result<Increment> {
    let input = program.input_at(t);
    let target = program.prescribed_field(element, t)?;
    let previous = program.prescribed_field(element, t_prev)?;
    let mut u = *u_prev;
    for d in 0..DOFS {
        match program.constraints[d] {
            Constraint::Fixed => u[d] = 0.0,
            Constraint::Prescribed => u[d] = target[d],
            // the affine increment of the load case is the predictor
            Constraint::Free => u[d] += target[d] - previous[d],
        }
    }
    let mut residuals = Vec::new();
    let mut reference = 1e-3_f64;
    for it in 0..=options.max_iterations {
        let (force, k) = element.linearize(&u, material, &input)?;
        let r: Vec<f64> = free.iter().map(|&d| force[d]).collect();
        let reaction: Vec<f64> = (0..DOFS)
            .filter(|d| program.constraints[*d] != Constraint::Free)
            .map(|d| force[d])
            .collect();
        let norm = max_norm(&r);
        let reaction = max_norm(&reaction);
        if !norm.is_finite() || !reaction.is_finite() {
            break;
        }
        if it == 0 {
            reference = reference.max(norm);
        }
        reference = reference.max(reaction);
        residuals.push(norm);
        if norm <= options.tolerance * reference {
            let k_ff = k.submatrix(free);
            let ratio = if free.is_empty() {
                None
            } else {
                let eig = k_ff.symmetric_eigenvalues();
                let (lo, hi) = (eig[0], eig[eig.len() - 1]);
                (lo != 0.0).then(|| hi / lo)
            };
            return Ok((u, residuals, ratio));
        }
        if it == options.max_iterations {
            break;
        }
        let k_ff = k.submatrix(free);
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let delta = k_ff.solve(&rhs)?;
        // backtrack while the update leaves the admissible region or
        // increases the residual
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..12 {
            let mut trial = u;
            for (&d, dv) in free.iter().zip(&delta) {
                trial[d] += step * dv;
            }
            if let Ok((n, reac)) = evaluate(element, material, program, free, &trial, &input) {
                if n.is_finite() && reac.is_finite() && (n < norm || n <= options.tolerance * reference.max(reac)) {
                    accepted = Some(trial);
                    break;
                }
            }
            step *= 0.5;
        }
        match accepted {
            Some(trial) => u = trial,
            None => break,
        }
    }
    // the caller fills in the step index
    Err(Error::NonConvergence {
        step: 0,
        residual: residuals.last().copied().unwrap_or(f64::NAN),
    })
}
