//! Linear finite elements on a uniform 1-D mesh.
//!
//! Every element operator is integrated with 2-point Gauss quadrature, which is
//! exact for the products of linear shape functions with linearly varying
//! coefficients. Global matrices are symmetric tridiagonal and are solved
//! directly with an LDL^T sweep.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FemError {
    #[error("mesh needs at least 2 elements and a positive length (got {n_elements} elements, length {length})")]
    InvalidMesh { n_elements: usize, length: f64 },
    #[error("non-finite coefficient {value} in element {element}")]
    NonFiniteCoefficient { element: usize, value: f64 },
    #[error("singular system at row {row}: pivot {pivot:.3e} against row scale {scale:.3e} (ratio {ratio:.3e})")]
    Singular {
        row: usize,
        pivot: f64,
        scale: f64,
        ratio: f64,
    },
    #[error("solve residual {residual:.3e} exceeds bound {bound:.1e}; pivot spread {pivot_spread:.3e}")]
    Residual {
        residual: f64,
        bound: f64,
        pivot_spread: f64,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
}

/// Relative residual bound enforced on every solve.
pub const RESIDUAL_BOUND: f64 = 1e-10;

const INV_SQRT3: f64 = 0.577_350_269_189_625_8;

/// Uniform mesh of `[0, length]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mesh1D {
    length: f64,
    n_elements: usize,
}

/// A Gauss point of one element with its shape-function values and `J * w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    pub element: usize,
    pub index: usize,
    pub x: f64,
    pub shape: [f64; 2],
    pub jxw: f64,
}

impl QuadPoint {
    /// Linear interpolation of a nodal vector at this point.
    #[inline]
    pub fn interpolate(&self, nodal: &[f64]) -> f64 {
        self.shape[0] * nodal[self.element] + self.shape[1] * nodal[self.element + 1]
    }
}

impl Mesh1D {
    pub fn uniform(length: f64, n_elements: usize) -> Result<Self, FemError> {
        if n_elements < 2 || !(length > 0.0) || !length.is_finite() {
            return Err(FemError::InvalidMesh { n_elements, length });
        }
        Ok(Self { length, n_elements })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn n_nodes(&self) -> usize {
        self.n_elements + 1
    }

    pub fn h(&self) -> f64 {
        self.length / self.n_elements as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n_elements {
            self.length
        } else {
            i as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes()).map(|i| self.node(i)).collect()
    }

    #[inline]
    pub fn quad_points(&self, element: usize) -> [QuadPoint; 2] {
        let h = self.h();
        let x0 = element as f64 * h;
        let make = |index: usize, xi: f64| {
            let n1 = 0.5 * (1.0 - xi);
            let n2 = 0.5 * (1.0 + xi);
            QuadPoint {
                element,
                index,
                x: x0 + n2 * h,
                shape: [n1, n2],
                jxw: 0.5 * h,
            }
        };
        [make(0, -INV_SQRT3), make(1, INV_SQRT3)]
    }

    /// Gradient of a nodal field on one element.
    #[inline]
    pub fn gradient(&self, nodal: &[f64], element: usize) -> f64 {
        (nodal[element + 1] - nodal[element]) / self.h()
    }

    /// Element gradients averaged onto shared nodes.
    pub fn nodal_gradient(&self, nodal: &[f64]) -> Vec<f64> {
        let ne = self.n_elements;
        let g: Vec<f64> = (0..ne).map(|e| self.gradient(nodal, e)).collect();
        let mut out = Vec::with_capacity(ne + 1);
        out.push(g[0]);
        for i in 1..ne {
            out.push(0.5 * (g[i - 1] + g[i]));
        }
        out.push(g[ne - 1]);
        out
    }
}

pub type ElementMatrix = [[f64; 2]; 2];

/// Symmetric tridiagonal matrix; `off[i]` couples rows `i` and `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            diag: vec![0.0; n],
            off: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            diag: vec![1.0; n],
            off: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn add_element(&mut self, element: usize, m: &ElementMatrix) {
        self.diag[element] += m[0][0];
        self.diag[element + 1] += m[1][1];
        self.off[element] += m[0][1];
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match (i as isize - j as isize).abs() {
            0 => self.diag[i],
            1 => self.off[i.min(j)],
            _ => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, v)| d * v).collect();
        for ((yi, o), v) in y[1..].iter_mut().zip(&self.off).zip(x) {
            *yi += o * v;
        }
        for ((yi, o), v) in y.iter_mut().zip(&self.off).zip(&x[1..]) {
            *yi += o * v;
        }
        y
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.mul_vec(&vec![1.0; self.dim()])
    }

    /// LDL^T factorization without pivoting.
    pub fn factor(&self) -> Result<LdlFactor, FemError> {
        let n = self.dim();
        let mut d = Vec::with_capacity(n);
        let mut l = Vec::with_capacity(n.saturating_sub(1));
        let (mut l_prev, mut off_prev) = (0.0, 0.0);
        for (i, &diag) in self.diag.iter().enumerate() {
            let off_next = self.off.get(i).copied().unwrap_or(0.0);
            let pivot = diag - l_prev * off_prev;
            let scale = diag.abs() + off_prev.abs() + off_next.abs();
            if !(pivot.abs() > 1e-14 * scale) || !pivot.is_finite() {
                return Err(FemError::Singular {
                    row: i,
                    pivot,
                    scale,
                    ratio: pivot.abs() / scale.max(f64::MIN_POSITIVE),
                });
            }
            d.push(pivot);
            if i + 1 < n {
                l_prev = off_next / pivot;
                l.push(l_prev);
            }
            off_prev = off_next;
        }
        Ok(LdlFactor { d, l })
    }
}

/// Reusable LDL^T factors of a [`SymTridiagonal`].
#[derive(Debug, Clone, PartialEq)]
pub struct LdlFactor {
    d: Vec<f64>,
    l: Vec<f64>,
}

impl LdlFactor {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        let mut prev = x.first().copied().unwrap_or(0.0);
        for (xi, l) in x.iter_mut().skip(1).zip(&self.l) {
            *xi -= l * prev;
            prev = *xi;
        }
        for (xi, d) in x.iter_mut().zip(&self.d) {
            *xi /= d;
        }
        let mut next = x.last().copied().unwrap_or(0.0);
        for (xi, l) in x.iter_mut().rev().skip(1).zip(self.l.iter().rev()) {
            *xi -= l * next;
            next = *xi;
        }
        x
    }

    /// Ratio of largest to smallest pivot magnitude.
    pub fn pivot_spread(&self) -> f64 {
        let (lo, hi) = self.d.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), &p| {
            (lo.min(p.abs()), hi.max(p.abs()))
        });
        hi / lo
    }
}

/// Matrix and right-hand side of one linear problem.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalSystem {
    pub matrix: SymTridiagonal,
    pub rhs: Vec<f64>,
}

impl GlobalSystem {
    pub fn new(matrix: SymTridiagonal, rhs: Vec<f64>) -> Result<Self, FemError> {
        if matrix.dim() != rhs.len() {
            return Err(FemError::Dimension {
                expected: matrix.dim(),
                found: rhs.len(),
            });
        }
        Ok(Self { matrix, rhs })
    }

    pub fn with_zero_rhs(matrix: SymTridiagonal) -> Self {
        let n = matrix.dim();
        Self {
            matrix,
            rhs: vec![0.0; n],
        }
    }
}

#[inline]
fn checked(element: usize, value: f64) -> Result<f64, FemError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(FemError::NonFiniteCoefficient { element, value })
    }
}

/// `int_e c(x) B^T B dx` for one element.
#[inline]
pub fn element_stiffness(
    mesh: &Mesh1D,
    element: usize,
    mut coeff: impl FnMut(&QuadPoint) -> f64,
) -> Result<ElementMatrix, FemError> {
    let h = mesh.h();
    let mut integral = 0.0;
    for qp in &mesh.quad_points(element) {
        integral += checked(element, coeff(qp))? * qp.jxw;
    }
    let k = integral / (h * h);
    Ok([[k, -k], [-k, k]])
}

/// `int_e c(x) N^T N dx` for one element.
#[inline]
pub fn element_mass(
    mesh: &Mesh1D,
    element: usize,
    mut coeff: impl FnMut(&QuadPoint) -> f64,
) -> Result<ElementMatrix, FemError> {
    let mut m = [[0.0; 2]; 2];
    for qp in &mesh.quad_points(element) {
        let w = checked(element, coeff(qp))? * qp.jxw;
        let [n1, n2] = qp.shape;
        m[0][0] += w * n1 * n1;
        m[0][1] += w * n1 * n2;
        m[1][1] += w * n2 * n2;
    }
    m[1][0] = m[0][1];
    Ok(m)
}

pub fn assemble_stiffness(mesh: &Mesh1D, mut coeff: impl FnMut(&QuadPoint) -> f64) -> Result<SymTridiagonal, FemError> {
    let mut k = SymTridiagonal::zeros(mesh.n_nodes());
    for e in 0..mesh.n_elements() {
        k.add_element(e, &element_stiffness(mesh, e, &mut coeff)?);
    }
    Ok(k)
}

pub fn assemble_mass(mesh: &Mesh1D, mut coeff: impl FnMut(&QuadPoint) -> f64) -> Result<SymTridiagonal, FemError> {
    let mut m = SymTridiagonal::zeros(mesh.n_nodes());
    for e in 0..mesh.n_elements() {
        m.add_element(e, &element_mass(mesh, e, &mut coeff)?);
    }
    Ok(m)
}

/// Stiffness plus mass, `int c_k B^T B + c_m N^T N`, in a single element sweep.
pub fn assemble_reaction_diffusion(
    mesh: &Mesh1D,
    mut stiffness: impl FnMut(&QuadPoint) -> f64,
    mut mass: impl FnMut(&QuadPoint) -> f64,
) -> Result<SymTridiagonal, FemError> {
    let mut a = SymTridiagonal::zeros(mesh.n_nodes());
    for e in 0..mesh.n_elements() {
        a.add_element(e, &element_stiffness(mesh, e, &mut stiffness)?);
        a.add_element(e, &element_mass(mesh, e, &mut mass)?);
    }
    Ok(a)
}

/// Load vector `int f(x) N dx`.
pub fn assemble_load(mesh: &Mesh1D, mut f: impl FnMut(&QuadPoint) -> f64) -> Result<Vec<f64>, FemError> {
    let mut b = vec![0.0; mesh.n_nodes()];
    for e in 0..mesh.n_elements() {
        for qp in &mesh.quad_points(e) {
            let w = checked(e, f(qp))? * qp.jxw;
            b[e] += w * qp.shape[0];
            b[e + 1] += w * qp.shape[1];
        }
    }
    Ok(b)
}

/// Load vector `int g(x) B^T dx` for a per-point scalar `g`.
pub fn assemble_gradient_load(mesh: &Mesh1D, mut g: impl FnMut(&QuadPoint) -> f64) -> Result<Vec<f64>, FemError> {
    let h = mesh.h();
    let mut b = vec![0.0; mesh.n_nodes()];
    for e in 0..mesh.n_elements() {
        let mut integral = 0.0;
        for qp in &mesh.quad_points(e) {
            integral += checked(e, g(qp))? * qp.jxw;
        }
        b[e] -= integral / h;
        b[e + 1] += integral / h;
    }
    Ok(b)
}

/// Fixes `x[node] = value` by row and column elimination.
pub fn apply_dirichlet(system: &mut GlobalSystem, node: usize, value: f64) {
    let n = system.matrix.dim();
    if node > 0 {
        let a = system.matrix.off[node - 1];
        system.rhs[node - 1] -= a * value;
        system.matrix.off[node - 1] = 0.0;
    }
    if node + 1 < n {
        let a = system.matrix.off[node];
        system.rhs[node + 1] -= a * value;
        system.matrix.off[node] = 0.0;
    }
    system.matrix.diag[node] = 1.0;
    system.rhs[node] = value;
}

pub fn apply_point_load(system: &mut GlobalSystem, node: usize, value: f64) {
    system.rhs[node] += value;
}

/// Direct solve with a relative residual check.
pub fn solve(system: &GlobalSystem) -> Result<Vec<f64>, FemError> {
    let factor = system.matrix.factor()?;
    let x = factor.solve(&system.rhs);
    let (mut r2, mut b2) = (0.0, 0.0);
    for (a, b) in system.matrix.mul_vec(&x).iter().zip(&system.rhs) {
        r2 += (a - b) * (a - b);
        b2 += b * b;
    }
    let residual = if b2 > 0.0 { (r2 / b2).sqrt() } else { r2.sqrt() };
    if !(residual <= RESIDUAL_BOUND) {
        return Err(FemError::Residual {
            residual,
            bound: RESIDUAL_BOUND,
            pivot_spread: factor.pivot_spread(),
        });
    }
    Ok(x)
}

/// Physical quantity carried by a nodal vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Unit {
    Meter,
    Dimensionless,
    JoulePerSquareMeter,
    Kelvin,
    Volt,
    JoulePerCubicMeter,
}

impl Unit {
    pub fn symbol(&self) -> &'static str {
        match self {
            Unit::Meter => "m",
            Unit::Dimensionless => "1",
            Unit::JoulePerSquareMeter => "J/m^2",
            Unit::Kelvin => "K",
            Unit::Volt => "V",
            Unit::JoulePerCubicMeter => "J/m^3",
        }
    }
}

/// Nodal values with a unit tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalField {
    pub values: Vec<f64>,
    pub unit: Unit,
}

impl NodalField {
    pub fn new(values: Vec<f64>, unit: Unit) -> Self {
        Self { values, unit }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn two_element_stiffness() {
        let mesh = Mesh1D::uniform(1.0, 2).unwrap();
        let k = assemble_stiffness(&mesh, |_| 1.0).unwrap();
        // h = 1/2, so each element contributes 2 [1 -1; -1 1]
        let expect = [[2.0, -2.0, 0.0], [-2.0, 4.0, -2.0], [0.0, -2.0, 2.0]];
        for (i, row) in expect.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_relative_eq!(k.get(i, j), v, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn zero_coefficient_gives_zero_matrix() {
        let mesh = Mesh1D::uniform(3.0, 5).unwrap();
        let k = assemble_stiffness(&mesh, |_| 0.0).unwrap();
        let m = assemble_mass(&mesh, |_| 0.0).unwrap();
        assert!(k.diag.iter().chain(&k.off).all(|&v| v == 0.0));
        assert!(m.diag.iter().chain(&m.off).all(|&v| v == 0.0));
    }

    #[test]
    fn single_element_mass() {
        let mesh = Mesh1D::uniform(0.6, 2).unwrap();
        let m = element_mass(&mesh, 0, |_| 1.0).unwrap();
        let h = 0.3;
        assert_relative_eq!(m[0][0], h / 3.0, epsilon = 1e-15);
        assert_relative_eq!(m[0][1], h / 6.0, epsilon = 1e-15);
        assert_relative_eq!(m[1][1], h / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn mass_partition_of_unity() {
        let mesh = Mesh1D::uniform(7.5, 13).unwrap();
        let m = assemble_mass(&mesh, |_| 1.0).unwrap();
        assert_relative_eq!(m.row_sums().iter().sum::<f64>(), 7.5, max_relative = 1e-13);
    }

    #[test]
    fn stiffness_null_space() {
        let mesh = Mesh1D::uniform(2.0, 9).unwrap();
        let k = assemble_stiffness(&mesh, |qp| 1.0 + qp.x * qp.x).unwrap();
        for s in k.row_sums() {
            assert!(s.abs() < 1e-12);
        }
    }

    #[test]
    fn non_finite_coefficient_names_element() {
        let mesh = Mesh1D::uniform(1.0, 4).unwrap();
        let err = assemble_stiffness(&mesh, |qp| if qp.element == 2 { f64::NAN } else { 1.0 }).unwrap_err();
        assert!(matches!(err, FemError::NonFiniteCoefficient { element: 2, .. }));
    }

    #[test]
    fn identity_solve() {
        let sys = GlobalSystem::new(SymTridiagonal::identity(4), vec![1.0, -2.0, 3.0, 0.5]).unwrap();
        assert_eq!(solve(&sys).unwrap(), vec![1.0, -2.0, 3.0, 0.5]);
    }

    fn laplace(n: usize) -> GlobalSystem {
        let mesh = Mesh1D::uniform(1.0, n).unwrap();
        GlobalSystem::with_zero_rhs(assemble_stiffness(&mesh, |_| 1.0).unwrap())
    }

    #[test]
    fn dirichlet_zero_and_nonzero() {
        let mut sys = laplace(6);
        apply_dirichlet(&mut sys, 0, 0.0);
        apply_dirichlet(&mut sys, 6, 0.7);
        let u = solve(&sys).unwrap();
        assert_eq!(u[0], 0.0);
        assert_eq!(u[6], 0.7);
        for (i, v) in u.iter().enumerate() {
            assert_relative_eq!(*v, 0.7 * i as f64 / 6.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn dirichlet_idempotent() {
        let mut once = laplace(5);
        apply_point_load(&mut once, 3, 1.0);
        apply_dirichlet(&mut once, 0, 0.25);
        let mut twice = once.clone();
        apply_dirichlet(&mut twice, 0, 0.25);
        assert_eq!(once, twice);
    }

    #[test]
    fn point_loads() {
        let base = laplace(4);
        let mut zero = base.clone();
        apply_point_load(&mut zero, 2, 0.0);
        assert_eq!(zero, base);
        let mut a = base.clone();
        apply_point_load(&mut a, 2, 1.5);
        apply_point_load(&mut a, 2, 2.5);
        assert_eq!(a.rhs[2], 4.0);
    }

    #[test]
    fn end_loaded_bar() {
        // -(cA u')' = 0, u(0) = 0, cA u'(L) = P  =>  u = P x / (cA)
        let (c, area, load) = (70e9, 1.2e-3, 3.0e4);
        let mesh = Mesh1D::uniform(10.0, 20).unwrap();
        let mut sys = GlobalSystem::with_zero_rhs(assemble_stiffness(&mesh, |_| c * area).unwrap());
        apply_point_load(&mut sys, 20, load);
        apply_dirichlet(&mut sys, 0, 0.0);
        let u = solve(&sys).unwrap();
        for (i, x) in mesh.nodes().iter().enumerate() {
            assert_relative_eq!(u[i], load * x / (c * area), max_relative = 1e-10, epsilon = 1e-18);
        }
    }

    #[test]
    fn singular_system_reported() {
        let sys = laplace(4);
        match solve(&sys) {
            Err(FemError::Singular { .. }) | Err(FemError::Residual { .. }) => {}
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn permuted_assembly_is_identical() {
        let mesh = Mesh1D::uniform(4.0, 17).unwrap();
        let coeff = |qp: &QuadPoint| 2.0 + (3.0 * qp.x).sin();
        let forward = assemble_stiffness(&mesh, coeff).unwrap();
        let mut permuted = SymTridiagonal::zeros(mesh.n_nodes());
        let order: Vec<usize> = (0..17).map(|k| (k * 7) % 17).collect();
        for &e in &order {
            permuted.add_element(e, &element_stiffness(&mesh, e, coeff).unwrap());
        }
        assert_eq!(forward, permuted);
    }

    /// Manufactured solution u = sin(pi x / L) for -u'' = f with u(0) = u(L) = 0.
    pub(crate) fn mms_error(n: usize) -> f64 {
        let len = 2.0;
        let k = PI / len;
        let mesh = Mesh1D::uniform(len, n).unwrap();
        let a = assemble_stiffness(&mesh, |_| 1.0).unwrap();
        let b = assemble_load(&mesh, |qp| k * k * (k * qp.x).sin()).unwrap();
        let mut sys = GlobalSystem::new(a, b).unwrap();
        apply_dirichlet(&mut sys, 0, 0.0);
        apply_dirichlet(&mut sys, n, 0.0);
        let u = solve(&sys).unwrap();
        // L2 error with a 5-point rule per element
        let gl5 = [
            (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
            (-0.538_469_310_105_683, 0.478_628_670_499_366_5),
            (0.0, 0.568_888_888_888_888_9),
            (0.538_469_310_105_683, 0.478_628_670_499_366_5),
            (0.906_179_845_938_664, 0.236_926_885_056_189_1),
        ];
        let h = mesh.h();
        let mut err = 0.0;
        for e in 0..n {
            for &(xi, w) in &gl5 {
                let x = mesh.node(e) + 0.5 * (1.0 + xi) * h;
                let uh = 0.5 * (1.0 - xi) * u[e] + 0.5 * (1.0 + xi) * u[e + 1];
                err += w * 0.5 * h * ((k * x).sin() - uh).powi(2);
            }
        }
        err.sqrt()
    }

    #[test]
    fn manufactured_solution_second_order() {
        let ratio = mms_error(100) / mms_error(200);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn nodal_gradient_of_linear_field() {
        let mesh = Mesh1D::uniform(3.0, 6).unwrap();
        let f: Vec<f64> = mesh.nodes().iter().map(|x| 2.0 * x - 1.0).collect();
        for g in mesh.nodal_gradient(&f) {
            assert_relative_eq!(g, 2.0, epsilon = 1e-12);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn stiffness_symmetric_positive(coeffs in proptest::collection::vec(0.1f64..100.0, 8)) {
                let mesh = Mesh1D::uniform(1.0, 8).unwrap();
                let k = assemble_stiffness(&mesh, |qp| coeffs[qp.element]).unwrap();
                for i in 0..9 {
                    for j in 0..9 {
                        prop_assert_eq!(k.get(i, j), k.get(j, i));
                    }
                }
                prop_assert!(k.diag.iter().all(|&d| d > 0.0));
            }

            #[test]
            fn residual_bound_holds(coeffs in proptest::collection::vec(1e-3f64..1e3, 30), load in -1e4f64..1e4) {
                let mesh = Mesh1D::uniform(5.0, 30).unwrap();
                let a = assemble_reaction_diffusion(&mesh, |qp| coeffs[qp.element], |_| 0.5).unwrap();
                let mut sys = GlobalSystem::with_zero_rhs(a);
                apply_point_load(&mut sys, 30, load);
                let x = solve(&sys).unwrap();
                prop_assert!(x.iter().all(|v| v.is_finite()));
            }
        }
    }
}
