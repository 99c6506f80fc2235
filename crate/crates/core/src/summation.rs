//! Transference automorphisms `ρ_w`, Fejér and Abel means, and the Dirichlet
//! kernel profile.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{
    anti_transform_vector, hat_vector, paren_functional, paren_vector, FourierCoeffs, TransformKind,
};
use crate::gns::{
    cyclic_vector, multiplier_grid, represent, u_kl_symbol, BlockGrids, GnsOperator, GnsSpace,
    GnsVector,
};
use crate::spectral::{quadrature_inner, GridFunction, C64};
use crate::weyl::{involution, WeylElement};

const ZERO: C64 = C64::new(0.0, 0.0);

/// A point `w = (w₁, w₂)` of the 2-torus, stored by its angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferencePoint {
    phi1: f64,
    phi2: f64,
}

impl TransferencePoint {
    pub fn new(w1: C64, w2: C64) -> Result<Self> {
        if (w1.norm() - 1.0).abs() > 1e-14 || (w2.norm() - 1.0).abs() > 1e-14 {
            return Err(Error::InvalidParameter(format!(
                "transference point must lie on the torus (|w1| = {}, |w2| = {})",
                w1.norm(),
                w2.norm()
            )));
        }
        Ok(Self {
            phi1: w1.arg(),
            phi2: w2.arg(),
        })
    }

    pub fn from_angles(phi1: f64, phi2: f64) -> Self {
        Self { phi1, phi2 }
    }

    pub fn identity() -> Self {
        Self::from_angles(0.0, 0.0)
    }

    pub fn w1(&self) -> C64 {
        C64::from_polar(1.0, self.phi1)
    }

    pub fn w2(&self) -> C64 {
        C64::from_polar(1.0, self.phi2)
    }

    /// `w₁ˡ w₂ᵏ`.
    pub fn character(&self, k: i64, l: i64) -> C64 {
        C64::from_polar(1.0, l as f64 * self.phi1 + k as f64 * self.phi2)
    }
}

/// `(ρ_w x)_n(z) = w₂ⁿ x_n(w₁z)`; on coordinates this is the phase `w₁ˡ w₂ᵏ`.
pub fn transfer_vector(w: TransferencePoint, x: &GnsVector) -> GnsVector {
    let tbox = x.tbox();
    let coeffs = x
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let (k, l) = tbox.site(i);
            c * w.character(k, l)
        })
        .collect();
    GnsVector::from_coeffs(tbox, coeffs).expect("same box")
}

/// `m_{n,s}(z) ↦ w₂ˢ m_{n,s}(w₁z)`, resampled spectrally.
pub fn transfer_operator(w: TransferencePoint, a: &GnsOperator) -> GnsOperator {
    let terms = a
        .terms()
        .iter()
        .map(|(&s, grids)| {
            let phase = C64::from_polar(1.0, s as f64 * w.phi2);
            (s, grids.iter().map(|g| rotate(g, w.phi1).scale(phase)).collect())
        })
        .collect();
    GnsOperator::from_terms(a.tbox(), terms).expect("same box")
}

fn rotate(g: &GridFunction, phi: f64) -> GridFunction {
    if phi == 0.0 {
        g.clone()
    } else {
        g.rotated(phi)
    }
}

/// Hat table of the pre-transposed functional `y ↦ L_a(ρ_w(y))`:
/// `⟨π(a)ξ_ω, ρ_w(u_kl)ξ_ω⟩`, with `ρ_w(u_kl)` built from its multiplier.
pub fn transferred_hat(a: &WeylElement, w: TransferencePoint, space: &GnsSpace) -> Result<FourierCoeffs> {
    let tbox = space.tbox();
    let xi = BlockGrids::from_vector(&cyclic_vector(tbox));
    let v = represent(a, space)?.apply_grids(&xi);
    let values = (0..tbox.dim())
        .into_par_iter()
        .map(|i| {
            let (k, l) = tbox.site(i);
            let Some(block) = v.block(k) else { return Ok(ZERO) };
            // (u_kl ξ)_k = m_{k,k}, every other block vanishes
            let m = multiplier_grid(&u_kl_symbol(k, l, space)?, k, k, space)?;
            let moved = rotate(&m, w.phi1).scale(C64::from_polar(1.0, k as f64 * w.phi2));
            quadrature_inner(block, &moved)
        })
        .collect::<Result<Vec<_>>>()?;
    FourierCoeffs::new(TransformKind::Hat, tbox, values)
}

/// `w₁^{−l} w₂^{−k} c(k,l)`.
pub fn twisted_table(c: &FourierCoeffs, w: TransferencePoint) -> FourierCoeffs {
    let tbox = c.tbox();
    let values = c
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let (k, l) = tbox.site(i);
            v * w.character(k, l).conj()
        })
        .collect();
    FourierCoeffs::new(c.kind(), tbox, values).expect("same box")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "parameter", rename_all = "lowercase")]
pub enum SummationKernel {
    Fejer(usize),
    Poisson(f64),
    Dirichlet(usize),
}

impl SummationKernel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SummationKernel::Poisson(r) if !(0.0..1.0).contains(&r) => {
                Err(Error::InvalidParameter(format!("Poisson radius {r} outside [0, 1)")))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let half = 0.5 * theta;
        match *self {
            SummationKernel::Fejer(n) => {
                let s = half.sin();
                let np1 = (n + 1) as f64;
                if s.abs() < 1e-12 {
                    np1
                } else {
                    let q = (np1 * half).sin() / s;
                    q * q / np1
                }
            }
            SummationKernel::Poisson(r) => (1.0 - r * r) / (1.0 - 2.0 * r * theta.cos() + r * r),
            SummationKernel::Dirichlet(n) => {
                let s = half.sin();
                if s.abs() < 1e-12 {
                    (2 * n + 1) as f64
                } else {
                    ((n as f64 + 0.5) * theta).sin() / s
                }
            }
        }
    }

    /// Fourier coefficient of the kernel at mode `l`.
    pub fn coefficient(&self, l: i64) -> f64 {
        let a = l.unsigned_abs() as usize;
        match *self {
            SummationKernel::Fejer(n) => (1.0 - a as f64 / (n + 1) as f64).max(0.0),
            SummationKernel::Poisson(r) => r.powi(a as i32),
            SummationKernel::Dirichlet(n) => {
                if a <= n {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Product weight `κ̂(k) κ̂(l)`.
    pub fn weight(&self, k: i64, l: i64) -> f64 {
        self.coefficient(k) * self.coefficient(l)
    }

    pub fn grid(&self, grid_size: usize) -> Result<GridFunction> {
        GridFunction::from_fn(grid_size, |t| C64::new(self.eval(t), 0.0))
    }

    /// `∮ |κ| dm` by the midpoint rule on `points` nodes.
    pub fn l1_norm(&self, points: usize) -> f64 {
        let h = 2.0 * PI / points as f64;
        (0..points)
            .map(|j| self.eval((j as f64 + 0.5) * h).abs())
            .sum::<f64>()
            / points as f64
    }
}

/// Where the vector being summed comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum SummationSource {
    Element(WeylElement),
    Vector(GnsVector),
}

/// Coefficient table of the source and the vector the means should converge to:
/// `π(a)ξ_ω` for hat, `Δ^{1/2}π(a)ξ_ω` for paren (elements), `x` itself (vectors).
pub fn summation_target(
    source: &SummationSource,
    kind: TransformKind,
    space: &GnsSpace,
) -> Result<(FourierCoeffs, GnsVector)> {
    match (source, kind) {
        (SummationSource::Vector(x), TransformKind::Hat) => Ok((hat_vector(x), x.clone())),
        (SummationSource::Vector(x), TransformKind::Paren) => Ok((paren_vector(x, space)?, x.clone())),
        (SummationSource::Element(a), TransformKind::Hat) => {
            let v = represent(a, space)?.apply(&cyclic_vector(space.tbox()));
            Ok((hat_vector(&v), v))
        }
        (SummationSource::Element(a), TransformKind::Paren) => {
            // Δ^{1/2} acts before projecting, so the target carries no truncation of π(a)ξ
            let xi = BlockGrids::from_vector(&cyclic_vector(space.tbox()));
            let target = represent(a, space)?.apply_grids(&xi).delta_power(1.0, space)?.to_vector().0;
            Ok((paren_functional(a, space)?, target))
        }
    }
}

/// `Σ κ̂(k) κ̂(l) c(k,l)` anti-transformed with `e^{kl}` (hat) or `ε^{kl}` (paren).
pub fn kernel_mean(c: &FourierCoeffs, kernel: SummationKernel, space: &GnsSpace) -> Result<GnsVector> {
    kernel.validate()?;
    let weighted = weighted_table(c, kernel);
    anti_transform_vector(&weighted, space)
}

fn weighted_table(c: &FourierCoeffs, kernel: SummationKernel) -> FourierCoeffs {
    let tbox = c.tbox();
    let values = c
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let (k, l) = tbox.site(i);
            v * kernel.weight(k, l)
        })
        .collect();
    FourierCoeffs::new(c.kind(), tbox, values).expect("same box")
}

/// Cesàro mean `Σ_{|k|,|l| ≤ N} (1 − |k|/(N+1))(1 − |l|/(N+1)) c(k,l) u_kl ξ_ω`.
pub fn fejer_mean(
    source: &SummationSource,
    n: usize,
    kind: TransformKind,
    space: &GnsSpace,
) -> Result<GnsVector> {
    let tbox = space.tbox();
    if n > tbox.k_bound().min(tbox.m_bound()) {
        return Err(Error::InvalidParameter(format!(
            "Fejér order {n} exceeds min(K, M) = {}",
            tbox.k_bound().min(tbox.m_bound())
        )));
    }
    let (c, _) = summation_target(source, kind, space)?;
    kernel_mean(&c, SummationKernel::Fejer(n), space)
}

/// Abel mean `Σ r^{|k|+|l|} c(k,l) u_kl ξ_ω`.
pub fn abel_mean(source: &SummationSource, r: f64, kind: TransformKind, space: &GnsSpace) -> Result<GnsVector> {
    let (c, _) = summation_target(source, kind, space)?;
    kernel_mean(&c, SummationKernel::Poisson(r), space)
}

/// One row of a convergence report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub parameter: f64,
    pub l2_error: f64,
    pub sup_coeff_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    /// `"N"` for Fejér, `"r"` for Abel.
    pub parameter_name: &'static str,
    pub kind: TransformKind,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn l2_errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.l2_error).collect()
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].l2_error < w[0].l2_error)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([self.parameter_name, "l2_error", "sup_coeff_error"])?;
        for r in &self.rows {
            out.serialize((r.parameter, r.l2_error, r.sup_coeff_error))?;
        }
        out.flush()?;
        Ok(())
    }
}

fn convergence(
    source: &SummationSource,
    kind: TransformKind,
    kernels: &[(f64, SummationKernel)],
    parameter_name: &'static str,
    space: &GnsSpace,
) -> Result<ConvergenceReport> {
    let (c, target) = summation_target(source, kind, space)?;
    let rows = kernels
        .iter()
        .map(|&(parameter, kernel)| {
            let mean = kernel_mean(&c, kernel, space)?;
            let tbox = c.tbox();
            let sup_coeff_error = c
                .values()
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let (k, l) = tbox.site(i);
                    (v * (1.0 - kernel.weight(k, l))).norm()
                })
                .fold(0.0, f64::max);
            Ok(ConvergenceRow {
                parameter,
                l2_error: mean.distance(&target),
                sup_coeff_error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport {
        parameter_name,
        kind,
        rows,
    })
}

pub fn fejer_convergence(
    source: &SummationSource,
    orders: &[usize],
    kind: TransformKind,
    space: &GnsSpace,
) -> Result<ConvergenceReport> {
    let tbox = space.tbox();
    let cap = tbox.k_bound().min(tbox.m_bound());
    if let Some(&n) = orders.iter().find(|&&n| n > cap) {
        return Err(Error::InvalidParameter(format!("Fejér order {n} exceeds min(K, M) = {cap}")));
    }
    let kernels: Vec<_> = orders.iter().map(|&n| (n as f64, SummationKernel::Fejer(n))).collect();
    convergence(source, kind, &kernels, "N", space)
}

pub fn abel_convergence(
    source: &SummationSource,
    radii: &[f64],
    kind: TransformKind,
    space: &GnsSpace,
) -> Result<ConvergenceReport> {
    let kernels: Vec<_> = radii.iter().map(|&r| (r, SummationKernel::Poisson(r))).collect();
    for (_, k) in &kernels {
        k.validate()?;
    }
    convergence(source, kind, &kernels, "r", space)
}

/// `‖∫∫ F_N(w₁)F_N(w₂) ρ_w(x) dm dm − Fejér mean‖` with a `Q × Q` equispaced rule in `w`.
pub fn transference_integral_check(
    source: &SummationSource,
    n: usize,
    q: usize,
    space: &GnsSpace,
) -> Result<f64> {
    if q < 4 * n + 4 {
        return Err(Error::InvalidParameter(format!(
            "quadrature size {q} below 4N + 4 = {}",
            4 * n + 4
        )));
    }
    let (c, x) = summation_target(source, TransformKind::Hat, space)?;
    let kernel = SummationKernel::Fejer(n);
    let nodes: Vec<(usize, usize)> = (0..q).flat_map(|i| (0..q).map(move |j| (i, j))).collect();
    let angle = |i: usize| 2.0 * PI * i as f64 / q as f64;
    let terms: Vec<GnsVector> = nodes
        .par_iter()
        .map(|&(i, j)| {
            let (a1, a2) = (angle(i), angle(j));
            let weight = kernel.eval(a1) * kernel.eval(a2) / (q * q) as f64;
            transfer_vector(TransferencePoint::from_angles(a1, a2), &x).scale(C64::new(weight, 0.0))
        })
        .collect();
    let integral = terms
        .iter()
        .fold(GnsVector::zeros(space.tbox()), |acc, t| acc.add(t));
    let mean = kernel_mean(&c, kernel, space)?;
    Ok(integral.distance(&mean))
}

/// `(n, ‖D_n‖₁)` by midpoint quadrature with `64(2n+1)` nodes (at least 4096).
pub fn kernel_l1_profile(ns: &[usize]) -> Vec<(usize, f64)> {
    ns.iter()
        .map(|&n| {
            let points = (64 * (2 * n + 1)).max(4096);
            (n, SummationKernel::Dirichlet(n).l1_norm(points))
        })
        .collect()
}

/// Hat table of the Dirichlet functional
/// `X_n(π(W(f))) = ∮ (f̌⁽⁰⁾ ∘ h⁻¹) D_n dm`, evaluated at `u_kl*` for every box site.
pub fn dirichlet_functional_hat(n: usize, space: &GnsSpace) -> Result<FourierCoeffs> {
    let tbox = space.tbox();
    let kernel = SummationKernel::Dirichlet(n).grid(tbox.grid_size())?;
    let values = (0..tbox.dim())
        .into_par_iter()
        .map(|i| {
            let (k, l) = tbox.site(i);
            // u_kl* is supported on shift −k, so only k = 0 has a row 0
            if k != 0 {
                return Ok(ZERO);
            }
            let adj = involution(&u_kl_symbol(k, l, space)?);
            if adj.row(0).is_empty() {
                return Ok(ZERO);
            }
            // the shift-0 multiplier at block 0 is f̌⁽⁰⁾ ∘ h⁻¹
            let g = multiplier_grid(&adj, 0, 0, space)?;
            Ok(g.mul(&kernel)?.mean())
        })
        .collect::<Result<Vec<_>>>()?;
    FourierCoeffs::new(TransformKind::Hat, tbox, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{golden_alpha, DiffeoSpec};
    use crate::gns::{basis_vector, build_u_kl, TruncationBox};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const ONE: C64 = C64::new(1.0, 0.0);

    fn bench() -> GnsSpace {
        GnsSpace::new(DiffeoSpec::benchmark(), TruncationBox::new(8, 16, 256).unwrap()).unwrap()
    }

    #[test]
    fn transference_points() {
        assert!(TransferencePoint::new(C64::new(1.0, 0.0), C64::new(0.6, 0.8)).is_ok());
        assert!(TransferencePoint::new(C64::new(1.1, 0.0), ONE).is_err());
        let w = TransferencePoint::from_angles(0.3, -1.2);
        assert!((w.w1().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn transfer_vector_cases() {
        let s = bench();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = GnsVector::random(s.tbox(), 3, 5, &mut rng);
        assert_eq!(transfer_vector(TransferencePoint::identity(), &x), x);
        let w = TransferencePoint::from_angles(0.7, 2.1);
        assert!((transfer_vector(w, &x).norm() - x.norm()).abs() < 1e-12);
        let e = basis_vector(2, -3, s.tbox()).unwrap();
        let expected = e.scale(w.w2().powi(2) * w.w1().powi(-3));
        assert!(transfer_vector(w, &e).distance(&expected) < 1e-14);
    }

    #[test]
    fn transfer_operator_cases() {
        let s = bench();
        let xi = cyclic_vector(s.tbox());
        let u = build_u_kl(1, 2, &s).unwrap();
        let same = transfer_operator(TransferencePoint::identity(), &u);
        assert_eq!(same, u);
        let w = TransferencePoint::from_angles(-0.4, 1.3);
        let moved = transfer_operator(w, &u).apply(&xi);
        let expected = basis_vector(1, 2, s.tbox()).unwrap().scale(w.character(1, 2));
        assert!(moved.distance(&expected) < 1e-9);

        // ρ_w(A) = R A R⁻¹ with R the vector transfer
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = represent(&WeylElement::random(s.alpha(), (1, 1), &mut rng), &s).unwrap();
        let b = represent(&WeylElement::random(s.alpha(), (1, 1), &mut rng), &s).unwrap();
        let x = GnsVector::random(s.tbox(), 2, 2, &mut rng);
        let lhs = transfer_operator(w, &a.compose(&b)).apply(&x);
        let rhs = transfer_operator(w, &a).compose(&transfer_operator(w, &b)).apply(&x);
        assert!(lhs.distance(&rhs) < 1e-9);
    }

    #[test]
    fn transference_on_generators_and_random_elements() {
        let s = bench();
        let w = TransferencePoint::from_angles(0.9, -2.3);
        let sym = u_kl_symbol(1, -1, &s).unwrap();
        let t = transferred_hat(&sym, w, &s).unwrap();
        let delta = FourierCoeffs::from_entries(TransformKind::Hat, s.tbox(), [((1, -1), ONE)]).unwrap();
        assert!(t.max_deviation(&twisted_table(&delta, w)) < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = WeylElement::random(s.alpha(), (2, 2), &mut rng);
        let t = transferred_hat(&a, w, &s).unwrap();
        let h = crate::fourier::hat_functional(&a, &s).unwrap();
        assert!(t.max_deviation(&twisted_table(&h, w)) < 1e-10);
    }

    #[test]
    fn strong_continuity_proxy() {
        let s = bench();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = GnsVector::random(s.tbox(), 4, 6, &mut rng);
        let d: Vec<f64> = [0.1, 0.01, 0.001]
            .iter()
            .map(|&e| transfer_vector(TransferencePoint::from_angles(e, e), &x).distance(&x))
            .collect();
        assert!(d[0] > d[1] && d[1] > d[2]);
    }

    #[test]
    fn kernels_are_normalized() {
        for k in [SummationKernel::Fejer(5), SummationKernel::Poisson(0.8), SummationKernel::Dirichlet(4)] {
            let g = k.grid(256).unwrap();
            assert!((g.mean().re - 1.0).abs() < 1e-12);
            if !matches!(k, SummationKernel::Dirichlet(_)) {
                assert!(g.samples().iter().all(|v| v.re >= 0.0));
            }
            let spec = g.spectrum();
            for l in -6i64..=6 {
                let c = spec[crate::spectral::bin_of(l, 256)].re;
                assert!((c - k.coefficient(l)).abs() < 1e-12);
            }
        }
        assert!(SummationKernel::Poisson(1.0).validate().is_err());
    }

    #[test]
    fn fejer_examples() {
        let s = bench();
        let e11 = basis_vector(1, 1, s.tbox()).unwrap();
        let src = SummationSource::Vector(e11.clone());
        let m = fejer_mean(&src, 1, TransformKind::Hat, &s).unwrap();
        assert!(m.distance(&e11.scale(C64::new(0.25, 0.0))) < 1e-15);
        assert!((m.distance(&e11) - 0.75).abs() < 1e-15);
        let xi = cyclic_vector(s.tbox());
        for n in [0, 3, 8] {
            assert_eq!(fejer_mean(&SummationSource::Vector(xi.clone()), n, TransformKind::Hat, &s).unwrap(), xi);
        }
        assert!(fejer_mean(&src, 17, TransformKind::Hat, &s).is_err());
    }

    #[test]
    fn fejer_weights_and_double_application() {
        let s = bench();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = GnsVector::random(s.tbox(), 4, 4, &mut rng);
        let k = SummationKernel::Fejer(3);
        for kk in -5..=5 {
            for l in -5..=5 {
                assert!(k.weight(kk, l) <= 1.0);
            }
        }
        let once = kernel_mean(&hat_vector(&x), k, &s).unwrap();
        let twice = kernel_mean(&hat_vector(&once), k, &s).unwrap();
        let mut squared = hat_vector(&x);
        for i in 0..s.tbox().dim() {
            let (a, b) = s.tbox().site(i);
            let v = squared.get(a, b) * k.weight(a, b).powi(2);
            squared.set(a, b, v);
        }
        assert!(twice.distance(&anti_transform_vector(&squared, &s).unwrap()) < 1e-12);
    }

    #[test]
    fn fejer_rate() {
        let s = GnsSpace::new(DiffeoSpec::benchmark(), TruncationBox::new(16, 16, 256).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = GnsVector::random(s.tbox(), 2, 2, &mut rng);
        let rep = fejer_convergence(&SummationSource::Vector(x), &[4, 8, 16], TransformKind::Hat, &s).unwrap();
        assert!(rep.strictly_decreasing());
        let e = rep.l2_errors();
        for w in e.windows(2) {
            let ratio = w[1] / w[0];
            assert!((0.3..=0.7).contains(&ratio), "{ratio}");
        }
    }

    #[test]
    fn abel_examples() {
        let s = bench();
        let e11 = basis_vector(1, 1, s.tbox()).unwrap();
        let m = abel_mean(&SummationSource::Vector(e11.clone()), 0.5, TransformKind::Hat, &s).unwrap();
        assert!(m.distance(&e11.scale(C64::new(0.25, 0.0))) < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = GnsVector::random(s.tbox(), 2, 2, &mut rng);
        let zero = abel_mean(&SummationSource::Vector(x.clone()), 0.0, TransformKind::Hat, &s).unwrap();
        assert!(zero.distance(&cyclic_vector(s.tbox()).scale(x.get(0, 0))) < 1e-15);
        let rep = abel_convergence(&SummationSource::Vector(x), &[0.9, 0.99, 0.999], TransformKind::Hat, &s).unwrap();
        assert!(rep.strictly_decreasing());
    }

    #[test]
    fn paren_fejer_on_rotation() {
        let s = GnsSpace::new(
            DiffeoSpec::rotation(golden_alpha()).unwrap(),
            TruncationBox::new(16, 16, 256).unwrap(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = WeylElement::random(s.alpha(), (2, 2), &mut rng);
        let src = SummationSource::Element(a);
        let hat = fejer_convergence(&src, &[4, 8, 16], TransformKind::Hat, &s).unwrap();
        let paren = fejer_convergence(&src, &[4, 8, 16], TransformKind::Paren, &s).unwrap();
        assert!(paren.strictly_decreasing());
        for (h, p) in hat.rows.iter().zip(&paren.rows) {
            assert!((h.l2_error - p.l2_error).abs() < 1e-9);
        }
    }

    #[test]
    fn transference_integral_cases() {
        let s = bench();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = GnsVector::random(s.tbox(), 2, 2, &mut rng);
        let src = SummationSource::Vector(x);
        assert!(transference_integral_check(&src, 0, 4, &s).unwrap() < 1e-12);
        let e11 = SummationSource::Vector(basis_vector(1, 1, s.tbox()).unwrap());
        assert!(transference_integral_check(&e11, 1, 8, &s).unwrap() < 1e-10);
        assert!(transference_integral_check(&src, 3, 16, &s).unwrap() < 1e-9);
        assert!(transference_integral_check(&src, 3, 8, &s).is_err());
    }

    #[test]
    fn dirichlet_profile() {
        let p = kernel_l1_profile(&[0, 10, 100]);
        assert!((p[0].1 - 1.0).abs() < 1e-12);
        let growth = p[2].1 - p[1].1;
        let expected = 4.0 / (PI * PI) * 10f64.ln();
        assert!((growth - expected).abs() < 0.2, "{growth} vs {expected}");
    }

    #[test]
    fn dirichlet_functional_table() {
        let s = bench();
        for n in [3usize, 10, 100] {
            let t = dirichlet_functional_hat(n, &s).unwrap();
            assert!((t.sup_norm() - 1.0).abs() < 1e-9);
            for i in 0..s.tbox().dim() {
                let (k, l) = s.tbox().site(i);
                let expect = if k == 0 && l.unsigned_abs() as usize <= n { 1.0 } else { 0.0 };
                assert!((t.get(k, l) - expect).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn report_csv() {
        let rep = ConvergenceReport {
            parameter_name: "N",
            kind: TransformKind::Hat,
            rows: vec![ConvergenceRow {
                parameter: 4.0,
                l2_error: 0.5,
                sup_coeff_error: 0.25,
            }],
        };
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "N,l2_error,sup_coeff_error\n4.0,0.5,0.25\n");
    }
}
