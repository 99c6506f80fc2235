//! Undeformed and deformed Dirac blocks, deformed commutators, resolvent bounds
//! and the matrix elements of `D^(η)` in the hat and paren bases.
//!
//! Block `n` acts on `L²(T) ⊕ L²(T)` truncated to `|l| ≤ M`. `L_n = iz d/dz − a_n`
//! is the angular derivative shifted by `a_n`, exact on the truncated basis.

use std::collections::BTreeMap;
use std::io::Write;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::GrowthSequence;
use crate::error::{Error, Result};
use crate::gns::{represent, BlockGrids, GnsOperator, GnsSpace, TruncationBox};
use crate::spectral::{bin_of, quadrature_inner, GridFunction, C64};
use crate::weyl::{involution, WeylElement};

const ZERO: C64 = C64::new(0.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Tolerance for the independently built lower corner against the adjoint of the upper one.
pub const ADJOINT_TOLERANCE: f64 = 1e-9;
/// Spectral energy allowed in the top quarter of the grid after the block pipeline.
pub const GRID_ALIASING_TOLERANCE: f64 = 1e-20;
/// Singular values below this are treated as kernel in the `n = 0` block.
pub const KERNEL_TOLERANCE: f64 = 1e-10;
/// Below this a block with `n ≠ 0` counts as singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-13;
/// Relative slack for the resolvent and commutator bounds.
pub const BOUND_SLACK: f64 = 1e-6;

/// `a_n = sign(n) Σ_{l=1}^{|n|} 1/Γ_{l − (1 − sign n)/2}`, with `a_0 = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiracCoefficients {
    gamma: Vec<f64>,
    /// `a_n` for `n = −N..=N`, stored at `n + N`.
    values: Vec<f64>,
}

impl DiracCoefficients {
    /// Coefficients for `|n| ≤ Γ.n_max()`.
    pub fn from_growth(gamma: &GrowthSequence) -> Self {
        let g = gamma.values();
        let n_max = gamma.n_max();
        let mut pos = vec![0.0; n_max + 1];
        let mut neg = vec![0.0; n_max + 1];
        for n in 1..=n_max {
            pos[n] = pos[n - 1] + 1.0 / g[n];
            neg[n] = neg[n - 1] - 1.0 / g[n - 1];
        }
        let values = neg.iter().rev().chain(pos.iter().skip(1)).copied().collect();
        Self {
            gamma: g.to_vec(),
            values,
        }
    }

    /// Coefficients for `|n| ≤ K + 1`, with `Γ` sampled on the box grid.
    pub fn for_space(space: &GnsSpace) -> Result<Self> {
        let tbox = space.tbox();
        let gamma = space
            .diffeo()
            .growth_sequence(tbox.k_bound() + 1, tbox.grid_size())?;
        Ok(Self::from_growth(&gamma))
    }

    pub fn n_max(&self) -> usize {
        self.gamma.len() - 1
    }

    pub fn a(&self, n: i64) -> Result<f64> {
        let m = self.n_max() as i64;
        if n.abs() > m {
            return Err(Error::InvalidParameter(format!("a_{n} needs Γ beyond N = {m}")));
        }
        Ok(self.values[(n + m) as usize])
    }

    pub fn gamma(&self, n: usize) -> Result<f64> {
        self.gamma
            .get(n)
            .copied()
            .ok_or_else(|| Error::InvalidParameter(format!("Γ_{n} not available")))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Max over `1 ≤ |n| ≤ N` of `| |a_{n−1} − a_n| Γ_{|n|} − 1 |`.
    pub fn telescoping_defect(&self) -> f64 {
        let m = self.n_max() as i64;
        (-m + 1..=m)
            .map(|n| {
                let step = (self.a(n - 1).unwrap() - self.a(n).unwrap()).abs();
                (step * self.gamma[n.unsigned_abs() as usize] - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

pub fn a_sequence(gamma: &GrowthSequence) -> DiracCoefficients {
    DiracCoefficients::from_growth(gamma)
}

/// `D_n^(η)` in the basis `{z^l} ⊕ {z^l}`, `|l| ≤ M`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracBlock {
    pub n: i64,
    pub eta: f64,
    pub matrix: DMatrix<C64>,
}

impl DiracBlock {
    fn from_corners(n: i64, eta: f64, upper: &DMatrix<C64>, lower: &DMatrix<C64>) -> Self {
        let d = upper.nrows();
        let mut matrix = DMatrix::from_element(2 * d, 2 * d, ZERO);
        matrix.view_mut((0, d), (d, d)).copy_from(upper);
        matrix.view_mut((d, 0), (d, d)).copy_from(lower);
        Self { n, eta, matrix }
    }

    pub fn half_dim(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn upper(&self) -> DMatrix<C64> {
        let d = self.half_dim();
        self.matrix.view((0, d), (d, d)).into_owned()
    }

    pub fn lower(&self) -> DMatrix<C64> {
        let d = self.half_dim();
        self.matrix.view((d, 0), (d, d)).into_owned()
    }

    pub fn self_adjointness_deviation(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }

    /// Singular values in increasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.matrix.singular_values().iter().copied().collect();
        s.sort_by(f64::total_cmp);
        s
    }
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// `L_n = iz d/dz − a_n`: diagonal `(il − a_n)` upper corner, its adjoint below.
pub fn undeformed_block(n: i64, coeffs: &DiracCoefficients, m: usize) -> Result<DiracBlock> {
    let a = coeffs.a(n)?;
    let modes: Vec<f64> = (-(m as i64)..=m as i64).map(|l| l as f64).collect();
    let upper = DMatrix::from_diagonal(&modes.iter().map(|&l| C64::new(-a, l)).collect::<Vec<_>>().into());
    let lower = upper.adjoint();
    Ok(DiracBlock::from_corners(n, 0.0, &upper, &lower))
}

fn monomial_grid(l: i64, g: usize) -> GridFunction {
    GridFunction::from_fn(g, |t| C64::from_polar(1.0, l as f64 * t)).expect("box grid is valid")
}

fn real_power(d: &GridFunction, p: f64) -> GridFunction {
    if p == 0.0 {
        GridFunction::constant(d.grid_size(), C64::new(1.0, 0.0)).expect("box grid is valid")
    } else {
        d.map(|v| C64::new(v.re.powf(p), 0.0))
    }
}

/// `g ↦ ± d g/dθ − a g`; the sign picks `L_n` or `L_n*`.
fn apply_l(g: &GridFunction, a: f64, adjoint: bool) -> GridFunction {
    let sign = if adjoint { -1.0 } else { 1.0 };
    g.angular_derivative()
        .combine(C64::new(sign, 0.0), g, C64::new(-a, 0.0))
        .expect("same grid")
}

fn check_grid_aliasing(g: &GridFunction) -> Result<()> {
    let tail = g.tail_mass(3 * g.grid_size() / 8);
    if tail > GRID_ALIASING_TOLERANCE {
        return Err(Error::Aliasing {
            tail,
            tol: GRID_ALIASING_TOLERANCE,
            context: "Dirac block pipeline",
        });
    }
    Ok(())
}

/// Galerkin matrix of `M_{δ^{p_out}} L^(†) M_{δ^{p_in}}` on `|l| ≤ M`.
fn corner(
    delta: &GridFunction,
    a: f64,
    p_in: f64,
    p_out: f64,
    adjoint: bool,
    tbox: TruncationBox,
) -> Result<DMatrix<C64>> {
    let g = tbox.grid_size();
    let m = tbox.m_bound() as i64;
    let d = tbox.block_len();
    let inner = real_power(delta, p_in);
    let outer = real_power(delta, p_out);
    let cols = (-m..=m)
        .into_par_iter()
        .map(|l| {
            let out = apply_l(&monomial_grid(l, g).mul(&inner)?, a, adjoint).mul(&outer)?;
            check_grid_aliasing(&out)?;
            let spec = out.spectrum();
            Ok((-m..=m).map(|s| spec[bin_of(s, g)]).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_fn(d, d, |row, col| cols[col][row]))
}

/// `D_n^(η)`: upper corner `M_{δ_n^{η−1}} L_n M_{δ_n^{−η}}`, lower corner
/// `M_{δ_n^{−η}} L_n* M_{δ_n^{η−1}}` built separately and checked against the adjoint.
pub fn deformed_block(n: i64, eta: f64, coeffs: &DiracCoefficients, space: &GnsSpace) -> Result<DiracBlock> {
    check_eta(eta)?;
    let tbox = space.tbox();
    let a = coeffs.a(n)?;
    let delta = space.delta(n)?;
    let upper = corner(&delta, a, -eta, eta - 1.0, false, tbox)?;
    let lower = corner(&delta, a, eta - 1.0, -eta, true, tbox)?;
    let deviation = max_abs(&(&lower - upper.adjoint()));
    if deviation > ADJOINT_TOLERANCE {
        return Err(Error::RouteDisagreement {
            deviation,
            context: "lower Dirac corner vs adjoint of upper corner",
        });
    }
    Ok(DiracBlock::from_corners(n, eta, &upper, &lower))
}

fn check_eta(eta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("eta = {eta} outside [0, 1]")))
    }
}

fn is_paren_eta(eta: f64) -> bool {
    eta == 0.5
}

/// Closed-form right upper corner entries for `η ∈ {0, 1/2, 1}`:
/// hat basis for `η = 0, 1`, paren basis for `η = 1/2`.
pub fn matrix_element_closed_form(
    eta: f64,
    (k, l): (i64, i64),
    (r, s): (i64, i64),
    coeffs: &DiracCoefficients,
    space: &GnsSpace,
) -> Result<C64> {
    let tbox = space.tbox();
    for (a, b) in [(k, l), (r, s)] {
        if !tbox.contains(a, b) {
            return Err(Error::OutOfBox { k: a, l: b });
        }
    }
    if k != r {
        return Ok(ZERO);
    }
    let g = tbox.grid_size();
    let delta = space.delta(k)?;
    if eta == 0.0 || eta == 1.0 {
        let inv = delta.map(|v| C64::new(1.0 / v.re, 0.0)).spectrum();
        let coeff = inv[bin_of(s - l, g)];
        let mode = if eta == 0.0 { l } else { s };
        Ok((C64::new(-coeffs.a(k)?, mode as f64)) * coeff)
    } else if is_paren_eta(eta) {
        let hat = delta.spectrum()[bin_of(l - s, g)];
        let diag = if l == s { I * l as f64 } else { ZERO };
        Ok(-(diag + hat * coeffs.a(-k)?))
    } else {
        Err(Error::InvalidParameter(format!(
            "closed form exists only for eta in {{0, 1/2, 1}}, got {eta}"
        )))
    }
}

/// Block grids of the basis vector `(k, l)`: `e^{kl}` or, for `η = 1/2`, `ε^{kl}`.
fn basis_grids(eta: f64, k: i64, l: i64, space: &GnsSpace) -> Result<(i64, GridFunction)> {
    if is_paren_eta(eta) {
        let e = space.epsilon(k, l)?;
        Ok((e.block, e.grid.clone()))
    } else {
        if !space.tbox().contains(k, l) {
            return Err(Error::OutOfBox { k, l });
        }
        Ok((k, monomial_grid(l, space.tbox().grid_size())))
    }
}

/// `Δ^{η−1} L Δ^{−η}` applied on block grids, never projected.
fn upper_corner_grids(eta: f64, x: &BlockGrids, coeffs: &DiracCoefficients, space: &GnsSpace) -> Result<BlockGrids> {
    let tbox = space.tbox();
    let y = x.delta_power(-2.0 * eta, space)?;
    let blocks = tbox
        .block_range()
        .map(|n| match y.block(n) {
            None => Ok(None),
            Some(g) => Ok(Some(apply_l(g, coeffs.a(n)?, false))),
        })
        .collect::<Result<Vec<_>>>()?;
    BlockGrids::from_blocks(tbox, blocks).delta_power(2.0 * (eta - 1.0), space)
}

fn single_block(tbox: TruncationBox, n: i64, g: GridFunction) -> BlockGrids {
    let mut blocks = vec![None; tbox.n_blocks()];
    blocks[(n + tbox.k_bound() as i64) as usize] = Some(g);
    BlockGrids::from_blocks(tbox, blocks)
}

/// `⟨Δ^{η−1} L Δ^{−η} b^{kl}, b^{rs}⟩` by the grid pipeline, with `b = ε` for `η = 1/2`
/// and `b = e` otherwise.
pub fn matrix_element_oracle(
    eta: f64,
    (k, l): (i64, i64),
    (r, s): (i64, i64),
    coeffs: &DiracCoefficients,
    space: &GnsSpace,
) -> Result<C64> {
    check_eta(eta)?;
    let tbox = space.tbox();
    let (bk, gk) = basis_grids(eta, k, l, space)?;
    let (br, gr) = basis_grids(eta, r, s, space)?;
    let out = upper_corner_grids(eta, &single_block(tbox, bk, gk), coeffs, space)?;
    Ok(out.inner(&single_block(tbox, br, gr)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatrixElementRow {
    pub eta: f64,
    pub k: i64,
    pub l: i64,
    pub r: i64,
    pub s: i64,
    pub closed_re: f64,
    pub closed_im: f64,
    pub oracle_re: f64,
    pub oracle_im: f64,
    pub deviation: f64,
}

/// Both routes over `|k|, |l|, |r|, |s| ≤ range`.
pub fn matrix_element_sweep(
    eta: f64,
    range: usize,
    coeffs: &DiracCoefficients,
    space: &GnsSpace,
) -> Result<Vec<MatrixElementRow>> {
    check_eta(eta)?;
    let tbox = space.tbox();
    let r = range as i64;
    let sites: Vec<(i64, i64)> = (-r..=r).flat_map(|k| (-r..=r).map(move |l| (k, l))).collect();
    let basis: BTreeMap<(i64, i64), (i64, GridFunction)> = sites
        .par_iter()
        .map(|&(k, l)| Ok(((k, l), basis_grids(eta, k, l, space)?)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .collect();
    let rows = sites
        .par_iter()
        .map(|&(k, l)| {
            let (bk, gk) = basis[&(k, l)].clone();
            let out = upper_corner_grids(eta, &single_block(tbox, bk, gk), coeffs, space)?;
            let mut rows = Vec::with_capacity(sites.len());
            for &(rr, s) in &sites {
                let (br, gr) = &basis[&(rr, s)];
                let oracle = match out.block(*br) {
                    Some(g) => quadrature_inner(g, gr)?,
                    None => ZERO,
                };
                let closed = matrix_element_closed_form(eta, (k, l), (rr, s), coeffs, space)?;
                rows.push(MatrixElementRow {
                    eta,
                    k,
                    l,
                    r: rr,
                    s,
                    closed_re: closed.re,
                    closed_im: closed.im,
                    oracle_re: oracle.re,
                    oracle_im: oracle.im,
                    deviation: (closed - oracle).norm(),
                });
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolventRow {
    pub n: i64,
    pub eta: f64,
    pub sigma_min: f64,
    pub bound: f64,
    pub margin: f64,
    pub kernel_dim: usize,
}

impl ResolventRow {
    pub fn inverse_norm(&self) -> f64 {
        1.0 / self.sigma_min
    }

    pub fn satisfied(&self) -> bool {
        self.inverse_norm() <= self.bound * (1.0 + BOUND_SLACK)
    }
}

/// `‖D_n^{-1}‖ = 1 / min_{|l| ≤ M} √(l² + a_n²)`, with the `l = 0` kernel deflated at `n = 0`.
fn undeformed_inverse_norm(a: f64, m: usize) -> f64 {
    let min = (-(m as i64)..=m as i64)
        .map(|l| (l as f64).hypot(a))
        .filter(|&v| v > KERNEL_TOLERANCE)
        .fold(f64::INFINITY, f64::min);
    1.0 / min
}

/// Smallest singular value of `D_n^(η)` (kernel deflated at `n = 0`) against
/// `Γ_{|n|} ‖D_n^{-1}‖`.
pub fn resolvent_profile(
    eta: f64,
    ns: &[i64],
    coeffs: &DiracCoefficients,
    space: &GnsSpace,
) -> Result<Vec<ResolventRow>> {
    ns.par_iter()
        .map(|&n| {
            let block = deformed_block(n, eta, coeffs, space)?;
            let sv = block.singular_values();
            let (kernel_dim, sigma_min) = if n == 0 {
                let kd = sv.iter().take_while(|&&v| v < KERNEL_TOLERANCE).count();
                (kd, sv[kd])
            } else {
                (0, sv[0])
            };
            if n != 0 && sigma_min < SINGULAR_TOLERANCE {
                return Err(Error::SingularBlock { n, sigma: sigma_min });
            }
            let a = coeffs.a(n)?;
            let bound = coeffs.gamma(n.unsigned_abs() as usize)? * undeformed_inverse_norm(a, space.tbox().m_bound());
            Ok(ResolventRow {
                n,
                eta,
                sigma_min,
                bound,
                margin: bound - 1.0 / sigma_min,
                kernel_dim,
            })
        })
        .collect()
}

/// Least-squares slope of `ln(1/σ_min)` against `ln|n|` over `n ≠ 0`.
/// Negative means the inverse norms decay; `Γ_n` oscillates, so single steps may not.
pub fn resolvent_trend(rows: &[ResolventRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.n != 0)
        .map(|r| ((r.n.abs() as f64).ln(), r.inverse_norm().ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

pub fn write_resolvent_csv<W: Write>(rows: &[ResolventRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["n", "eta", "sigma_min", "bound", "margin"])?;
    for r in rows {
        out.serialize((r.n, r.eta, r.sigma_min, r.bound, r.margin))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_matrix_elements_csv<W: Write>(rows: &[MatrixElementRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

/// The one-step shift `λ` (block `n − 1 → n`) or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftGenerator {
    Lambda,
    LambdaInverse,
}

impl ShiftGenerator {
    fn step(self) -> i64 {
        match self {
            ShiftGenerator::Lambda => 1,
            ShiftGenerator::LambdaInverse => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommutatorRow {
    pub n: i64,
    pub norm: f64,
    pub bound: f64,
}

impl CommutatorRow {
    pub fn satisfied(&self) -> bool {
        self.norm <= self.bound * (1.0 + BOUND_SLACK)
    }
}

fn toeplitz(g: &GridFunction, m: usize) -> DMatrix<C64> {
    let spec = g.spectrum();
    let size = g.grid_size();
    let d = 2 * m + 1;
    DMatrix::from_fn(d, d, |i, j| spec[bin_of(i as i64 - j as i64, size)])
}

fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

/// Block `n` of `Δ^{η−1}[L, λ^{±1}]Δ^{−η}`: `(a_{n∓1} − a_n)` times the compressed
/// `M_{δ_n^{η−1}} M_{δ_{n∓1}^{−η}}`, its norm, and
/// `|a_{n∓1} − a_n| Γ_{|n|}^{1−η} Γ_{|n∓1|}^η`.
pub fn commutator_profile(
    eta: f64,
    generator: ShiftGenerator,
    ns: &[i64],
    coeffs: &DiracCoefficients,
    space: &GnsSpace,
) -> Result<Vec<CommutatorRow>> {
    check_eta(eta)?;
    let m = space.tbox().m_bound();
    ns.par_iter()
        .map(|&n| {
            let src = n - generator.step();
            let step = coeffs.a(src)? - coeffs.a(n)?;
            let left = toeplitz(&real_power(&space.delta(n)?, eta - 1.0), m);
            let right = toeplitz(&real_power(&space.delta(src)?, -eta), m);
            let norm = step.abs() * spectral_norm(&(left * right));
            let g = |j: i64| coeffs.gamma(j.unsigned_abs() as usize);
            let bound = step.abs() * g(n)?.powf(1.0 - eta) * g(src)?.powf(eta);
            Ok(CommutatorRow { n, norm, bound })
        })
        .collect()
}

fn delta_power_dense(p: f64, space: &GnsSpace) -> Result<DMatrix<C64>> {
    let tbox = space.tbox();
    let grids = tbox
        .block_range()
        .map(|n| Ok(real_power(&space.delta(n)?, p)))
        .collect::<Result<Vec<_>>>()?;
    Ok(GnsOperator::from_terms(tbox, BTreeMap::from([(0, grids)]))?.to_dense())
}

fn l_dense(coeffs: &DiracCoefficients, tbox: TruncationBox) -> Result<DMatrix<C64>> {
    let diag = (0..tbox.dim())
        .map(|i| {
            let (n, l) = tbox.site(i);
            Ok(C64::new(-coeffs.a(n)?, l as f64))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_diagonal(&diag.into()))
}

/// `i [[0, Δ^{η−1}[L, π(a)]Δ^{−η}], [Δ^{−η}[L*, π(a)]Δ^{η−1}, 0]]` on the truncated space.
pub fn deformed_commutator(
    a: &WeylElement,
    eta: f64,
    coeffs: &DiracCoefficients,
    space: &GnsSpace,
) -> Result<DMatrix<C64>> {
    check_eta(eta)?;
    let pa = represent(a, space)?.to_dense();
    let l = l_dense(coeffs, space.tbox())?;
    let ls = l.adjoint();
    let p_out = delta_power_dense(eta - 1.0, space)?;
    let p_in = delta_power_dense(-eta, space)?;
    let upper = &p_out * (&l * &pa - &pa * &l) * &p_in;
    let lower = &p_in * (&ls * &pa - &pa * &ls) * &p_out;
    let d = pa.nrows();
    let mut out = DMatrix::from_element(2 * d, 2 * d, ZERO);
    out.view_mut((0, d), (d, d)).copy_from(&(upper * I));
    out.view_mut((d, 0), (d, d)).copy_from(&(lower * I));
    Ok(out)
}

/// `max |𝒟^(η)(π(a))* − 𝒟^(η)(π(a*))|` entrywise.
pub fn star_map_defect(a: &WeylElement, eta: f64, coeffs: &DiracCoefficients, space: &GnsSpace) -> Result<f64> {
    let lhs = deformed_commutator(a, eta, coeffs, space)?.adjoint();
    let rhs = deformed_commutator(&involution(a), eta, coeffs, space)?;
    Ok(max_abs(&(lhs - rhs)))
}
