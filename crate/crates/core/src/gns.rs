//! Truncated GNS representation of the state `ω_μ`.
//!
//! The Hilbert space `ℓ²(ℤ; L²(𝕋,m))` is cut down to blocks `|k| ≤ K`, each
//! holding the trigonometric polynomials of degree `≤ M`. Vectors are stored by
//! their coefficients in the orthonormal basis `e^{kl}_n(z) = zˡ δ_{n,k}`.
//! Operators keep the crossed-product shape: for every shift `s` a family of
//! multiplier grids `m_{n,s}`, acting as `(A g)_n = Σ_s m_{n,s} g_{n−s}`.
//! Anything pushed outside `|k| ≤ K` is dropped, so operators act as `P_K A P_K`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::DiffeoSpec;
use crate::error::{Error, Result};
use crate::spectral::{bin_of, project_to_modes, quadrature_inner, FourierPoly, GridFunction, C64};
use crate::weyl::{star_product, WeylElement};

/// Default tolerance on the `ℓ²` norm of spectral mass discarded by a re-projection.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-6;
/// Target `ℓ²` norm of the dropped tail of the `h^l` coefficient series.
pub const CONJUGATOR_TAIL_TARGET: f64 = 1e-10;
const CONJUGATOR_MAX_MODES: usize = 4096;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Window `|k| ≤ K`, `|l| ≤ M` into the GNS space, with a `G`-point quadrature grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationBox {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "G")]
    g: usize,
}

impl TruncationBox {
    pub fn new(k: usize, m: usize, g: usize) -> Result<Self> {
        if k < 1 || m < 1 {
            return Err(Error::InvalidTruncation(format!("need K, M ≥ 1 (got K={k}, M={m})")));
        }
        if !g.is_multiple_of(2) || g < 8 * (m + 1) {
            return Err(Error::InvalidTruncation(format!(
                "grid size {g} must be even and at least 8(M+1) = {}",
                8 * (m + 1)
            )));
        }
        Ok(Self { k, m, g })
    }

    /// `G` defaults to the smallest power of two `≥ 8(M+1)`.
    pub fn with_default_grid(k: usize, m: usize) -> Result<Self> {
        Self::new(k, m, crate::spectral::default_grid_size(m))
    }

    pub fn k_bound(&self) -> usize {
        self.k
    }

    pub fn m_bound(&self) -> usize {
        self.m
    }

    pub fn grid_size(&self) -> usize {
        self.g
    }

    pub fn block_len(&self) -> usize {
        2 * self.m + 1
    }

    pub fn n_blocks(&self) -> usize {
        2 * self.k + 1
    }

    pub fn dim(&self) -> usize {
        self.n_blocks() * self.block_len()
    }

    pub fn contains(&self, k: i64, l: i64) -> bool {
        k.unsigned_abs() as usize <= self.k && l.unsigned_abs() as usize <= self.m
    }

    pub fn contains_block(&self, k: i64) -> bool {
        k.unsigned_abs() as usize <= self.k
    }

    pub fn index(&self, k: i64, l: i64) -> usize {
        debug_assert!(self.contains(k, l));
        (k + self.k as i64) as usize * self.block_len() + (l + self.m as i64) as usize
    }

    /// Inverse of [`TruncationBox::index`].
    pub fn site(&self, idx: usize) -> (i64, i64) {
        let bl = self.block_len();
        ((idx / bl) as i64 - self.k as i64, (idx % bl) as i64 - self.m as i64)
    }

    pub fn block_range(&self) -> std::ops::RangeInclusive<i64> {
        -(self.k as i64)..=self.k as i64
    }

    pub fn mode_range(&self) -> std::ops::RangeInclusive<i64> {
        -(self.m as i64)..=self.m as i64
    }
}

/// Coefficients over the basis `e^{kl}` of the truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct GnsVector {
    tbox: TruncationBox,
    coeffs: Vec<C64>,
}

impl GnsVector {
    pub fn zeros(tbox: TruncationBox) -> Self {
        Self {
            tbox,
            coeffs: vec![ZERO; tbox.dim()],
        }
    }

    pub fn from_coeffs(tbox: TruncationBox, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != tbox.dim() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                tbox.dim(),
                coeffs.len()
            )));
        }
        Ok(Self { tbox, coeffs })
    }

    /// Random vector supported on `|k| ≤ rk`, `|l| ≤ rl`, unit square coefficients.
    pub fn random<R: Rng>(tbox: TruncationBox, rk: usize, rl: usize, rng: &mut R) -> Self {
        let mut v = Self::zeros(tbox);
        let (rk, rl) = (rk.min(tbox.k) as i64, rl.min(tbox.m) as i64);
        for k in -rk..=rk {
            for l in -rl..=rl {
                v.set(k, l, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            }
        }
        v
    }

    pub fn tbox(&self) -> TruncationBox {
        self.tbox
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn get(&self, k: i64, l: i64) -> C64 {
        if self.tbox.contains(k, l) {
            self.coeffs[self.tbox.index(k, l)]
        } else {
            ZERO
        }
    }

    pub fn set(&mut self, k: i64, l: i64, c: C64) {
        let i = self.tbox.index(k, l);
        self.coeffs[i] = c;
    }

    pub fn block(&self, k: i64) -> FourierPoly {
        let bl = self.tbox.block_len();
        let start = (k + self.tbox.k as i64) as usize * bl;
        FourierPoly::new(self.tbox.m, self.coeffs[start..start + bl].to_vec())
            .expect("block length matches the box")
    }

    pub fn set_block(&mut self, k: i64, p: &FourierPoly) {
        for l in self.tbox.mode_range() {
            self.set(k, l, p.coeff(l));
        }
    }

    pub fn block_is_zero(&self, k: i64) -> bool {
        let bl = self.tbox.block_len();
        let start = (k + self.tbox.k as i64) as usize * bl;
        self.coeffs[start..start + bl].iter().all(|c| *c == ZERO)
    }

    /// Samples of block `k` on the box grid.
    pub fn block_grid(&self, k: i64) -> GridFunction {
        self.block(k)
            .to_grid(self.tbox.g)
            .expect("box grid resolves its own modes")
    }

    /// Projects per-block grids back to modes; returns the vector and the `ℓ²` norm of the
    /// spectral mass that fell outside `|l| ≤ M`.
    pub fn from_block_grids(tbox: TruncationBox, grids: &[Option<GridFunction>]) -> (Self, f64) {
        let mut v = Self::zeros(tbox);
        let mut tail = 0.0;
        for (i, g) in grids.iter().enumerate() {
            if let Some(g) = g {
                let k = i as i64 - tbox.k as i64;
                let p = project_to_modes(g, tbox.m).expect("box grid resolves its own modes");
                tail += g.tail_mass(tbox.m);
                v.set_block(k, &p);
            }
        }
        (v, tail.sqrt())
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self, other⟩`, linear in the first slot.
    pub fn inner(&self, other: &Self) -> C64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            tbox: self.tbox,
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(ONE, other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(-ONE, other)
    }

    /// `self + a·other`.
    pub fn axpy(&self, a: C64, other: &Self) -> Self {
        Self {
            tbox: self.tbox,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(x, y)| x + a * y)
                .collect(),
        }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.sub(other).norm()
    }

    /// Sites with nonzero coefficients.
    pub fn support(&self) -> Vec<(i64, i64)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != ZERO)
            .map(|(i, _)| self.tbox.site(i))
            .collect()
    }
}

/// Per-block samples that have not been projected onto `|l| ≤ M`.
///
/// Chaining maps at this level keeps the full grid resolution between steps;
/// only [`BlockGrids::to_vector`] truncates.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGrids {
    tbox: TruncationBox,
    blocks: Vec<Option<GridFunction>>,
}

impl BlockGrids {
    /// `blocks[n + K]` holds block `n`; `None` marks a zero block.
    pub fn from_blocks(tbox: TruncationBox, blocks: Vec<Option<GridFunction>>) -> Self {
        assert_eq!(blocks.len(), tbox.n_blocks(), "one entry per block");
        Self { tbox, blocks }
    }

    pub fn from_vector(x: &GnsVector) -> Self {
        let tbox = x.tbox();
        Self {
            tbox,
            blocks: tbox
                .block_range()
                .map(|n| (!x.block_is_zero(n)).then(|| x.block_grid(n)))
                .collect(),
        }
    }

    pub fn tbox(&self) -> TruncationBox {
        self.tbox
    }

    pub fn block(&self, n: i64) -> Option<&GridFunction> {
        if !self.tbox.contains_block(n) {
            return None;
        }
        self.blocks[(n + self.tbox.k as i64) as usize].as_ref()
    }

    /// Projection onto the box, with the `ℓ²` norm of what was dropped.
    pub fn to_vector(&self) -> (GnsVector, f64) {
        GnsVector::from_block_grids(self.tbox, &self.blocks)
    }

    /// `Σ_n ∮ x_n conj(y_n) dm` by grid quadrature.
    pub fn inner(&self, other: &Self) -> C64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .filter_map(|(a, b)| match (a, b) {
                (Some(a), Some(b)) => Some(quadrature_inner(a, b).expect("same box grid")),
                _ => None,
            })
            .sum()
    }
}

pub fn basis_vector(k: i64, l: i64, tbox: TruncationBox) -> Result<GnsVector> {
    if !tbox.contains(k, l) {
        return Err(Error::OutOfBox { k, l });
    }
    let mut v = GnsVector::zeros(tbox);
    v.set(k, l, ONE);
    Ok(v)
}

/// The cyclic vector `(ξ_ω)_n = δ_{n,0}`.
pub fn cyclic_vector(tbox: TruncationBox) -> GnsVector {
    basis_vector(0, 0, tbox).expect("origin is in every box")
}

/// Operator in crossed-product form: per shift `s`, multipliers `m_{n,s}` for `|n| ≤ K`.
#[derive(Debug, Clone, PartialEq)]
pub struct GnsOperator {
    tbox: TruncationBox,
    terms: BTreeMap<i64, Vec<GridFunction>>,
}

impl GnsOperator {
    pub fn zero(tbox: TruncationBox) -> Self {
        Self {
            tbox,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(tbox: TruncationBox) -> Self {
        Self::shift(tbox, 0)
    }

    /// `λ^s`, `(λ^s g)_n = g_{n−s}`.
    pub fn shift(tbox: TruncationBox, s: i64) -> Self {
        let one = GridFunction::constant(tbox.g, ONE).expect("valid grid");
        let mut terms = BTreeMap::new();
        terms.insert(s, vec![one; tbox.n_blocks()]);
        Self { tbox, terms }
    }

    /// Multiplier grids for one shift, indexed by `n + K`.
    pub fn from_terms(tbox: TruncationBox, terms: BTreeMap<i64, Vec<GridFunction>>) -> Result<Self> {
        for grids in terms.values() {
            if grids.len() != tbox.n_blocks() || grids.iter().any(|g| g.grid_size() != tbox.g) {
                return Err(Error::InvalidParameter("multiplier family does not fit the box".into()));
            }
        }
        Ok(Self { tbox, terms })
    }

    pub fn tbox(&self) -> TruncationBox {
        self.tbox
    }

    pub fn shifts(&self) -> impl Iterator<Item = i64> + '_ {
        self.terms.keys().copied()
    }

    pub fn multiplier(&self, n: i64, s: i64) -> Option<&GridFunction> {
        if !self.tbox.contains_block(n) {
            return None;
        }
        self.terms.get(&s).map(|v| &v[(n + self.tbox.k as i64) as usize])
    }

    pub fn terms(&self) -> &BTreeMap<i64, Vec<GridFunction>> {
        &self.terms
    }

    /// Applies the operator at grid level, without projecting the result.
    pub fn apply_grids(&self, x: &BlockGrids) -> BlockGrids {
        let tbox = self.tbox;
        let k = tbox.k as i64;
        let out: Vec<Option<GridFunction>> = tbox
            .block_range()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&n| {
                let mut acc: Option<Vec<C64>> = None;
                for (&s, grids) in &self.terms {
                    let Some(g) = x.block(n - s) else { continue };
                    let m = &grids[(n + k) as usize];
                    let acc = acc.get_or_insert_with(|| vec![ZERO; tbox.g]);
                    for ((a, mv), gv) in acc.iter_mut().zip(m.samples()).zip(g.samples()) {
                        *a += mv * gv;
                    }
                }
                acc.map(GridFunction::from_samples_unchecked)
            })
            .collect();
        BlockGrids::from_blocks(tbox, out)
    }

    /// Applies the operator; returns the image and the `ℓ²` tail lost to mode truncation.
    pub fn apply_with_tail(&self, x: &GnsVector) -> (GnsVector, f64) {
        self.apply_grids(&BlockGrids::from_vector(x)).to_vector()
    }

    pub fn apply(&self, x: &GnsVector) -> GnsVector {
        self.apply_with_tail(x).0
    }

    /// Like [`GnsOperator::apply`] but fails when the dropped tail exceeds `tol`.
    pub fn apply_checked(&self, x: &GnsVector, tol: f64) -> Result<GnsVector> {
        let (v, tail) = self.apply_with_tail(x);
        if tail > tol {
            return Err(Error::Aliasing {
                tail,
                tol,
                context: "operator application",
            });
        }
        Ok(v)
    }

    /// Product `self ∘ other` at the multiplier level (`P_K A P_K B P_K`).
    pub fn compose(&self, other: &Self) -> Self {
        let tbox = self.tbox;
        let k = tbox.k as i64;
        let mut terms: BTreeMap<i64, Vec<Option<Vec<C64>>>> = BTreeMap::new();
        for (&s, ma) in &self.terms {
            for (&t, mb) in &other.terms {
                let entry = terms
                    .entry(s + t)
                    .or_insert_with(|| vec![None; tbox.n_blocks()]);
                for n in tbox.block_range() {
                    let mid = n - s;
                    if mid.abs() > k {
                        continue;
                    }
                    let a = &ma[(n + k) as usize];
                    let b = &mb[(mid + k) as usize];
                    let slot = entry[(n + k) as usize].get_or_insert_with(|| vec![ZERO; tbox.g]);
                    for ((acc, x), y) in slot.iter_mut().zip(a.samples()).zip(b.samples()) {
                        *acc += x * y;
                    }
                }
            }
        }
        Self {
            tbox,
            terms: terms
                .into_iter()
                .map(|(s, v)| {
                    (
                        s,
                        v.into_iter()
                            .map(|g| GridFunction::from_samples_unchecked(g.unwrap_or_else(|| vec![ZERO; tbox.g])))
                            .collect(),
                    )
                })
                .collect(),
        }
    }

    /// Adjoint: `m*_{n,−s} = conj(m_{n+s,s})`, zero where `|n+s| > K`.
    pub fn adjoint(&self) -> Self {
        let tbox = self.tbox;
        let k = tbox.k as i64;
        let zero = GridFunction::constant(tbox.g, ZERO).expect("valid grid");
        let terms = self
            .terms
            .iter()
            .map(|(&s, grids)| {
                let fam = tbox
                    .block_range()
                    .map(|n| {
                        let src = n + s;
                        if src.abs() > k {
                            zero.clone()
                        } else {
                            grids[(src + k) as usize].conj()
                        }
                    })
                    .collect();
                (-s, fam)
            })
            .collect();
        Self { tbox, terms }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            tbox: self.tbox,
            terms: self
                .terms
                .iter()
                .map(|(s, v)| (*s, v.iter().map(|g| g.scale(c)).collect()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&s, grids) in &other.terms {
            match out.terms.get_mut(&s) {
                Some(mine) => {
                    for (a, b) in mine.iter_mut().zip(grids) {
                        *a = a.combine(ONE, b, ONE).expect("same grid");
                    }
                }
                None => {
                    out.terms.insert(s, grids.clone());
                }
            }
        }
        out
    }

    /// Dense matrix in the `e^{kl}` basis; block `(n, n−s)` is the Toeplitz matrix of `m̂_{n,s}`.
    pub fn to_dense(&self) -> DMatrix<C64> {
        let tbox = self.tbox;
        let k = tbox.k as i64;
        let mut mat = DMatrix::from_element(tbox.dim(), tbox.dim(), ZERO);
        for (&s, grids) in &self.terms {
            for n in tbox.block_range() {
                let src = n - s;
                if src.abs() > k {
                    continue;
                }
                let spec = grids[(n + k) as usize].spectrum();
                for l in tbox.mode_range() {
                    for lp in tbox.mode_range() {
                        let c = spec[bin_of(l - lp, tbox.g)];
                        mat[(tbox.index(n, l), tbox.index(src, lp))] += c;
                    }
                }
            }
        }
        mat
    }

    /// Largest sup-norm difference between multiplier grids of two operators.
    pub fn max_multiplier_deviation(&self, other: &Self) -> f64 {
        let mut shifts: Vec<i64> = self.terms.keys().chain(other.terms.keys()).copied().collect();
        shifts.sort_unstable();
        shifts.dedup();
        let mut worst = 0.0f64;
        for s in shifts {
            for n in self.tbox.block_range() {
                let a = self.multiplier(n, s);
                let b = other.multiplier(n, s);
                let d = match (a, b) {
                    (Some(a), Some(b)) => a.combine(ONE, b, -ONE).expect("same grid").sup_norm(),
                    (Some(a), None) | (None, Some(a)) => a.sup_norm(),
                    (None, None) => 0.0,
                };
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// A diffeomorphism together with a truncation box and the grids every
/// representation-level computation reuses.
#[derive(Debug)]
pub struct GnsSpace {
    diffeo: DiffeoSpec,
    tbox: TruncationBox,
    /// `H⁻¹(j/G)`.
    preimages: Vec<f64>,
    /// `δ_n` for `|n| ≤ K + 1`.
    deltas: Vec<GridFunction>,
    tail_tolerance: f64,
    pub(crate) epsilon_cache: OnceLock<Vec<crate::modular::EpsilonVector>>,
}

impl GnsSpace {
    pub fn new(diffeo: DiffeoSpec, tbox: TruncationBox) -> Result<Self> {
        let preimages = diffeo.inverse_on_grid(tbox.g)?;
        let reach = tbox.k as i64 + 1;
        let deltas = (-reach..=reach)
            .map(|n| diffeo.radon_nikodym_from_preimages(n, &preimages))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            diffeo,
            tbox,
            preimages,
            deltas,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
            epsilon_cache: OnceLock::new(),
        })
    }

    pub fn with_tail_tolerance(mut self, tol: f64) -> Self {
        self.tail_tolerance = tol;
        self
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    pub fn diffeo(&self) -> &DiffeoSpec {
        &self.diffeo
    }

    pub fn tbox(&self) -> TruncationBox {
        self.tbox
    }

    pub fn alpha(&self) -> f64 {
        self.diffeo.alpha()
    }

    pub fn preimages(&self) -> &[f64] {
        &self.preimages
    }

    /// `δ_n` on the box grid.
    pub fn delta(&self, n: i64) -> Result<GridFunction> {
        let reach = self.tbox.k as i64 + 1;
        if n.abs() <= reach {
            Ok(self.deltas[(n + reach) as usize].clone())
        } else {
            self.diffeo.radon_nikodym_from_preimages(n, &self.preimages)
        }
    }

    /// Angles `2π F_n(x_j)` of the grid points pushed forward by `fⁿ`.
    pub fn forward_angles(&self, n: i64) -> Vec<f64> {
        let shift = 2.0 * self.diffeo.alpha() * n as f64;
        let lift = self.diffeo.conjugator();
        self.preimages
            .iter()
            .map(|&u| 2.0 * PI * lift.eval(u + shift))
            .collect()
    }
}

/// `(π_ω(W(f)) g)_n = Σ_l f̌⁽ˡ⁾(e^{2πiα(2n−l)} h⁻¹(z)) g_{n−l}`.
pub fn represent(f: &WeylElement, space: &GnsSpace) -> Result<GnsOperator> {
    if f.alpha() != space.alpha() {
        return Err(Error::AlphaMismatch(f.alpha(), space.alpha()));
    }
    let tbox = space.tbox;
    let mut terms = BTreeMap::new();
    for l in f.shifts() {
        if l.unsigned_abs() as usize > 2 * tbox.k {
            log::warn!("shift {l} exceeds 2K = {}: this term never acts inside the box", 2 * tbox.k);
        }
        let row = f.row(l);
        let grids: Vec<GridFunction> = tbox
            .block_range()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&n| row_multiplier(&row, n, l, space))
            .collect();
        terms.insert(l, grids);
    }
    Ok(GnsOperator { tbox, terms })
}

/// The single multiplier `m_{n,s}` of `π_ω(W(f))`.
pub fn multiplier_grid(f: &WeylElement, n: i64, s: i64, space: &GnsSpace) -> Result<GridFunction> {
    if f.alpha() != space.alpha() {
        return Err(Error::AlphaMismatch(f.alpha(), space.alpha()));
    }
    Ok(row_multiplier(&f.row(s), n, s, space))
}

fn row_multiplier(row: &[(i64, C64)], n: i64, s: i64, space: &GnsSpace) -> GridFunction {
    let rot = space.alpha() * (2 * n - s) as f64;
    let samples = space
        .preimages
        .iter()
        .map(|&u| {
            let phase = 2.0 * PI * (u + rot);
            row.iter()
                .map(|&(m, c)| c * C64::from_polar(1.0, m as f64 * phase))
                .sum()
        })
        .collect();
    GridFunction::from_samples_unchecked(samples)
}

/// Fourier coefficients of `hˡ` with the smallest mode bound (starting from `start`, doubling)
/// whose dropped tail has `ℓ²` norm below [`CONJUGATOR_TAIL_TARGET`].
pub fn conjugator_power_coeffs(d: &DiffeoSpec, l: i64, start: usize) -> Result<FourierPoly> {
    let lift = d.conjugator();
    let mut mh = start.max(2 * l.unsigned_abs() as usize + 8);
    loop {
        let g = crate::spectral::default_grid_size(mh);
        let grid = GridFunction::from_fn(g, |t| {
            let x = t / (2.0 * PI);
            C64::from_polar(1.0, 2.0 * PI * l as f64 * lift.eval(x))
        })?;
        let tail = grid.tail_mass(mh).sqrt();
        if tail < CONJUGATOR_TAIL_TARGET {
            return project_to_modes(&grid, mh);
        }
        if mh >= CONJUGATOR_MAX_MODES {
            return Err(Error::Aliasing {
                tail,
                tol: CONJUGATOR_TAIL_TARGET,
                context: "conjugator power coefficients",
            });
        }
        mh *= 2;
    }
}

/// Weyl symbol of `W(f_k) W(g_l)` with `f_k = δ_{(0,k)}` and `g_l(m,n) = (hˡ)^(m) δ_{n,0}`.
pub fn u_kl_symbol(k: i64, l: i64, space: &GnsSpace) -> Result<WeylElement> {
    let alpha = space.alpha();
    let coeffs = conjugator_power_coeffs(&space.diffeo, l, 3 * space.tbox.m)?;
    let mh = coeffs.mode_bound() as i64;
    let g = WeylElement::from_terms(
        alpha,
        (-mh..=mh)
            .map(|m| ((m, 0), coeffs.coeff(m)))
            .filter(|(_, c)| *c != ZERO),
    );
    star_product(&WeylElement::generator(alpha, (0, k)), &g)
}

/// `u_kl = π_ω(W(f_k) W(g_l))`, the operator with `u_kl ξ_ω = e^{kl}`.
pub fn build_u_kl(k: i64, l: i64, space: &GnsSpace) -> Result<GnsOperator> {
    if !space.tbox.contains_block(k) {
        return Err(Error::OutOfBox { k, l });
    }
    represent(&u_kl_symbol(k, l, space)?, space)
}

/// Moments `μ̌(m) = ∮ (h⁻¹(z))ᵐ dm(z)` for `|m| ≤ bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateData {
    bound: usize,
    mu_check: Vec<C64>,
}

impl StateData {
    pub fn new(mu_check: Vec<C64>) -> Result<Self> {
        if mu_check.len() % 2 != 1 {
            return Err(Error::InvalidParameter("moment table must have odd length".into()));
        }
        let bound = mu_check.len() / 2;
        let data = Self { bound, mu_check };
        if (data.get(0) - ONE).norm() > 1e-12 {
            return Err(Error::InvalidParameter("μ̌(0) must be 1".into()));
        }
        for m in 1..=bound as i64 {
            if (data.get(-m) - data.get(m).conj()).norm() > 1e-12 {
                return Err(Error::InvalidParameter(format!("μ̌(−{m}) ≠ conj μ̌({m})")));
            }
        }
        Ok(data)
    }

    /// Quadrature on a grid oversampled four times relative to `grid_size`.
    pub fn compute(d: &DiffeoSpec, bound: usize, grid_size: usize) -> Result<Self> {
        let g = 4 * grid_size.max(2 * bound + 2);
        let pre = d.inverse_on_grid(g)?;
        let b = bound as i64;
        let mu = (-b..=b)
            .map(|m| {
                pre.iter()
                    .map(|&u| C64::from_polar(1.0, 2.0 * PI * m as f64 * u))
                    .sum::<C64>()
                    / g as f64
            })
            .collect();
        Self::new(mu)
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn get(&self, m: i64) -> C64 {
        if m.unsigned_abs() as usize > self.bound {
            ZERO
        } else {
            self.mu_check[(m + self.bound as i64) as usize]
        }
    }
}

/// Both evaluations of `ω(W(f))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateEvaluation {
    /// `Σ_m μ̌(m) f(m,0)`.
    pub series: C64,
    /// `⟨π_ω(W(f)) ξ_ω, ξ_ω⟩`.
    pub gns: C64,
}

impl StateEvaluation {
    pub fn deviation(&self) -> f64 {
        (self.series - self.gns).norm()
    }
}

pub fn state_eval(f: &WeylElement, space: &GnsSpace) -> Result<StateEvaluation> {
    let row = f.row(0);
    let bound = row.iter().map(|(m, _)| m.unsigned_abs() as usize).max().unwrap_or(0);
    let mu = StateData::compute(&space.diffeo, bound, space.tbox.g)?;
    let series = row.iter().map(|&(m, c)| mu.get(m) * c).sum();
    let xi = cyclic_vector(space.tbox);
    let gns = represent(f, space)?.apply(&xi).inner(&xi);
    let ev = StateEvaluation { series, gns };
    if ev.deviation() > 1e-6 {
        return Err(Error::RouteDisagreement {
            deviation: ev.deviation(),
            context: "state evaluation",
        });
    }
    Ok(ev)
}

#[derive(Serialize, Deserialize)]
struct VectorEntry {
    k: i64,
    l: i64,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct VectorJson {
    #[serde(rename = "box")]
    tbox: TruncationBox,
    coeffs: Vec<VectorEntry>,
}

impl Serialize for GnsVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        VectorJson {
            tbox: self.tbox,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != ZERO)
                .map(|(i, c)| {
                    let (k, l) = self.tbox.site(i);
                    VectorEntry { k, l, re: c.re, im: c.im }
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GnsVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = VectorJson::deserialize(d)?;
        let tbox = TruncationBox::new(raw.tbox.k, raw.tbox.m, raw.tbox.g)
            .map_err(serde::de::Error::custom)?;
        let mut v = GnsVector::zeros(tbox);
        for e in raw.coeffs {
            if !tbox.contains(e.k, e.l) {
                return Err(serde::de::Error::custom(format!("({}, {}) outside box", e.k, e.l)));
            }
            v.set(e.k, e.l, C64::new(e.re, e.im));
        }
        Ok(v)
    }
}
