//! The two Fourier transforms on the truncated GNS space.
//!
//! `x̂(k,l) = ⟨ξ, e^{kl}⟩ = ω(u_kl* a)` comes from the left embedding of the algebra
//! into its predual, `x⌢(k,l) = ⟨ξ, ε^{kl}⟩ = ω(a u_kl)` from the right one.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::DiffeoSpec;
use crate::error::{Error, Result};
use crate::gns::{
    basis_vector, cyclic_vector, represent, u_kl_symbol, BlockGrids, GnsOperator, GnsSpace,
    GnsVector, TruncationBox,
};
use crate::spectral::{bin_of, quadrature_inner, GridFunction, C64};
use crate::weyl::{involution, WeylElement};

/// Agreement required between the two routes of [`paren_functional`].
pub const PAREN_ROUTE_TOLERANCE: f64 = 1e-7;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Hat,
    Paren,
}

impl TransformKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TransformKind::Hat => "hat",
            TransformKind::Paren => "paren",
        }
    }
}

/// Table of Fourier coefficients over the box.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoeffs {
    kind: TransformKind,
    tbox: TruncationBox,
    values: Vec<C64>,
}

impl FourierCoeffs {
    pub fn zeros(kind: TransformKind, tbox: TruncationBox) -> Self {
        Self {
            kind,
            tbox,
            values: vec![ZERO; tbox.dim()],
        }
    }

    pub fn new(kind: TransformKind, tbox: TruncationBox, values: Vec<C64>) -> Result<Self> {
        if values.len() != tbox.dim() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                tbox.dim(),
                values.len()
            )));
        }
        Ok(Self { kind, tbox, values })
    }

    /// Table with the given entries and zeros elsewhere.
    pub fn from_entries(
        kind: TransformKind,
        tbox: TruncationBox,
        entries: impl IntoIterator<Item = ((i64, i64), C64)>,
    ) -> Result<Self> {
        let mut c = Self::zeros(kind, tbox);
        for ((k, l), v) in entries {
            if !tbox.contains(k, l) {
                return Err(Error::OutOfBox { k, l });
            }
            c.set(k, l, v);
        }
        Ok(c)
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn tbox(&self) -> TruncationBox {
        self.tbox
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn get(&self, k: i64, l: i64) -> C64 {
        if self.tbox.contains(k, l) {
            self.values[self.tbox.index(k, l)]
        } else {
            ZERO
        }
    }

    pub fn set(&mut self, k: i64, l: i64, v: C64) {
        let i = self.tbox.index(k, l);
        self.values[i] = v;
    }

    /// Nonzero entries in index order.
    pub fn entries(&self) -> impl Iterator<Item = ((i64, i64), C64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != ZERO)
            .map(|(i, v)| (self.tbox.site(i), *v))
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// CSV with columns `kind,k,l,re,im,abs`, one row per box site.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["kind", "k", "l", "re", "im", "abs"])?;
        for (i, v) in self.values.iter().enumerate() {
            let (k, l) = self.tbox.site(i);
            out.serialize((self.kind.as_str(), k, l, v.re, v.im, v.norm()))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `x̂(k,l) = ⟨x, e^{kl}⟩`, the coordinates of `x`.
pub fn hat_vector(x: &GnsVector) -> FourierCoeffs {
    FourierCoeffs {
        kind: TransformKind::Hat,
        tbox: x.tbox(),
        values: x.coeffs().to_vec(),
    }
}

/// `x̂(k,l) = ω(u_kl* a) = ⟨π(a)ξ_ω, e^{kl}⟩`.
pub fn hat_functional(a: &WeylElement, space: &GnsSpace) -> Result<FourierCoeffs> {
    let v = represent(a, space)?.apply(&cyclic_vector(space.tbox()));
    Ok(hat_vector(&v))
}

/// `x⌢(k,l) = ⟨x, ε^{kl}⟩`.
pub fn paren_vector(x: &GnsVector, space: &GnsSpace) -> Result<FourierCoeffs> {
    let tbox = space.tbox();
    let values = (0..tbox.dim())
        .into_par_iter()
        .map(|i| {
            let (k, l) = tbox.site(i);
            Ok(x.inner(&space.epsilon(k, l)?.vector))
        })
        .collect::<Result<Vec<_>>>()?;
    FourierCoeffs::new(TransformKind::Paren, tbox, values)
}

/// Both evaluations of `ω(a u_kl)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParenRoutes {
    /// `⟨π(a) e^{kl}, ξ_ω⟩`, read off the multiplier `m_{0,−k}`.
    pub multiplier: FourierCoeffs,
    /// `⟨Δ^{1/2} π(a) ξ_ω, ε^{kl}⟩` on the grid.
    pub modular: FourierCoeffs,
}

impl ParenRoutes {
    pub fn deviation(&self) -> f64 {
        self.multiplier.max_deviation(&self.modular)
    }
}

pub fn paren_routes(a: &WeylElement, space: &GnsSpace) -> Result<ParenRoutes> {
    let tbox = space.tbox();
    let op = represent(a, space)?;
    let g = tbox.grid_size();
    let spectra: BTreeMap<i64, Vec<C64>> = tbox
        .block_range()
        .filter_map(|k| op.multiplier(0, -k).map(|m| (k, m.spectrum())))
        .collect();
    let mut multiplier = FourierCoeffs::zeros(TransformKind::Paren, tbox);
    for (k, spec) in &spectra {
        for l in tbox.mode_range() {
            multiplier.set(*k, l, spec[bin_of(-l, g)]);
        }
    }

    let xi = BlockGrids::from_vector(&cyclic_vector(tbox));
    let v = op.apply_grids(&xi).delta_power(1.0, space)?;
    let values = (0..tbox.dim())
        .into_par_iter()
        .map(|i| {
            let (k, l) = tbox.site(i);
            let eps = space.epsilon(k, l)?;
            Ok(match v.block(eps.block) {
                Some(b) => quadrature_inner(b, &eps.grid)?,
                None => ZERO,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let modular = FourierCoeffs::new(TransformKind::Paren, tbox, values)?;
    Ok(ParenRoutes { multiplier, modular })
}

/// `x⌢(k,l) = ω(a u_kl)`, checked across the multiplier and modular routes.
pub fn paren_functional(a: &WeylElement, space: &GnsSpace) -> Result<FourierCoeffs> {
    let routes = paren_routes(a, space)?;
    let deviation = routes.deviation();
    if deviation > PAREN_ROUTE_TOLERANCE {
        return Err(Error::RouteDisagreement {
            deviation,
            context: "paren transform",
        });
    }
    Ok(routes.multiplier)
}

/// Which embedding of the algebra into its predual a functional comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Embedding {
    /// `L_a = ω(· a)`.
    Left,
    /// `R_a = ω(a ·)`.
    Right,
}

/// A normal functional `L_a` or `R_a` with `a` given by its Weyl symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalRep {
    pub embedding: Embedding,
    pub element: WeylElement,
}

impl FunctionalRep {
    pub fn left(element: WeylElement) -> Self {
        Self {
            embedding: Embedding::Left,
            element,
        }
    }

    pub fn right(element: WeylElement) -> Self {
        Self {
            embedding: Embedding::Right,
            element,
        }
    }

    /// `L_a(y) = ⟨π(a)ξ, π(y*)ξ⟩`, `R_a(y) = ⟨π(y)ξ, π(a*)ξ⟩`.
    pub fn evaluate(&self, y: &WeylElement, space: &GnsSpace) -> Result<C64> {
        let xi = cyclic_vector(space.tbox());
        let (first, second) = match self.embedding {
            Embedding::Left => (&self.element, involution(y)),
            Embedding::Right => (y, involution(&self.element)),
        };
        let u = represent(first, space)?.apply_grids(&BlockGrids::from_vector(&xi));
        let v = represent(&second, space)?.apply_grids(&BlockGrids::from_vector(&xi));
        Ok(u.inner(&v))
    }

    /// `f(u_kl*)` for the hat kind and `f(u_kl)` for the paren kind.
    pub fn coeffs(&self, kind: TransformKind, space: &GnsSpace) -> Result<FourierCoeffs> {
        match (self.embedding, kind) {
            (Embedding::Left, TransformKind::Hat) => hat_functional(&self.element, space),
            (Embedding::Right, TransformKind::Paren) => paren_functional(&self.element, space),
            // ω(u_kl a) = ⟨π(a)ξ, S e^{kl}⟩ and ω(a u_kl*) = ⟨S e^{kl}, π(a*)ξ⟩
            (Embedding::Left, TransformKind::Paren) | (Embedding::Right, TransformKind::Hat) => {
                let tbox = space.tbox();
                let xi = BlockGrids::from_vector(&cyclic_vector(tbox));
                let target = match self.embedding {
                    Embedding::Left => self.element.clone(),
                    Embedding::Right => involution(&self.element),
                };
                let v = represent(&target, space)?.apply_grids(&xi);
                let values = (0..tbox.dim())
                    .into_par_iter()
                    .map(|i| {
                        let (k, l) = tbox.site(i);
                        let se = BlockGrids::from_vector(&basis_vector(k, l, tbox)?)
                            .delta_power(1.0, space)?
                            .conjugate(space)?;
                        let ip = v.inner(&se);
                        Ok(match self.embedding {
                            Embedding::Left => ip,
                            Embedding::Right => ip.conj(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                FourierCoeffs::new(kind, tbox, values)
            }
        }
    }
}

/// Vector anti-transform: `Σ c(k,l) e^{kl}` (hat) or `Σ c(k,l) ε^{kl}` (paren).
pub fn anti_transform_vector(c: &FourierCoeffs, space: &GnsSpace) -> Result<GnsVector> {
    match c.kind {
        TransformKind::Hat => GnsVector::from_coeffs(c.tbox, c.values.clone()),
        TransformKind::Paren => {
            let mut out = GnsVector::zeros(space.tbox());
            for ((k, l), v) in c.entries() {
                out = out.axpy(v, &space.epsilon(k, l)?.vector);
            }
            Ok(out)
        }
    }
}

/// Weyl symbol of `Σ c(k,l) u_kl` (hat) or `Σ c(k,l) u_kl*` (paren).
pub fn anti_transform_symbol(c: &FourierCoeffs, space: &GnsSpace) -> Result<WeylElement> {
    let alpha = space.alpha();
    let mut sum = WeylElement::zero(alpha);
    for ((k, l), v) in c.entries() {
        let weight = match c.kind {
            TransformKind::Hat => v,
            TransformKind::Paren => v.conj(),
        };
        sum = sum.add(&u_kl_symbol(k, l, space)?.scale(weight))?;
    }
    Ok(match c.kind {
        TransformKind::Hat => sum,
        TransformKind::Paren => involution(&sum),
    })
}

/// Operator anti-transform `Σ c(k,l) u_kl` (hat) or `Σ c(k,l) u_kl*` (paren).
pub fn anti_transform_operator(c: &FourierCoeffs, space: &GnsSpace) -> Result<GnsOperator> {
    represent(&anti_transform_symbol(c, space)?, space)
}

/// `r(L) = max{|x̂(k,l)| : max(|k|,|l|) = L}` and the norm of `π(a)ξ_ω`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiemannLebesgueProfile {
    pub radii: Vec<f64>,
    pub vector_norm: f64,
}

impl RiemannLebesgueProfile {
    /// Whether `r` is non-increasing from `start` on, up to `slack`.
    pub fn decreasing_from(&self, start: usize, slack: f64) -> bool {
        self.radii[start.min(self.radii.len())..]
            .windows(2)
            .all(|w| w[1] <= w[0] + slack)
    }
}

pub fn riemann_lebesgue_profile(a: &WeylElement, space: &GnsSpace) -> Result<RiemannLebesgueProfile> {
    let v = represent(a, space)?.apply(&cyclic_vector(space.tbox()));
    Ok(radial_profile(&hat_vector(&v), v.norm()))
}

fn radial_profile(c: &FourierCoeffs, vector_norm: f64) -> RiemannLebesgueProfile {
    let tbox = c.tbox;
    let reach = tbox.k_bound().max(tbox.m_bound());
    let mut radii = vec![0.0f64; reach + 1];
    for (i, v) in c.values.iter().enumerate() {
        let (k, l) = tbox.site(i);
        let r = k.unsigned_abs().max(l.unsigned_abs()) as usize;
        radii[r] = radii[r].max(v.norm());
    }
    RiemannLebesgueProfile { radii, vector_norm }
}

/// Lower bound for the norm of the truncated operator by power iteration on `A*A`,
/// started at `ξ_ω`; the first iterate already gives `‖Aξ_ω‖`.
pub fn truncated_operator_norm(op: &GnsOperator, iterations: usize) -> f64 {
    let dense = op.to_dense();
    let adj = dense.adjoint();
    let tbox = op.tbox();
    let mut v = nalgebra::DVector::from_element(tbox.dim(), ZERO);
    v[tbox.index(0, 0)] = C64::new(1.0, 0.0);
    let mut best = 0.0f64;
    for _ in 0..iterations.max(1) {
        let av = &dense * &v;
        best = best.max(av.norm());
        let w = &adj * av;
        let n = w.norm();
        if n == 0.0 {
            break;
        }
        v = w / C64::new(n, 0.0);
    }
    best
}

/// Deviations of the hat and paren tables from the index-swapped classical
/// coefficients `f̂_x(l,k)` and `f̂_x(−l,−k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalComparison {
    pub hat: f64,
    pub paren: f64,
}

impl ClassicalComparison {
    pub fn max(&self) -> f64 {
        self.hat.max(self.paren)
    }
}

/// Compares both transforms at `α = 0` with a 2D quadrature of
/// `f_x(θ₁,θ₂) = Σ a(m,n) e^{i(mθ₁+nθ₂)}`.
pub fn classical_limit_compare(a: &WeylElement, tbox: TruncationBox) -> Result<ClassicalComparison> {
    if a.alpha() != 0.0 {
        return Err(Error::AlphaMismatch(a.alpha(), 0.0));
    }
    let space = GnsSpace::new(DiffeoSpec::classical(), tbox)?;
    let (r1, r2) = a.support_box();
    let reach = r1.max(r2).max(tbox.k_bound() as i64).max(tbox.m_bound() as i64) as usize;
    let q = crate::spectral::default_grid_size(reach);
    let table = classical_coefficients(a, q)?;
    let f_hat = |m: i64, n: i64| table[bin_of(m, q) * q + bin_of(n, q)];

    let hat = hat_functional(a, &space)?;
    let paren = paren_functional(a, &space)?;
    let mut dev = ClassicalComparison { hat: 0.0, paren: 0.0 };
    for i in 0..tbox.dim() {
        let (k, l) = tbox.site(i);
        dev.hat = dev.hat.max((hat.get(k, l) - f_hat(l, k)).norm());
        dev.paren = dev.paren.max((paren.get(k, l) - f_hat(-l, -k)).norm());
    }
    Ok(dev)
}

/// `f̂(m,n)` on a `q × q` grid, stored row-major in FFT bin order.
fn classical_coefficients(a: &WeylElement, q: usize) -> Result<Vec<C64>> {
    let terms: Vec<((i64, i64), C64)> = a.terms().collect();
    let angle = |j: usize| 2.0 * std::f64::consts::PI * j as f64 / q as f64;
    // rows: θ₁ fixed, transform in θ₂
    let rows = (0..q)
        .map(|i| {
            GridFunction::from_fn(q, |t2| {
                terms
                    .iter()
                    .map(|&((m, n), c)| c * C64::from_polar(1.0, m as f64 * angle(i) + n as f64 * t2))
                    .sum()
            })
            .map(|g| g.spectrum())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![ZERO; q * q];
    for col in 0..q {
        let column = GridFunction::new((0..q).map(|i| rows[i][col]).collect())?;
        for (row, v) in column.spectrum().into_iter().enumerate() {
            out[row * q + col] = v;
        }
    }
    Ok(out)
}
