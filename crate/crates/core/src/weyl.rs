//! Finitely supported Weyl algebra of the noncommutative torus.
//!
//! An element `W(f) = Σ f(m,n) W(m,n)` is stored by its coefficient table
//! `f: ℤ² → ℂ`. The Weyl generators carry the phase `e^{-2πiαmn}` relative to
//! `UᵐVⁿ`, and every product goes through [`star_product`], which is the only
//! place where that phase convention appears.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::DiffeoSpec;
use crate::error::{Error, Result};
use crate::spectral::{GridFunction, C64};

pub type Site = (i64, i64);

/// A pair of lattice points `a = (m,n)`, `A = (M,N)` with `σ(a,A) = mN − Mn`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymplecticPair {
    pub a: Site,
    pub b: Site,
}

impl SymplecticPair {
    pub fn new(a: Site, b: Site) -> Self {
        Self { a, b }
    }

    pub fn form(&self) -> i64 {
        symplectic(self.a, self.b)
    }
}

#[inline]
pub fn symplectic(a: Site, b: Site) -> i64 {
    a.0 * b.1 - b.0 * a.1
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeylElement {
    alpha: f64,
    coeffs: BTreeMap<Site, C64>,
}

impl WeylElement {
    pub fn zero(alpha: f64) -> Self {
        Self {
            alpha,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn identity(alpha: f64) -> Self {
        Self::generator(alpha, (0, 0))
    }

    /// The Weyl generator `W(a)`, i.e. the indicator of a single site.
    pub fn generator(alpha: f64, site: Site) -> Self {
        Self::from_terms(alpha, [(site, C64::new(1.0, 0.0))])
    }

    pub fn from_terms(alpha: f64, terms: impl IntoIterator<Item = (Site, C64)>) -> Self {
        let mut e = Self::zero(alpha);
        for (s, c) in terms {
            *e.coeffs.entry(s).or_insert(C64::new(0.0, 0.0)) += c;
        }
        e
    }

    /// Random element with coefficients uniform in the unit square on `[-r1,r1]×[-r2,r2]`.
    pub fn random<R: Rng>(alpha: f64, radius: (i64, i64), rng: &mut R) -> Self {
        let mut e = Self::zero(alpha);
        for m in -radius.0..=radius.0 {
            for n in -radius.1..=radius.1 {
                let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                e.coeffs.insert((m, n), c);
            }
        }
        e
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn get(&self, site: Site) -> C64 {
        self.coeffs.get(&site).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn set(&mut self, site: Site, c: C64) {
        self.coeffs.insert(site, c);
    }

    pub fn terms(&self) -> impl Iterator<Item = (Site, C64)> + '_ {
        self.coeffs.iter().map(|(s, c)| (*s, *c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Smallest `(S₁, S₂)` with the support inside `[-S₁,S₁]×[-S₂,S₂]`.
    pub fn support_box(&self) -> (i64, i64) {
        self.coeffs
            .keys()
            .fold((0, 0), |(a, b), &(m, n)| (a.max(m.abs()), b.max(n.abs())))
    }

    /// Distinct second indices `n` present in the support, ascending.
    pub fn shifts(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self.coeffs.keys().map(|&(_, n)| n).collect();
        v.dedup();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Terms `(m, f(m,n))` of the row `n`; `f̌⁽ⁿ⁾(w) = Σ_m f(m,n) wᵐ`.
    pub fn row(&self, n: i64) -> Vec<(i64, C64)> {
        self.coeffs
            .iter()
            .filter(|((_, nn), _)| *nn == n)
            .map(|((m, _), c)| (*m, *c))
            .collect()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            alpha: self.alpha,
            coeffs: self.coeffs.iter().map(|(s, v)| (*s, v * c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_alpha(self.alpha, other.alpha)?;
        let mut out = self.clone();
        for (s, c) in other.terms() {
            *out.coeffs.entry(s).or_insert(C64::new(0.0, 0.0)) += c;
        }
        Ok(out)
    }

    /// Largest coefficient modulus of `self − other` over the union of supports.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        let mut keys: Vec<Site> = self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        keys.iter()
            .map(|&s| (self.get(s) - other.get(s)).norm())
            .fold(0.0, f64::max)
    }

    pub fn l2_norm_sqr(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }
}

fn check_alpha(a: f64, b: f64) -> Result<()> {
    if a != b {
        return Err(Error::AlphaMismatch(a, b));
    }
    Ok(())
}

/// `(f⋆g)(a) = Σ_A f(A) g(a−A) e^{-2πiα σ(a,A)}`.
pub fn star_product(f: &WeylElement, g: &WeylElement) -> Result<WeylElement> {
    check_alpha(f.alpha, g.alpha)?;
    let mut out = WeylElement::zero(f.alpha);
    for (big_a, fa) in f.terms() {
        for (b, gb) in g.terms() {
            let a = (big_a.0 + b.0, big_a.1 + b.1);
            let phase = C64::from_polar(1.0, -2.0 * PI * f.alpha * symplectic(a, big_a) as f64);
            *out.coeffs.entry(a).or_insert(C64::new(0.0, 0.0)) += fa * gb * phase;
        }
    }
    Ok(out)
}

/// `f*(a) = conj(f(−a))`.
pub fn involution(f: &WeylElement) -> WeylElement {
    WeylElement {
        alpha: f.alpha,
        coeffs: f.coeffs.iter().map(|(&(m, n), c)| ((-m, -n), c.conj())).collect(),
    }
}

/// `τ(W(f)) = f(0,0)`.
pub fn trace(f: &WeylElement) -> C64 {
    f.get((0, 0))
}

/// `f(a) = τ(W(−a) W(f))`, computed through the star product.
pub fn abstract_fourier_coeff(f: &WeylElement, a: Site) -> C64 {
    let probe = WeylElement::generator(f.alpha, (-a.0, -a.1));
    // σ(0, ·) = 0, so the product carries no extra phase at the origin
    trace(&star_product(&probe, f).expect("same alpha"))
}

/// Largest coefficient deviation between `W(a)W(A)` and `e^{2πiασ(a,A)} W(a+A)`.
pub fn weyl_relation_check(a: Site, b: Site, alpha: f64) -> f64 {
    let lhs = star_product(&WeylElement::generator(alpha, a), &WeylElement::generator(alpha, b))
        .expect("same alpha");
    let phase = C64::from_polar(1.0, 2.0 * PI * alpha * symplectic(a, b) as f64);
    let rhs = WeylElement::from_terms(alpha, [((a.0 + b.0, a.1 + b.1), phase)]);
    lhs.max_deviation(&rhs)
}

/// Smoothness seminorm `ρ_{k,l}(W(f)) = sup_n (|n|+1)^k ‖Dˡ(f̌⁽ⁿ⁾ ∘ R_α^{-n} ∘ h⁻¹)‖_∞`,
/// evaluated on a `grid_size`-point grid. `D` is the angular derivative `d/dθ`.
pub fn smooth_seminorm(
    f: &WeylElement,
    d: &DiffeoSpec,
    k: u32,
    l: u32,
    grid_size: usize,
) -> Result<f64> {
    if l > 1 {
        return Err(Error::InvalidParameter(format!("seminorm order l must be 0 or 1, got {l}")));
    }
    let pre = d.inverse_on_grid(grid_size)?;
    let alpha = d.alpha();
    let mut best = 0.0f64;
    for n in f.shifts() {
        let row = f.row(n);
        let samples: Vec<C64> = pre
            .iter()
            .map(|&u| {
                let phase = 2.0 * PI * (u - alpha * n as f64);
                row.iter().map(|&(m, c)| c * C64::from_polar(1.0, m as f64 * phase)).sum()
            })
            .collect();
        let mut g = GridFunction::new(samples)?;
        if l == 1 {
            g = g.angular_derivative();
        }
        let weight = ((n.abs() + 1) as f64).powi(k as i32);
        best = best.max(weight * g.sup_norm());
    }
    Ok(best)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CoeffJson {
    m: i64,
    n: i64,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct WeylJson {
    alpha: f64,
    coeffs: Vec<CoeffJson>,
}

impl Serialize for WeylElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WeylJson {
            alpha: self.alpha,
            coeffs: self
                .terms()
                .map(|((m, n), c)| CoeffJson { m, n, re: c.re, im: c.im })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeylElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = WeylJson::deserialize(d)?;
        if !raw.alpha.is_finite() {
            return Err(serde::de::Error::custom("alpha must be finite"));
        }
        Ok(WeylElement::from_terms(
            raw.alpha,
            raw.coeffs.into_iter().map(|c| ((c.m, c.n), C64::new(c.re, c.im))),
        ))
    }
}
