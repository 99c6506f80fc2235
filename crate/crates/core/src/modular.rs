//! Modular operator `Δ`, modular conjugation `J` and the Tomita involution
//! `S = JΔ^{1/2}` on the truncated GNS space.
//!
//! `Δ` acts on block `n` as multiplication by `δ_n`, so every function of `Δ`
//! is a grid multiplication followed by re-projection onto `|l| ≤ M`.
//! The domain of the unbounded powers is not tracked: at finite truncation all
//! powers are bounded.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gns::{basis_vector, cyclic_vector, represent, BlockGrids, GnsSpace, GnsVector};
use crate::spectral::{FourierPoly, GridFunction, C64};
use crate::weyl::{involution, WeylElement};

/// `δ_n^{a/2}` on the box grid for `|n| ≤ K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularPowerField {
    exponent: f64,
    grids: Vec<GridFunction>,
}

impl ModularPowerField {
    pub fn new(space: &GnsSpace, exponent: f64) -> Result<Self> {
        let grids = space
            .tbox()
            .block_range()
            .map(|n| {
                let d = space.delta(n)?;
                Ok(d.map(|v| C64::new((0.5 * exponent * v.re.ln()).exp(), 0.0)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { exponent, grids })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// Grid for block `n`, where `n + K` indexes the storage.
    pub fn grids(&self) -> &[GridFunction] {
        &self.grids
    }

    /// Max sup-norm deviation of `δ^{a/2} δ^{b/2}` from `δ^{(a+b)/2}`.
    pub fn additivity_defect(&self, other: &Self, sum: &Self) -> f64 {
        self.grids
            .iter()
            .zip(&other.grids)
            .zip(&sum.grids)
            .map(|((a, b), c)| {
                a.mul(b)
                    .and_then(|ab| ab.combine(C64::new(1.0, 0.0), c, C64::new(-1.0, 0.0)))
                    .map(|d| d.sup_norm())
                    .unwrap_or(f64::INFINITY)
            })
            .fold(0.0, f64::max)
    }
}

impl BlockGrids {
    /// Multiplies block `n` by `m(n)`.
    fn multiply(&self, m: impl Fn(i64) -> Result<GridFunction> + Sync) -> Result<Self> {
        let tbox = self.tbox();
        let ns: Vec<i64> = tbox.block_range().collect();
        let blocks = ns
            .par_iter()
            .map(|&n| match self.block(n) {
                None => Ok(None),
                Some(g) => Ok(Some(g.mul(&m(n)?)?)),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BlockGrids::from_blocks(tbox, blocks))
    }

    /// Blockwise `δ_n^{a/2}`.
    pub fn delta_power(&self, a: f64, space: &GnsSpace) -> Result<Self> {
        if a == 0.0 {
            return Ok(self.clone());
        }
        self.multiply(|n| {
            Ok(space
                .delta(n)?
                .map(|v| C64::new((0.5 * a * v.re.ln()).exp(), 0.0)))
        })
    }

    /// Blockwise `f(δ_n)`.
    pub fn delta_function(&self, f: impl Fn(f64) -> f64 + Sync, space: &GnsSpace) -> Result<Self> {
        self.multiply(|n| Ok(space.delta(n)?.map(|v| C64::new(f(v.re), 0.0))))
    }

    /// `J` with `x_{−n}` read through its grid interpolant.
    pub fn conjugate(&self, space: &GnsSpace) -> Result<Self> {
        let tbox = self.tbox();
        let ns: Vec<i64> = tbox.block_range().collect();
        let blocks = ns
            .par_iter()
            .map(|&n| match self.block(-n) {
                None => Ok(None),
                Some(g) => j_block(&g.interpolant(), n, space).map(Some),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BlockGrids::from_blocks(tbox, blocks))
    }
}

/// Block `n` of `J x` given `x_{−n}` as a polynomial.
fn j_block(src: &FourierPoly, n: i64, space: &GnsSpace) -> Result<GridFunction> {
    let root = space.delta(n)?;
    let samples = space
        .forward_angles(n)
        .iter()
        .zip(root.samples())
        .map(|(&t, d)| src.eval(t).conj() * d.re.sqrt())
        .collect();
    GridFunction::new(samples)
}

fn check_tail(tail: f64, tol: f64, context: &'static str) -> Result<()> {
    if tail > tol {
        Err(Error::Aliasing { tail, tol, context })
    } else {
        Ok(())
    }
}

/// `Δ^{a/2} x` without the tail check; returns the dropped tail as well.
pub fn apply_delta_power_unchecked(a: f64, x: &GnsVector, space: &GnsSpace) -> Result<(GnsVector, f64)> {
    if a == 0.0 {
        return Ok((x.clone(), 0.0));
    }
    Ok(BlockGrids::from_vector(x).delta_power(a, space)?.to_vector())
}

/// `(Δ^{a/2} x)_n = δ_n^{a/2} x_n`.
pub fn apply_delta_power(a: f64, x: &GnsVector, space: &GnsSpace) -> Result<GnsVector> {
    let (v, tail) = apply_delta_power_unchecked(a, x, space)?;
    check_tail(tail, space.tail_tolerance(), "modular power")?;
    Ok(v)
}

/// `f(Δ) x` for a real function `f` on the positive half-line.
pub fn apply_delta_function(
    f: impl Fn(f64) -> f64 + Sync,
    x: &GnsVector,
    space: &GnsSpace,
) -> Result<(GnsVector, f64)> {
    Ok(BlockGrids::from_vector(x).delta_function(f, space)?.to_vector())
}

/// `J x` without the tail check; returns the dropped tail as well.
pub fn apply_j_unchecked(x: &GnsVector, space: &GnsSpace) -> Result<(GnsVector, f64)> {
    let tbox = space.tbox();
    let blocks: Vec<i64> = tbox.block_range().collect();
    let grids = blocks
        .par_iter()
        .map(|&n| {
            if x.block_is_zero(-n) {
                return Ok(None);
            }
            j_block(&x.block(-n), n, space).map(Some)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GnsVector::from_block_grids(tbox, &grids))
}

/// `(J x)_n(z) = δ_n(z)^{1/2} conj(x_{−n}(fⁿ(z)))`.
pub fn apply_j(x: &GnsVector, space: &GnsSpace) -> Result<GnsVector> {
    let (v, tail) = apply_j_unchecked(x, space)?;
    check_tail(tail, space.tail_tolerance(), "modular conjugation")?;
    Ok(v)
}

/// `S x = J Δ^{1/2} x`.
pub fn apply_s(x: &GnsVector, space: &GnsSpace) -> Result<GnsVector> {
    apply_j(&apply_delta_power(1.0, x, space)?, space)
}

/// `‖J Δ^{1/2} π(f) ξ − π(f*) ξ‖`. The left side stays on the grid until the
/// final projection, so only the truncation of the two results enters.
pub fn tomita_check(f: &WeylElement, space: &GnsSpace) -> Result<f64> {
    let xi = BlockGrids::from_vector(&cyclic_vector(space.tbox()));
    let lhs = represent(f, space)?
        .apply_grids(&xi)
        .delta_power(1.0, space)?
        .conjugate(space)?
        .to_vector()
        .0;
    let rhs = represent(&involution(f), space)?.apply_grids(&xi).to_vector().0;
    Ok(lhs.distance(&rhs))
}

/// Real Borel functions of `Δ` used by [`borel_identity_check`].
#[derive(Debug, Clone, PartialEq)]
pub enum BorelFunction {
    /// `t ↦ t^a`.
    Power(f64),
    /// `t ↦ p(t)/q(t)` with real coefficients in increasing degree; `q > 0` on `(0, ∞)`.
    Rational { num: Vec<f64>, den: Vec<f64> },
}

impl BorelFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            BorelFunction::Power(a) => t.powf(*a),
            BorelFunction::Rational { num, den } => {
                let horner = |c: &[f64]| c.iter().rev().fold(0.0, |acc, &v| acc * t + v);
                horner(num) / horner(den)
            }
        }
    }
}

/// Sample sites for the Borel check: `|k| ≤ K/2`, `|l| ≤ 2`.
fn borel_sample(space: &GnsSpace) -> Vec<(i64, i64)> {
    let kb = (space.tbox().k_bound() / 2) as i64;
    let lb = 2.min(space.tbox().m_bound() as i64);
    (-kb..=kb)
        .flat_map(|k| (-lb..=lb).map(move |l| (k, l)))
        .collect()
}

/// Max over sample basis vectors of `‖J f(Δ) J e − f̄(Δ⁻¹) e‖`; intermediate
/// results stay on the grid and only the two sides are projected.
pub fn borel_identity_check(f: &BorelFunction, space: &GnsSpace) -> Result<f64> {
    let mut worst = 0.0f64;
    for (k, l) in borel_sample(space) {
        let e = BlockGrids::from_vector(&basis_vector(k, l, space.tbox())?);
        let lhs = e
            .conjugate(space)?
            .delta_function(|t| f.eval(t), space)?
            .conjugate(space)?
            .to_vector()
            .0;
        let rhs = e.delta_function(|t| f.eval(1.0 / t), space)?.to_vector().0;
        worst = worst.max(lhs.distance(&rhs));
    }
    Ok(worst)
}

/// `ε^{kl} = J e^{kl}`: the single nonzero block `−k` on the grid, its projection
/// onto the box, and the `ℓ²` tail that projection dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonVector {
    pub block: i64,
    pub grid: GridFunction,
    pub vector: GnsVector,
    pub tail: f64,
}

impl GnsSpace {
    fn epsilon_table(&self) -> &[EpsilonVector] {
        self.epsilon_cache.get_or_init(|| {
            let tbox = self.tbox();
            (0..tbox.dim())
                .into_par_iter()
                .map(|i| {
                    let (k, l) = tbox.site(i);
                    let src = FourierPoly::monomial(tbox.m_bound(), l, C64::new(1.0, 0.0))
                        .expect("site comes from the box");
                    let grid = j_block(&src, -k, self).expect("δ grids are positive");
                    let mut blocks = vec![None; tbox.n_blocks()];
                    blocks[(tbox.k_bound() as i64 - k) as usize] = Some(grid.clone());
                    let (vector, tail) = GnsVector::from_block_grids(tbox, &blocks);
                    EpsilonVector {
                        block: -k,
                        grid,
                        vector,
                        tail,
                    }
                })
                .collect()
        })
    }

    /// `ε^{kl} = J e^{kl}`, computed once per space.
    pub fn epsilon(&self, k: i64, l: i64) -> Result<&EpsilonVector> {
        let tbox = self.tbox();
        if !tbox.contains(k, l) {
            return Err(Error::OutOfBox { k, l });
        }
        Ok(&self.epsilon_table()[tbox.index(k, l)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{golden_alpha, DiffeoSpec};
    use crate::gns::TruncationBox;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn benchmark_space() -> GnsSpace {
        GnsSpace::new(DiffeoSpec::benchmark(), TruncationBox::new(8, 16, 256).unwrap()).unwrap()
    }

    fn fine_space() -> GnsSpace {
        GnsSpace::new(DiffeoSpec::benchmark(), TruncationBox::new(6, 40, 512).unwrap()).unwrap()
    }

    fn rotation_space() -> GnsSpace {
        GnsSpace::new(
            DiffeoSpec::rotation(golden_alpha()).unwrap(),
            TruncationBox::new(6, 8, 128).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn power_field_is_additive() {
        let s = benchmark_space();
        let a = ModularPowerField::new(&s, 0.7).unwrap();
        let b = ModularPowerField::new(&s, -0.2).unwrap();
        let c = ModularPowerField::new(&s, 0.5).unwrap();
        assert!(a.additivity_defect(&b, &c) < 1e-10);
    }

    #[test]
    fn trivial_powers() {
        let s = rotation_space();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = GnsVector::random(s.tbox(), 3, 4, &mut rng);
        assert_eq!(apply_delta_power(0.0, &x, &s).unwrap(), x);
        assert!(apply_delta_power(1.3, &x, &s).unwrap().distance(&x) < 1e-14);
        let b = benchmark_space();
        let y = GnsVector::random(b.tbox(), 3, 3, &mut rng);
        assert_eq!(apply_delta_power(0.0, &y, &b).unwrap(), y);
    }

    #[test]
    fn power_inverse_round_trip() {
        let s = fine_space();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = GnsVector::random(s.tbox(), 2, 2, &mut rng);
        let up = apply_delta_power(1.0, &x, &s).unwrap();
        let back = apply_delta_power(-1.0, &up, &s).unwrap();
        assert!(back.distance(&x) < 1e-9);
    }

    #[test]
    fn j_fixes_cyclic_vector_and_is_antilinear() {
        let s = benchmark_space();
        let xi = cyclic_vector(s.tbox());
        assert!(apply_j(&xi, &s).unwrap().distance(&xi) < 1e-13);
        let ixi = xi.scale(C64::i());
        let j = apply_j(&ixi, &s).unwrap();
        assert!(j.distance(&xi.scale(-C64::i())) < 1e-13);
    }

    #[test]
    fn j_rotation_closed_form() {
        let s = rotation_space();
        let alpha = s.alpha();
        for (k, l) in [(1, 2), (-3, 1), (2, -5), (0, 4)] {
            let e = basis_vector(k, l, s.tbox()).unwrap();
            let je = apply_j(&e, &s).unwrap();
            // conj((e^{2πi(θ/2π + 2αn)})^{l}) on block n = −k is e^{4πiαkl} z^{−l}.
            let phase = C64::from_polar(1.0, 4.0 * std::f64::consts::PI * alpha * (k * l) as f64);
            let expected = basis_vector(-k, -l, s.tbox()).unwrap().scale(phase);
            assert!(je.distance(&expected) < 1e-12);
        }
    }

    #[test]
    fn j_is_isometric_involution() {
        let s = fine_space();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = GnsVector::random(s.tbox(), 3, 2, &mut rng);
        let jx = apply_j(&x, &s).unwrap();
        assert!((jx.norm() - x.norm()).abs() < 1e-9);
        assert!(apply_j(&jx, &s).unwrap().distance(&x) < 1e-9);
    }

    #[test]
    fn tomita_examples() {
        let s = benchmark_space();
        let a = s.alpha();
        assert_eq!(tomita_check(&WeylElement::identity(a), &s).unwrap(), 0.0);
        let f = WeylElement::from_terms(a, [((1, 0), C64::new(1.0, 0.0)), ((0, 1), C64::new(2.0, 0.0))]);
        assert!(tomita_check(&f, &s).unwrap() <= 1e-7);
        let r = rotation_space();
        let g = WeylElement::generator(r.alpha(), (1, 1));
        assert!(tomita_check(&g, &r).unwrap() <= 1e-9);
    }

    #[test]
    fn borel_examples() {
        let s = benchmark_space();
        assert!(borel_identity_check(&BorelFunction::Power(0.5), &s).unwrap() <= 1e-9);
        assert!(borel_identity_check(&BorelFunction::Power(0.0), &s).unwrap() < 1e-13);
        let rat = BorelFunction::Rational {
            num: vec![1.0, 2.0],
            den: vec![3.0, 1.0],
        };
        assert!(borel_identity_check(&rat, &s).unwrap() <= 1e-9);
        let r = rotation_space();
        assert!(borel_identity_check(&BorelFunction::Power(1.0), &r).unwrap() < 1e-13);
    }

    #[test]
    fn delta_half_is_symmetric() {
        let s = benchmark_space();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = GnsVector::random(s.tbox(), 2, 2, &mut rng);
        let y = GnsVector::random(s.tbox(), 2, 2, &mut rng);
        let lhs = apply_delta_power(1.0, &x, &s).unwrap().inner(&apply_delta_power(1.0, &y, &s).unwrap());
        let rhs = apply_delta_power(2.0, &x, &s).unwrap().inner(&y);
        assert!((lhs - rhs).norm() < 1e-9);
    }

    #[test]
    fn epsilon_family_is_orthonormal() {
        let s = rotation_space();
        let sites = [(0, 0), (1, 2), (-1, 2), (2, -1)];
        for &(k, l) in &sites {
            for &(r, t) in &sites {
                let g = s.epsilon(k, l).unwrap().vector.inner(&s.epsilon(r, t).unwrap().vector);
                let expect = if (k, l) == (r, t) { 1.0 } else { 0.0 };
                assert!((g - expect).norm() < 1e-9);
            }
        }
        assert!(s.epsilon(7, 0).is_err());
    }
}
