//! Circle diffeomorphisms given as conjugated rotations `h ∘ R_{2α} ∘ h⁻¹`.
//!
//! Points of the circle are parametrized by `x ∈ ℝ/ℤ`, `z = e^{2πix}`. The
//! conjugator `h` is described by its lift `H(x) = x + P(x)` with `P` periodic
//! and `P(0) = 0`, so that `h(1) = 1`. Iterates use the closed form
//! `F_n(x) = H(H⁻¹(x) + 2αn)`; repeated composition only appears in tests.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{GridFunction, C64};

/// Number of points on which `H' > 0` is checked.
const POSITIVITY_CHECK_POINTS: usize = 8192;
const BISECTION_WIDTH: f64 = 1e-8;
const NEWTON_RESIDUAL: f64 = 1e-13;
const NEWTON_MAX_STEPS: usize = 60;

/// Lift `H(x) = x + Σ a_k sin(2πkx) + b_k (cos(2πkx) − 1)` of the conjugator.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugatorLift {
    sin: Vec<f64>,
    cos: Vec<f64>,
    /// Upper bound for `|P|`, used to bracket inverse solves.
    bracket: f64,
    min_derivative: f64,
    max_derivative: f64,
}

impl ConjugatorLift {
    pub fn new(sin: Vec<f64>, cos: Vec<f64>) -> Result<Self> {
        if sin.iter().chain(&cos).any(|c| !c.is_finite()) {
            return Err(Error::InvalidConjugator("non-finite coefficient".into()));
        }
        let bracket = sin.iter().map(|a| a.abs()).sum::<f64>()
            + 2.0 * cos.iter().map(|b| b.abs()).sum::<f64>();
        let mut lift = Self {
            sin,
            cos,
            bracket,
            min_derivative: 1.0,
            max_derivative: 1.0,
        };
        let (lo, hi) = (0..POSITIVITY_CHECK_POINTS)
            .map(|j| lift.derivative(j as f64 / POSITIVITY_CHECK_POINTS as f64))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| {
                (lo.min(d), hi.max(d))
            });
        if lo <= 0.0 {
            return Err(Error::InvalidConjugator(format!(
                "lift is not increasing (min H' = {lo:e})"
            )));
        }
        lift.min_derivative = lo;
        lift.max_derivative = hi;
        Ok(lift)
    }

    pub fn identity() -> Self {
        Self::new(Vec::new(), Vec::new()).expect("identity lift is valid")
    }

    /// `H(x) = x + (0.3/2π) sin 2πx`, so `H' = 1 + 0.3 cos 2πx ∈ [0.7, 1.3]`.
    pub fn benchmark() -> Self {
        Self::new(vec![0.3 / (2.0 * PI)], Vec::new()).expect("benchmark lift is valid")
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos
    }

    pub fn is_identity(&self) -> bool {
        self.bracket == 0.0
    }

    /// Extremes of `H'` sampled on the check grid.
    pub fn derivative_range(&self) -> (f64, f64) {
        (self.min_derivative, self.max_derivative)
    }

    pub fn periodic_part(&self, x: f64) -> f64 {
        let t = 2.0 * PI * x;
        let s: f64 = self
            .sin
            .iter()
            .enumerate()
            .map(|(k, a)| a * ((k + 1) as f64 * t).sin())
            .sum();
        let c: f64 = self
            .cos
            .iter()
            .enumerate()
            .map(|(k, b)| b * (((k + 1) as f64 * t).cos() - 1.0))
            .sum();
        s + c
    }

    pub fn eval(&self, x: f64) -> f64 {
        x + self.periodic_part(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let t = 2.0 * PI * x;
        let s: f64 = self
            .sin
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let kk = (k + 1) as f64;
                a * 2.0 * PI * kk * (kk * t).cos()
            })
            .sum();
        let c: f64 = self
            .cos
            .iter()
            .enumerate()
            .map(|(k, b)| {
                let kk = (k + 1) as f64;
                -b * 2.0 * PI * kk * (kk * t).sin()
            })
            .sum();
        1.0 + s + c
    }

    /// Solves `H(u) = x`: bisection on the monotone bracket, then Newton polishing.
    pub fn inverse(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::InverseSolve {
                x,
                residual: f64::NAN,
            });
        }
        if self.is_identity() {
            return Ok(x);
        }
        let shift = x.floor();
        let target = x - shift;
        let mut lo = target - self.bracket;
        let mut hi = target + self.bracket;
        while hi - lo > BISECTION_WIDTH {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut u = 0.5 * (lo + hi);
        let mut residual = self.eval(u) - target;
        for _ in 0..NEWTON_MAX_STEPS {
            if residual.abs() <= NEWTON_RESIDUAL {
                break;
            }
            u -= residual / self.derivative(u);
            residual = self.eval(u) - target;
        }
        if residual.abs() > NEWTON_RESIDUAL {
            return Err(Error::InverseSolve { x, residual });
        }
        Ok(u + shift)
    }
}

/// The diffeomorphism `f = h ∘ R_{2α} ∘ h⁻¹` together with its square root
/// `T = h ∘ R_α ∘ h⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffeoSpec {
    conjugator: ConjugatorLift,
    alpha: f64,
    classical_mode: bool,
}

impl DiffeoSpec {
    pub fn new(conjugator: ConjugatorLift, alpha: f64, classical_mode: bool) -> Result<Self> {
        let valid = alpha.is_finite()
            && alpha <= 0.5
            && if classical_mode { alpha >= 0.0 } else { alpha > 0.0 };
        if !valid {
            return Err(Error::InvalidAlpha(alpha));
        }
        let spec = Self {
            conjugator,
            alpha,
            classical_mode,
        };
        // |Fⁿ(0) − 2αn| ≤ 2 sup|P| for a lift conjugate to a rotation.
        let iterations = 1000;
        let rho = spec.rotation_number(iterations)?;
        let tol = 2.0 * spec.conjugator.bracket / iterations as f64 + 1e-9;
        if (rho - 2.0 * alpha).abs() > tol {
            return Err(Error::InvalidConjugator(format!(
                "rotation number {rho} does not match 2α = {}",
                2.0 * alpha
            )));
        }
        Ok(spec)
    }

    /// Pure rotation by `4πα`.
    pub fn rotation(alpha: f64) -> Result<Self> {
        Self::new(ConjugatorLift::identity(), alpha, false)
    }

    /// `α = 0`, identity conjugator: the commutative torus.
    pub fn classical() -> Self {
        Self::new(ConjugatorLift::identity(), 0.0, true).expect("classical spec is valid")
    }

    /// Benchmark lift with the golden-mean angle `α = (√5 − 1)/4`.
    pub fn benchmark() -> Self {
        Self::new(ConjugatorLift::benchmark(), golden_alpha(), false)
            .expect("benchmark spec is valid")
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn classical_mode(&self) -> bool {
        self.classical_mode
    }

    pub fn conjugator(&self) -> &ConjugatorLift {
        &self.conjugator
    }

    /// Lift of `fⁿ` at `x`.
    pub fn iterate_point(&self, n: i64, x: f64) -> Result<f64> {
        let u = self.conjugator.inverse(x)?;
        Ok(self.conjugator.eval(u + 2.0 * self.alpha * n as f64))
    }

    pub fn iterate_lift(&self, n: i64, xs: &[f64]) -> Result<Vec<f64>> {
        if n == 0 {
            return Ok(xs.to_vec());
        }
        xs.iter().map(|&x| self.iterate_point(n, x)).collect()
    }

    /// Lift of `Tʲ`, the `j`-th power of the square root of `f`.
    pub fn sqrt_iterate_point(&self, j: i64, x: f64) -> Result<f64> {
        let u = self.conjugator.inverse(x)?;
        Ok(self.conjugator.eval(u + self.alpha * j as f64))
    }

    /// `F_n'(x) = H'(H⁻¹(x) + 2αn) / H'(H⁻¹(x))`.
    pub fn iterate_derivative(&self, n: i64, x: f64) -> Result<f64> {
        let u = self.conjugator.inverse(x)?;
        Ok(self.derivative_at_preimage(n, u))
    }

    /// Same as [`DiffeoSpec::iterate_derivative`] with `u = H⁻¹(x)` already known.
    pub fn derivative_at_preimage(&self, n: i64, u: f64) -> f64 {
        self.conjugator.derivative(u + 2.0 * self.alpha * n as f64) / self.conjugator.derivative(u)
    }

    /// `H⁻¹(j/G)` for `j = 0..G`.
    pub fn inverse_on_grid(&self, grid_size: usize) -> Result<Vec<f64>> {
        (0..grid_size)
            .map(|j| self.conjugator.inverse(j as f64 / grid_size as f64))
            .collect()
    }

    /// Radon–Nikodym derivative `δ_n = d(m∘fⁿ)/dm` sampled on the grid.
    pub fn radon_nikodym(&self, n: i64, grid_size: usize) -> Result<GridFunction> {
        let pre = self.inverse_on_grid(grid_size)?;
        self.radon_nikodym_from_preimages(n, &pre)
    }

    pub(crate) fn radon_nikodym_from_preimages(
        &self,
        n: i64,
        preimages: &[f64],
    ) -> Result<GridFunction> {
        let vals: Vec<f64> = preimages
            .iter()
            .map(|&u| self.derivative_at_preimage(n, u))
            .collect();
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
        if !(min > 0.0) {
            return Err(Error::NonPositiveDensity(min));
        }
        GridFunction::new(vals.into_iter().map(|v| C64::new(v, 0.0)).collect())
    }

    pub fn growth_sequence(&self, n_max: usize, grid_size: usize) -> Result<GrowthSequence> {
        if n_max < 1 {
            return Err(Error::InvalidParameter("growth sequence needs N_max ≥ 1".into()));
        }
        let pre = self.inverse_on_grid(grid_size)?;
        let mut values = Vec::with_capacity(n_max + 1);
        values.push(1.0);
        for n in 1..=n_max as i64 {
            let sup = |k: i64| {
                pre.iter()
                    .map(|&u| self.derivative_at_preimage(k, u))
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            values.push(sup(n).max(sup(-n)));
        }
        Ok(GrowthSequence { values })
    }

    /// `max_j |δ_{m+n}(x_j) − δ_m(fⁿ(x_j)) δ_n(x_j)|`, with `fⁿ(x_j)` computed by iteration.
    pub fn cocycle_defect(&self, m: i64, n: i64, grid_size: usize) -> Result<f64> {
        let mut worst = 0.0f64;
        for j in 0..grid_size {
            let x = j as f64 / grid_size as f64;
            let moved = self.iterate_point(n, x)?;
            let lhs = self.iterate_derivative(m + n, x)?;
            let rhs = self.iterate_derivative(m, moved)? * self.iterate_derivative(n, x)?;
            worst = worst.max((lhs - rhs).abs());
        }
        Ok(worst)
    }

    /// `|∮ δ_n dm − 1|` by the grid rule.
    pub fn normalization_defect(&self, n: i64, grid_size: usize) -> Result<f64> {
        Ok((self.radon_nikodym(n, grid_size)?.mean().re - 1.0).abs())
    }

    /// `(F_n(0) − 0)/n` with `n = iterations`.
    pub fn rotation_number(&self, iterations: usize) -> Result<f64> {
        let n = iterations.max(1) as i64;
        Ok(self.iterate_point(n, 0.0)? / n as f64)
    }
}

pub fn golden_alpha() -> f64 {
    (5f64.sqrt() - 1.0) / 4.0
}

/// `Γ_n = max(‖Dfⁿ‖_∞, ‖Df⁻ⁿ‖_∞)` for `n = 0..=N`, with `Γ_0 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSequence {
    values: Vec<f64>,
}

impl GrowthSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.first() != Some(&1.0) {
            return Err(Error::InvalidParameter("growth sequence must start with Γ_0 = 1".into()));
        }
        if values.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(Error::InvalidParameter("growth values must be positive".into()));
        }
        Ok(Self { values })
    }

    /// `Γ ≡ 1` up to `n_max`, the rotation case.
    pub fn constant_one(n_max: usize) -> Self {
        Self {
            values: vec![1.0; n_max + 1],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        self.values.get(n).copied()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ConjugatorJson {
    #[serde(default)]
    sin: Vec<f64>,
    #[serde(default)]
    cos: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DiffeoJson {
    alpha: f64,
    #[serde(default)]
    conjugator: Option<ConjugatorJson>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    classical_mode: bool,
}

impl Serialize for DiffeoSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DiffeoJson {
            alpha: self.alpha,
            conjugator: Some(ConjugatorJson {
                sin: self.conjugator.sin.clone(),
                cos: self.conjugator.cos.clone(),
            }),
            classical_mode: self.classical_mode,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiffeoSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = DiffeoJson::deserialize(d)?;
        let conj = raw.conjugator.unwrap_or(ConjugatorJson {
            sin: Vec::new(),
            cos: Vec::new(),
        });
        let lift = ConjugatorLift::new(conj.sin, conj.cos).map_err(serde::de::Error::custom)?;
        DiffeoSpec::new(lift, raw.alpha, raw.classical_mode).map_err(serde::de::Error::custom)
    }
}
