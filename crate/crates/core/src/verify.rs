//! The invariant suite behind `nctorus verify`.
//!
//! Each suite reduces to one observed number compared against its tolerance.
//! Structural suites (monotonicity, ratio windows) report a violation amount
//! that is zero when the property holds.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use log::info;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::dirac::{
    commutator_profile, deformed_block, matrix_element_sweep, resolvent_profile, star_map_defect,
    DiracCoefficients, ShiftGenerator,
};
use crate::dynamics::{golden_alpha, ConjugatorLift, DiffeoSpec};
use crate::error::Result;
use crate::fourier::{classical_limit_compare, hat_functional, hat_vector, paren_routes, FourierCoeffs, TransformKind};
use crate::gns::{basis_vector, build_u_kl, cyclic_vector, represent, u_kl_symbol, GnsSpace, GnsVector, TruncationBox};
use crate::modular::{borel_identity_check, tomita_check, BorelFunction};
use crate::summation::{
    abel_convergence, dirichlet_functional_hat, fejer_convergence, kernel_l1_profile, transference_integral_check,
    transferred_hat, twisted_table, SummationSource, TransferencePoint,
};
use crate::weyl::{star_product, trace, weyl_relation_check, WeylElement};
use crate::C64;

const ETAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub tolerance: f64,
    /// `None` when the suite could not run; see `detail`.
    pub observed: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn failures(&self) -> Vec<&SuiteResult> {
        self.suites.iter().filter(|s| !s.pass).collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["suite", "tolerance", "observed", "pass"])?;
        for s in &self.suites {
            let observed = s.observed.map_or_else(|| "nan".to_string(), |v| format!("{v:e}"));
            out.write_record([s.suite.as_str(), &format!("{:e}", s.tolerance), &observed, &s.pass.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Writes `report.json`, `report.csv` and `failures.json` into `dir`.
    pub fn write_files(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(self)? + "\n")?;
        self.write_csv(std::fs::File::create(dir.join("report.csv"))?)?;
        std::fs::write(
            dir.join("failures.json"),
            serde_json::to_string_pretty(&self.failures())? + "\n",
        )?;
        Ok(())
    }
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    space: &'a GnsSpace,
    rotation: &'a GnsSpace,
}

impl Ctx<'_> {
    fn radius(&self) -> (i64, i64) {
        let (a, b) = self.cfg.params.support_radius;
        (a as i64, b as i64)
    }
}

type Suite = fn(&Ctx, &mut ChaCha8Rng) -> Result<f64>;

/// Every suite, in report order.
pub const SUITE_NAMES: &[&str] = &[
    "weyl_relations",
    "star_associativity",
    "trace_traciality",
    "basis_gram",
    "u_kl_basis",
    "rn_cocycle",
    "rn_normalization",
    "tomita",
    "tomita_rotation",
    "borel_identity",
    "parseval",
    "hausdorff_young",
    "paren_routes",
    "classical_limit",
    "transference_generators",
    "transference_random",
    "fejer_ratio",
    "fejer_transference",
    "abel_decreasing",
    "dirichlet_growth",
    "dirichlet_sup",
    "dirac_telescoping",
    "dirac_matrix_elements",
    "dirac_matrix_elements_rotation",
    "dirac_self_adjoint",
    "dirac_resolvent_bound",
    "dirac_commutator_bound",
    "dirac_star_map",
];

fn suite_fn(name: &str) -> Suite {
    match name {
        "weyl_relations" => weyl_relations,
        "star_associativity" => star_associativity,
        "trace_traciality" => trace_traciality,
        "basis_gram" => basis_gram,
        "u_kl_basis" => u_kl_basis,
        "rn_cocycle" => rn_cocycle,
        "rn_normalization" => rn_normalization,
        "tomita" => tomita,
        "tomita_rotation" => tomita_rotation,
        "borel_identity" => borel_identity,
        "parseval" => parseval,
        "hausdorff_young" => hausdorff_young,
        "paren_routes" => paren_route_agreement,
        "classical_limit" => classical_limit,
        "transference_generators" => transference_generators,
        "transference_random" => transference_random,
        "fejer_ratio" => fejer_ratio,
        "fejer_transference" => fejer_transference,
        "abel_decreasing" => abel_decreasing,
        "dirichlet_growth" => dirichlet_growth,
        "dirichlet_sup" => dirichlet_sup,
        "dirac_telescoping" => dirac_telescoping,
        "dirac_matrix_elements" => dirac_matrix_elements,
        "dirac_matrix_elements_rotation" => dirac_matrix_elements_rotation,
        "dirac_self_adjoint" => dirac_self_adjoint,
        "dirac_resolvent_bound" => dirac_resolvent_bound,
        "dirac_commutator_bound" => dirac_commutator_bound,
        "dirac_star_map" => dirac_star_map,
        _ => unreachable!("suite list and dispatch are kept in sync"),
    }
}

/// The identity-conjugator space with the configured `α` and box.
pub fn rotation_space(cfg: &ExperimentConfig) -> Result<GnsSpace> {
    let d = DiffeoSpec::new(ConjugatorLift::identity(), cfg.diffeo.alpha(), cfg.diffeo.classical_mode())?;
    GnsSpace::new(d, cfg.truncation)
}

/// Runs the named suites (all of them when `only` is `None`).
pub fn run_verify(cfg: &ExperimentConfig, only: Option<&[&str]>) -> Result<VerifyReport> {
    let space = cfg.space()?;
    let rotation = rotation_space(cfg)?;
    let ctx = Ctx {
        cfg,
        space: &space,
        rotation: &rotation,
    };
    let mut suites = Vec::new();
    for (i, &name) in SUITE_NAMES.iter().enumerate() {
        if only.is_some_and(|o| !o.contains(&name)) {
            continue;
        }
        let tolerance = cfg.tolerances.get(name);
        // each suite gets its own stream so results do not depend on which suites ran
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(i as u64 + 1)));
        let result = match suite_fn(name)(&ctx, &mut rng) {
            Ok(v) => SuiteResult {
                suite: name.to_string(),
                tolerance,
                observed: Some(v),
                pass: v <= tolerance,
                detail: None,
            },
            Err(e) => SuiteResult {
                suite: name.to_string(),
                tolerance,
                observed: None,
                pass: false,
                detail: Some(e.to_string()),
            },
        };
        info!("{name}: observed {:?} tol {tolerance:e} pass {}", result.observed, result.pass);
        suites.push(result);
    }
    let passed = suites.iter().all(|s| s.pass);
    Ok(VerifyReport { passed, suites })
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn weyl_relations(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst = 0.0f64;
    for alpha in [ctx.cfg.diffeo.alpha(), 0.0, 0.25, golden_alpha()] {
        for a in -3..=3 {
            for b in -3..=3 {
                for c in -3..=3 {
                    for d in -3..=3 {
                        worst = worst.max(weyl_relation_check((a, b), (c, d), alpha));
                    }
                }
            }
        }
    }
    Ok(worst)
}

fn star_associativity(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    let alpha = ctx.cfg.diffeo.alpha();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let f = WeylElement::random(alpha, (1, 1), rng);
        let g = WeylElement::random(alpha, (1, 1), rng);
        let h = WeylElement::random(alpha, (1, 1), rng);
        let left = star_product(&star_product(&f, &g)?, &h)?;
        let right = star_product(&f, &star_product(&g, &h)?)?;
        worst = worst.max(left.max_deviation(&right));
    }
    Ok(worst)
}

fn trace_traciality(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    let alpha = ctx.cfg.diffeo.alpha();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let f = WeylElement::random(alpha, (2, 2), rng);
        let g = WeylElement::random(alpha, (2, 2), rng);
        let d = trace(&star_product(&f, &g)?) - trace(&star_product(&g, &f)?);
        worst = worst.max(d.norm());
    }
    Ok(worst)
}

/// Gram matrix of the `e^{kl}` computed by grid quadrature.
fn basis_gram(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<f64> {
    let tbox = ctx.space.tbox();
    let grids = (0..tbox.dim())
        .map(|i| {
            let (k, l) = tbox.site(i);
            Ok((k, basis_vector(k, l, tbox)?.block_grid(k)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    for (i, (ki, gi)) in grids.iter().enumerate() {
        for (j, (kj, gj)) in grids.iter().enumerate() {
            let v = if ki == kj { crate::spectral::quadrature_inner(gi, gj)? } else { C64::new(0.0, 0.0) };
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - expect).norm());
        }
    }
    Ok(worst)
}

fn u_kl_basis(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<f64> {
    let tbox = ctx.space.tbox();
    let r = 8.min(tbox.k_bound()).min(tbox.m_bound()) as i64;
    let xi = cyclic_vector(tbox);
    let mut worst = 0.0f64;
    for k in -r..=r {
        for l in -r..=r {
            let v = build_u_kl(k, l, ctx.space)?.apply(&xi);
            worst = worst.max(v.distance(&basis_vector(k, l, tbox)?));
        }
    }
    Ok(worst)
}

fn rn_cocycle(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<f64> {
    let g = ctx.space.tbox().grid_size();
    let mut worst = 0.0f64;
    for m in -4..=4 {
        for n in -4..=4 {
            worst = worst.max(ctx.cfg.diffeo.cocycle_defect(m, n, g)?);
        }
    }
    Ok(worst)
}

fn rn_normalization(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<f64> {
    let g = ctx.space.tbox().grid_size();
    let mut worst = 0.0f64;
    for n in -8..=8 {
        worst = worst.max(ctx.cfg.diffeo.normalization_defect(n, g)?);
    }
    Ok(worst)
}

fn tomita_on(space: &GnsSpace, radius: (i64, i64), rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let a = WeylElement::random(space.alpha(), radius, rng);
        worst = worst.max(tomita_check(&a, space)?);
    }
    Ok(worst)
}

fn tomita(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    tomita_on(ctx.space, ctx.radius(), rng)
}

fn tomita_rotation(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    tomita_on(ctx.rotation, ctx.radius(), rng)
}

fn borel_identity(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<f64> {
    borel_identity_check(&BorelFunction::Power(0.5), ctx.space)
}

fn parseval(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    let tbox = ctx.space.tbox();
    let (rk, rl) = ctx.cfg.params.support_radius;
    Ok(max_of((0..50).map(|_| {
        let x = GnsVector::random(tbox, rk, rl, rng);
        (hat_vector(&x).l2_norm() - x.norm()).abs()
    })))
}

fn hausdorff_young(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    let xi = cyclic_vector(ctx.space.tbox());
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let a = WeylElement::random(ctx.space.alpha(), ctx.radius(), rng);
        let v = represent(&a, ctx.space)?.apply(&xi);
        worst = worst.max(hat_vector(&v).sup_norm() - v.norm());
    }
    Ok(worst.max(0.0))
}

fn paren_route_agreement(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let a = WeylElement::random(ctx.space.alpha(), ctx.radius(), rng);
        worst = worst.max(paren_routes(&a, ctx.space)?.deviation());
    }
    Ok(worst)
}

fn classical_limit(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let a = WeylElement::random(0.0, ctx.radius(), rng);
        worst = worst.max(classical_limit_compare(&a, ctx.space.tbox())?.max());
    }
    Ok(worst)
}

fn random_point(rng: &mut ChaCha8Rng) -> TransferencePoint {
    TransferencePoint::from_angles(rng.gen_range(-PI..PI), rng.gen_range(-PI..PI))
}

fn transference_generators(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    let tbox = ctx.space.tbox();
    let mut worst = 0.0f64;
    for (k, l) in [(0, 0), (1, 0), (0, 1), (-1, 2), (2, -1)] {
        let w = random_point(rng);
        let sym = u_kl_symbol(k, l, ctx.space)?;
        let t = transferred_hat(&sym, w, ctx.space)?;
        let delta = FourierCoeffs::from_entries(TransformKind::Hat, tbox, [((k, l), C64::new(1.0, 0.0))])?;
        worst = worst.max(t.max_deviation(&twisted_table(&delta, w)));
    }
    Ok(worst)
}

fn transference_random(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let a = WeylElement::random(ctx.space.alpha(), ctx.radius(), rng);
        let w = random_point(rng);
        let t = transferred_hat(&a, w, ctx.space)?;
        worst = worst.max(t.max_deviation(&twisted_table(&hat_functional(&a, ctx.space)?, w)));
    }
    Ok(worst)
}

fn interior_vector(ctx: &Ctx, rng: &mut ChaCha8Rng) -> GnsVector {
    GnsVector::random(ctx.space.tbox(), 2, 2, rng)
}

fn fejer_ratio(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    let src = SummationSource::Vector(interior_vector(ctx, rng));
    let rep = fejer_convergence(&src, &ctx.cfg.fejer_orders(), TransformKind::Hat, ctx.space)?;
    let mut violation = if rep.strictly_decreasing() { 0.0 } else { 1.0 };
    for w in rep.l2_errors().windows(2) {
        let ratio = w[1] / w[0];
        violation = f64::max(violation, (0.3 - ratio).max(ratio - 0.7).max(0.0));
    }
    Ok(violation)
}

fn fejer_transference(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    let src = SummationSource::Vector(interior_vector(ctx, rng));
    transference_integral_check(&src, 3, 16, ctx.space)
}

fn abel_decreasing(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    let src = SummationSource::Vector(interior_vector(ctx, rng));
    let rep = abel_convergence(&src, &ctx.cfg.params.abel_radii, TransformKind::Hat, ctx.space)?;
    Ok(if rep.strictly_decreasing() { 0.0 } else { 1.0 })
}

fn dirichlet_growth(_: &Ctx, _: &mut ChaCha8Rng) -> Result<f64> {
    let p = kernel_l1_profile(&[10, 100]);
    let growth = p[1].1 - p[0].1;
    Ok((growth - 4.0 / (PI * PI) * 10f64.ln()).abs())
}

fn dirichlet_sup(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst = 0.0f64;
    for n in [10usize, 100] {
        worst = worst.max((dirichlet_functional_hat(n, ctx.space)?.sup_norm() - 1.0).abs());
    }
    Ok(worst)
}

fn dirac_telescoping(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<f64> {
    Ok(DiracCoefficients::for_space(ctx.space)?.telescoping_defect())
}

fn master_sweep(space: &GnsSpace) -> Result<f64> {
    let tbox = space.tbox();
    let range = 8.min(tbox.k_bound().min(tbox.m_bound()) / 2);
    let coeffs = DiracCoefficients::for_space(space)?;
    let mut worst = 0.0f64;
    for eta in [0.0, 0.5, 1.0] {
        let rows = matrix_element_sweep(eta, range, &coeffs, space)?;
        worst = worst.max(max_of(rows.iter().map(|r| r.deviation)));
    }
    Ok(worst)
}

fn dirac_matrix_elements(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<f64> {
    master_sweep(ctx.space)
}

fn dirac_matrix_elements_rotation(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<f64> {
    master_sweep(ctx.rotation)
}

fn dirac_ns(ctx: &Ctx) -> Vec<i64> {
    let b = 8.min(ctx.space.tbox().k_bound()) as i64;
    (-b..=b).collect()
}

fn dirac_self_adjoint(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<f64> {
    let coeffs = DiracCoefficients::for_space(ctx.space)?;
    let mut worst = 0.0f64;
    for eta in ETAS {
        for n in dirac_ns(ctx) {
            worst = worst.max(deformed_block(n, eta, &coeffs, ctx.space)?.self_adjointness_deviation());
        }
    }
    Ok(worst)
}

/// Largest `observed / bound − 1`; non-positive when every bound holds.
fn dirac_resolvent_bound(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<f64> {
    let coeffs = DiracCoefficients::for_space(ctx.space)?;
    let mut worst = f64::NEG_INFINITY;
    for eta in ETAS {
        for r in resolvent_profile(eta, &dirac_ns(ctx), &coeffs, ctx.space)? {
            worst = worst.max(r.inverse_norm() / r.bound - 1.0);
        }
    }
    Ok(worst)
}

fn dirac_commutator_bound(ctx: &Ctx, _: &mut ChaCha8Rng) -> Result<f64> {
    let coeffs = DiracCoefficients::for_space(ctx.space)?;
    let mut worst = f64::NEG_INFINITY;
    for eta in ETAS {
        for g in [ShiftGenerator::Lambda, ShiftGenerator::LambdaInverse] {
            for r in commutator_profile(eta, g, &dirac_ns(ctx), &coeffs, ctx.space)? {
                worst = worst.max(r.norm / r.bound - 1.0);
            }
        }
    }
    Ok(worst)
}

/// Dense check on a small box: the deformed commutator is a `*`-map.
fn dirac_star_map(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<f64> {
    let small = GnsSpace::new(ctx.cfg.diffeo.clone(), TruncationBox::new(3, 6, 64)?)?;
    let coeffs = DiracCoefficients::for_space(&small)?;
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let a = WeylElement::random(small.alpha(), (1, 1), rng);
        for eta in [0.0, 0.5, 1.0] {
            worst = worst.max(star_map_defect(&a, eta, &coeffs, &small)?);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(json: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(json).unwrap()
    }

    #[test]
    fn rotation_suites_pass() {
        let cfg = small_config(r#"{"diffeo": {"alpha": 0.3090169943749474}, "truncation": {"K": 8, "M": 8, "G": 128}}"#);
        let rep = run_verify(
            &cfg,
            Some(&["weyl_relations", "tomita", "tomita_rotation", "dirac_matrix_elements", "dirac_resolvent_bound"]),
        )
        .unwrap();
        assert_eq!(rep.suites.len(), 5);
        assert!(rep.passed, "{rep:#?}");
    }

    #[test]
    fn failing_suite_is_reported() {
        let cfg = small_config(r#"{"truncation": {"K": 8, "M": 8, "G": 128}, "tolerances": {"parseval": 0.0}}"#);
        let cfg = ExperimentConfig {
            tolerances: cfg.tolerances.scaled(0.0),
            ..cfg
        };
        let rep = run_verify(&cfg, Some(&["tomita"])).unwrap();
        assert!(!rep.passed);
        assert_eq!(rep.failures().len(), 1);
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("suite,tolerance,observed,pass\ntomita,"));
    }

    #[test]
    fn suite_names_have_tolerances() {
        let t = crate::config::Tolerances::default();
        for name in SUITE_NAMES {
            t.get(name);
        }
        assert_eq!(t.entries().count(), SUITE_NAMES.len());
    }
}
