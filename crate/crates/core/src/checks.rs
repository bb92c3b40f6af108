//! End-to-end self checks: the randomized property battery behind the
//! `selftest` command and the acceptance suite.
//!
//! Every check is total: it never panics, draws its own deterministic
//! RNG stream from the profile seed plus a per-check salt, and reports
//! a pass flag with a human-readable detail line (max deviations, draw
//! counts, or the first counterexample).

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::boundary::{build_s, numeric_roots, quartic_from_samples, CoefficientVector};
use crate::catalog::{closed_form_roots, vieta_check};
use crate::modes::{quantizing_half_width, SlabMode};
use crate::params::{PhaseConfig, PhysicalParams, VariantId};
use crate::spectrum::{allowed_k, Parameterization, QuantizationProblem};
use crate::transverse::{eval_f, eval_g, TransverseMode};

/// Sizes and seed for the randomized battery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckProfile {
    /// Draws per variant for the catalog, modulus, and determinant
    /// checks.
    pub catalog_draws: usize,
    /// Draws for each rank and null-space claim.
    pub rank_draws: usize,
    /// Certified modes for the wall-current check.
    pub mode_draws: usize,
    /// Draws per variant for the root-product and specialization check.
    pub vieta_draws: usize,
    pub seed: u64,
}

impl CheckProfile {
    /// The acceptance-grade profile.
    pub fn full(seed: u64) -> Self {
        CheckProfile {
            catalog_draws: 1000,
            rank_draws: 100,
            mode_draws: 100,
            vieta_draws: 100,
            seed,
        }
    }

    /// A fast profile for smoke testing.
    pub fn quick(seed: u64) -> Self {
        CheckProfile {
            catalog_draws: 60,
            rank_draws: 20,
            mode_draws: 12,
            vieta_draws: 20,
            seed,
        }
    }
}

/// Result of one named check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn pass(name: &'static str, detail: String) -> Self {
        CheckOutcome {
            name,
            passed: true,
            detail,
        }
    }

    fn fail(name: &'static str, detail: String) -> Self {
        CheckOutcome {
            name,
            passed: false,
            detail,
        }
    }
}

fn rng_for(profile: &CheckProfile, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(profile.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt)
}

/// Random kinematics comfortably inside the hyperbolic regime.
pub(crate) fn draw_params(rng: &mut ChaCha8Rng) -> PhysicalParams {
    let mass: f64 = rng.gen_range(0.5..2.0);
    let energy = mass * (1.0 + rng.gen_range(0.04..2.0));
    let p = (energy * energy - mass * mass).sqrt();
    let k = p * rng.gen_range(0.05..0.95);
    PhysicalParams::new(mass, energy, 0.0, 1.0, 1.0, k).expect("draw ranges keep params valid")
}

pub(crate) fn draw_phases(rng: &mut ChaCha8Rng, variant: VariantId) -> PhaseConfig {
    let gens: Vec<f64> = (0..variant.generator_count())
        .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
        .collect();
    PhaseConfig::from_generators(variant, &gens).expect("generator count matches variant")
}

pub(crate) fn per_variant_tol(variant: VariantId) -> f64 {
    match variant {
        VariantId::ThreePhase(5) | VariantId::ThreePhase(6) => 1e-7,
        _ => 1e-8,
    }
}

/// Greedy nearest-pair matching; returns the largest matched distance
/// or None when the sets have different sizes.
pub(crate) fn multiset_distance(wanted: &[Complex64], got: &[Complex64]) -> Option<f64> {
    if wanted.len() != got.len() {
        return None;
    }
    let mut remaining = got.to_vec();
    let mut worst: f64 = 0.0;
    for w in wanted {
        let (idx, dist) = remaining
            .iter()
            .enumerate()
            .map(|(i, r)| (i, (r - w).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite distances"))?;
        worst = worst.max(dist);
        remaining.swap_remove(idx);
    }
    Some(worst)
}

/// Criterion 1: closed forms against the sampled-quartic oracle.
pub fn check_catalog_oracle(profile: &CheckProfile) -> CheckOutcome {
    const NAME: &str = "catalog oracle agreement";
    let mut rng = rng_for(profile, 1);
    let mut worst: f64 = 0.0;
    let mut total = 0usize;
    for variant in VariantId::all() {
        let tol = per_variant_tol(variant);
        for _ in 0..profile.catalog_draws {
            let params = draw_params(&mut rng);
            let phases = draw_phases(&mut rng, variant);
            total += 1;
            let set = match closed_form_roots(variant, &params, &phases) {
                Ok(s) => s,
                Err(e) => return CheckOutcome::fail(NAME, format!("{variant}: {e}")),
            };
            let quartic = match quartic_from_samples(&params, &phases) {
                Ok(q) => q,
                Err(e) => return CheckOutcome::fail(NAME, format!("{variant}: {e}")),
            };
            let numeric = match numeric_roots(&quartic) {
                Ok(r) => r,
                Err(e) => return CheckOutcome::fail(NAME, format!("{variant}: {e}")),
            };
            let dist = match multiset_distance(&set.expanded_k_roots(), &numeric) {
                Some(d) => d,
                None => {
                    return CheckOutcome::fail(
                        NAME,
                        format!("{variant}: oracle returned {} roots", numeric.len()),
                    )
                }
            };
            if dist >= tol {
                return CheckOutcome::fail(
                    NAME,
                    format!("{variant}: root deviation {dist:e} at tol {tol:e}"),
                );
            }
            worst = worst.max(dist / tol);
        }
    }
    CheckOutcome::pass(
        NAME,
        format!("{total} draws across 19 variants, worst deviation {worst:.3e} of tolerance"),
    )
}

/// Criterion 2: every catalog root has unit modulus.
pub fn check_unit_modulus(profile: &CheckProfile) -> CheckOutcome {
    const NAME: &str = "root unit modulus";
    let mut rng = rng_for(profile, 1);
    let mut worst: f64 = 0.0;
    let mut total = 0usize;
    for variant in VariantId::all() {
        for _ in 0..profile.catalog_draws {
            let params = draw_params(&mut rng);
            let phases = draw_phases(&mut rng, variant);
            total += 1;
            let set = match closed_form_roots(variant, &params, &phases) {
                Ok(s) => s,
                Err(e) => return CheckOutcome::fail(NAME, format!("{variant}: {e}")),
            };
            for root in set.expanded_k_roots() {
                let dev = (root.norm() - 1.0).abs();
                if dev >= 1e-10 {
                    return CheckOutcome::fail(
                        NAME,
                        format!("{variant}: | |K| - 1 | = {dev:e}"),
                    );
                }
                worst = worst.max(dev);
            }
        }
    }
    CheckOutcome::pass(
        NAME,
        format!("{total} draws, max | |K| - 1 | = {worst:.3e}"),
    )
}

/// Criterion 3: the determinant vanishes at every catalog root.
pub fn check_determinant_vanishing(profile: &CheckProfile) -> CheckOutcome {
    const NAME: &str = "determinant vanishing";
    let mut rng = rng_for(profile, 1);
    let mut worst: f64 = 0.0;
    let mut total = 0usize;
    for variant in VariantId::all() {
        for _ in 0..profile.catalog_draws {
            let params = draw_params(&mut rng);
            let phases = draw_phases(&mut rng, variant);
            total += 1;
            let set = match closed_form_roots(variant, &params, &phases) {
                Ok(s) => s,
                Err(e) => return CheckOutcome::fail(NAME, format!("{variant}: {e}")),
            };
            for root in set.expanded_k_roots() {
                let matrix = build_s(&params, &phases, root);
                let det = matrix.det().norm();
                let scale = matrix.hadamard_scale();
                if det >= 1e-8 * scale {
                    return CheckOutcome::fail(
                        NAME,
                        format!("{variant}: |det| = {det:e} vs scale {scale:e}"),
                    );
                }
                worst = worst.max(det / scale);
            }
        }
    }
    CheckOutcome::pass(
        NAME,
        format!("{total} draws, max |det| / scale = {worst:.3e}"),
    )
}

/// Criterion 4: equal phases on both walls quantize at k = pi n.
pub fn check_exact_quantization(_profile: &CheckProfile) -> CheckOutcome {
    const NAME: &str = "exact quantization";
    let variant = VariantId::OnePhase(1);
    let phases = match PhaseConfig::from_generators(variant, &[0.6]) {
        Ok(p) => p,
        Err(e) => return CheckOutcome::fail(NAME, e.to_string()),
    };
    let hi = 10.0 * std::f64::consts::PI + 0.4;
    let problem = match QuantizationProblem::new(
        variant,
        phases,
        1.0,
        1.0,
        Parameterization::LandauLevel(0),
        1.0,
        (0.0, hi),
        0,
    ) {
        Ok(p) => p,
        Err(e) => return CheckOutcome::fail(NAME, e.to_string()),
    };
    let table = match allowed_k(&problem, 512) {
        Ok(t) => t,
        Err(e) => return CheckOutcome::fail(NAME, e.to_string()),
    };
    if table.rows.len() != 10 {
        return CheckOutcome::fail(
            NAME,
            format!("expected 10 momenta below {hi}, found {}", table.rows.len()),
        );
    }
    let mut worst: f64 = 0.0;
    for (i, row) in table.rows.iter().enumerate() {
        let want = std::f64::consts::PI * (i as f64 + 1.0);
        let dev = (row.k - want).abs();
        if dev >= 1e-10 {
            return CheckOutcome::fail(
                NAME,
                format!("row {i}: k = {} vs pi * {} (dev {dev:e})", row.k, i + 1),
            );
        }
        worst = worst.max(dev);
    }
    CheckOutcome::pass(NAME, format!("k = pi n for n = 1..10, max |k - pi n| = {worst:.3e}"))
}

/// Criterion 5: rank 2 for the equal-phase pattern and rank 3 for the
/// mixed-sign pattern at its fixed root.
pub fn check_rank_structure(profile: &CheckProfile) -> CheckOutcome {
    const NAME: &str = "rank structure";
    let mut rng = rng_for(profile, 5);
    let one = Complex64::new(1.0, 0.0);
    for i in 0..profile.rank_draws {
        let params = draw_params(&mut rng);
        let gen: f64 = rng.gen_range(0.0..std::f64::consts::TAU);

        let equal = match PhaseConfig::from_generators(VariantId::OnePhase(1), &[gen]) {
            Ok(p) => p,
            Err(e) => return CheckOutcome::fail(NAME, e.to_string()),
        };
        let rank2 = build_s(&params, &equal, one).rank();
        if rank2 != 2 {
            return CheckOutcome::fail(
                NAME,
                format!("draw {i}: equal-phase rank {rank2}, expected 2"),
            );
        }

        let mixed = match PhaseConfig::from_generators(
            VariantId::OnePhase(2),
            &[std::f64::consts::FRAC_PI_3],
        ) {
            Ok(p) => p,
            Err(e) => return CheckOutcome::fail(NAME, e.to_string()),
        };
        let rank3 = build_s(&params, &mixed, one).rank();
        if rank3 != 3 {
            return CheckOutcome::fail(
                NAME,
                format!("draw {i}: mixed-sign rank {rank3}, expected 3"),
            );
        }
    }
    CheckOutcome::pass(
        NAME,
        format!("ranks 2 and 3 confirmed over {} draws", profile.rank_draws),
    )
}

/// Modified Gram-Schmidt over 4-component complex vectors.
fn orthonormalize(vectors: &[[Complex64; 4]]) -> Vec<[Complex64; 4]> {
    let mut basis: Vec<[Complex64; 4]> = Vec::new();
    for v in vectors {
        let mut w = *v;
        for u in &basis {
            let proj: Complex64 = u.iter().zip(w.iter()).map(|(a, b)| a.conj() * b).sum();
            for i in 0..4 {
                w[i] -= proj * u[i];
            }
        }
        let norm = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for c in &mut w {
                *c /= norm;
            }
            basis.push(w);
        }
    }
    basis
}

/// Largest principal-angle sine between equal-dimension spans.
fn max_principal_sine(u_span: &[[Complex64; 4]], w_span: &[[Complex64; 4]]) -> f64 {
    let u = orthonormalize(u_span);
    let w = orthonormalize(w_span);
    // residual of projecting each w vector onto span(u)
    let mut residuals: Vec<[Complex64; 4]> = Vec::new();
    for wv in &w {
        let mut r = *wv;
        for uv in &u {
            let proj: Complex64 = uv.iter().zip(wv.iter()).map(|(a, b)| a.conj() * b).sum();
            for i in 0..4 {
                r[i] -= proj * uv[i];
            }
        }
        residuals.push(r);
    }
    match residuals.len() {
        0 => 1.0,
        1 => residuals[0]
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
            .min(1.0),
        _ => {
            // spectral norm of the residual block from its 2x2 Gram
            // matrix (two-dimensional spans are the largest used here)
            let dot = |a: &[Complex64; 4], b: &[Complex64; 4]| -> Complex64 {
                a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
            };
            let g11 = dot(&residuals[0], &residuals[0]).re;
            let g22 = dot(&residuals[1], &residuals[1]).re;
            let g12 = dot(&residuals[0], &residuals[1]);
            let mid = 0.5 * (g11 + g22);
            let rad = (0.25 * (g11 - g22) * (g11 - g22) + g12.norm_sqr()).sqrt();
            (mid + rad).max(0.0).sqrt().min(1.0)
        }
    }
}

/// The two-parameter null plane of the equal-phase pattern at K = +1.
fn equal_phase_null_plane(params: &PhysicalParams, x: Complex64) -> [[Complex64; 4]; 2] {
    let k = params.k();
    let p = params.p();
    let pf = Complex64::new(params.alpha(), 0.0) - x;
    let qf = Complex64::new(params.beta(), 0.0) - x;
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    [
        [
            one,
            zero,
            Complex64::new(-(k + p) / p, 0.0),
            (k / p) * pf / qf,
        ],
        [
            zero,
            one,
            -(k / p) * qf / pf,
            Complex64::new((k - p) / p, 0.0),
        ],
    ]
}

/// The single null direction of the mixed-sign pattern at K = +1.
fn mixed_sign_null_vector(params: &PhysicalParams, x: Complex64) -> [Complex64; 4] {
    let pf = Complex64::new(params.alpha(), 0.0) - x;
    let qf = Complex64::new(params.beta(), 0.0) - x;
    let c1 = qf / pf;
    let one = Complex64::new(1.0, 0.0);
    [c1, -one, -c1, one]
}

/// Criterion 6: numeric null spaces match the closed-form vectors.
pub fn check_null_space_forms(profile: &CheckProfile) -> CheckOutcome {
    const NAME: &str = "null space closed forms";
    let mut rng = rng_for(profile, 6);
    let one = Complex64::new(1.0, 0.0);
    let mut worst: f64 = 0.0;
    for i in 0..profile.rank_draws {
        let params = draw_params(&mut rng);

        // two-dimensional case: equal phases
        let gen: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let equal = match PhaseConfig::from_generators(VariantId::OnePhase(1), &[gen]) {
            Ok(p) => p,
            Err(e) => return CheckOutcome::fail(NAME, e.to_string()),
        };
        let numeric = build_s(&params, &equal, one).null_basis();
        if numeric.len() != 2 {
            return CheckOutcome::fail(
                NAME,
                format!("draw {i}: equal-phase null space has dim {}", numeric.len()),
            );
        }
        let oracle = equal_phase_null_plane(&params, equal.generator_units()[0]);
        let sine = max_principal_sine(&oracle, &numeric);
        if sine >= 1e-7 {
            return CheckOutcome::fail(
                NAME,
                format!("draw {i}: two-dim principal angle sine {sine:e}"),
            );
        }
        worst = worst.max(sine);

        // one-dimensional case: mixed signs with the phase factor away
        // from +-1, where the null direction is unique
        let margin = 0.1;
        let delta = if rng.gen_bool(0.5) {
            rng.gen_range(margin..std::f64::consts::PI - margin)
        } else {
            rng.gen_range(std::f64::consts::PI + margin..std::f64::consts::TAU - margin)
        };
        let mixed = match PhaseConfig::from_generators(VariantId::OnePhase(2), &[delta]) {
            Ok(p) => p,
            Err(e) => return CheckOutcome::fail(NAME, e.to_string()),
        };
        let numeric = build_s(&params, &mixed, one).null_basis();
        if numeric.len() != 1 {
            return CheckOutcome::fail(
                NAME,
                format!("draw {i}: mixed-sign null space has dim {}", numeric.len()),
            );
        }
        let x = Complex64::from_polar(1.0, delta);
        let oracle = [mixed_sign_null_vector(&params, x)];
        let sine = max_principal_sine(&oracle, &numeric);
        if sine >= 1e-7 {
            return CheckOutcome::fail(
                NAME,
                format!("draw {i}: one-dim principal angle sine {sine:e}"),
            );
        }
        worst = worst.max(sine);
    }
    CheckOutcome::pass(
        NAME,
        format!(
            "{} draws, max principal-angle sine {worst:.3e}",
            profile.rank_draws
        ),
    )
}

/// Criterion 7: certified modes silence the wall current.
pub fn check_wall_current(profile: &CheckProfile) -> CheckOutcome {
    const NAME: &str = "wall current suppression";
    let mut rng = rng_for(profile, 7);
    let variants = VariantId::all();
    let mut worst: f64 = 0.0;
    let mut modes_tested = 0usize;
    for i in 0..profile.mode_draws {
        let variant = variants[i % variants.len()];
        let level = (i % 3) as u32;
        let mass: f64 = rng.gen_range(0.5..2.0);
        let field: f64 = rng.gen_range(0.2..2.0);
        let k: f64 = rng.gen_range(0.3..3.0);
        let p_x: f64 = rng.gen_range(-1.0..1.0);
        let p_sq = k * k + 2.0 * f64::from(level) * field;
        let energy = (mass * mass + p_sq).sqrt();
        let phases = draw_phases(&mut rng, variant);

        let probe = match PhysicalParams::new(mass, energy, p_x, field, 1.0, k) {
            Ok(p) => p,
            Err(e) => return CheckOutcome::fail(NAME, format!("draw {i}: {e}")),
        };
        let set = match closed_form_roots(variant, &probe, &phases) {
            Ok(s) => s,
            Err(e) => return CheckOutcome::fail(NAME, format!("draw {i} {variant}: {e}")),
        };
        let roots = set.expanded_k_roots();
        let pick = rng.gen_range(0..roots.len());
        let a_slab = match quantizing_half_width(roots[pick], k) {
            Ok(a) => a,
            Err(e) => return CheckOutcome::fail(NAME, format!("draw {i} {variant}: {e}")),
        };
        let params = match PhysicalParams::new(mass, energy, p_x, field, a_slab, k) {
            Ok(p) => p,
            Err(e) => return CheckOutcome::fail(NAME, format!("draw {i}: {e}")),
        };
        let root = Complex64::from_polar(1.0, 2.0 * k * a_slab);
        let matrix = build_s(&params, &phases, root);
        let basis = matrix.null_basis();
        if basis.is_empty() {
            return CheckOutcome::fail(
                NAME,
                format!("draw {i} {variant}: no null direction at a catalog root"),
            );
        }

        // every basis vector, plus random combinations when the null
        // space is a plane
        let mut candidates: Vec<[Complex64; 4]> = basis.clone();
        if basis.len() >= 2 {
            for _ in 0..10 {
                let mut combo = [Complex64::new(0.0, 0.0); 4];
                for b in &basis {
                    let w = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    for (slot, c) in combo.iter_mut().zip(b.iter()) {
                        *slot += w * c;
                    }
                }
                candidates.push(combo);
            }
        }

        for cand in candidates {
            let coeffs = match CoefficientVector::from_components(cand) {
                Ok(c) => c,
                Err(e) => return CheckOutcome::fail(NAME, format!("draw {i} {variant}: {e}")),
            };
            let mode =
                match SlabMode::certified(params, phases, root, coeffs, level) {
                    Ok(m) => m,
                    Err(e) => {
                        return CheckOutcome::fail(NAME, format!("draw {i} {variant}: {e}"))
                    }
                };
            let grid = mode.default_y_grid();
            let report = match mode.boundary_residual(&grid) {
                Ok(r) => r,
                Err(e) => return CheckOutcome::fail(NAME, format!("draw {i} {variant}: {e}")),
            };
            if report.residual >= 1e-8 {
                return CheckOutcome::fail(
                    NAME,
                    format!(
                        "draw {i} {variant} level {level}: wall residual {:e}",
                        report.residual
                    ),
                );
            }
            let dev = match mode.wall_phase_deviation(&grid) {
                Ok(d) => d,
                Err(e) => return CheckOutcome::fail(NAME, format!("draw {i} {variant}: {e}")),
            };
            if dev >= 1e-8 {
                return CheckOutcome::fail(
                    NAME,
                    format!("draw {i} {variant}: phase-condition deviation {dev:e}"),
                );
            }
            worst = worst.max(report.residual.max(dev));
            modes_tested += 1;
        }
    }
    CheckOutcome::pass(
        NAME,
        format!("{modes_tested} certified modes, worst wall metric {worst:.3e}"),
    )
}

/// Criterion 8: root products match extreme coefficients, and the free
/// pattern specializes to each variant.
pub fn check_vieta_specialization(profile: &CheckProfile) -> CheckOutcome {
    const NAME: &str = "vieta and specialization";
    let mut rng = rng_for(profile, 8);
    let mut worst_vieta: f64 = 0.0;
    let mut worst_spec: f64 = 0.0;
    for variant in VariantId::all() {
        for i in 0..profile.vieta_draws {
            let params = draw_params(&mut rng);
            let phases = draw_phases(&mut rng, variant);

            if variant.is_lambda_kind() {
                match vieta_check(variant, &params, &phases) {
                    Ok(report) => {
                        if !report.passed() {
                            return CheckOutcome::fail(
                                NAME,
                                format!(
                                    "{variant} draw {i}: product deviation {:e}",
                                    report.deviation
                                ),
                            );
                        }
                        worst_vieta = worst_vieta.max(report.deviation);
                    }
                    Err(e) => {
                        return CheckOutcome::fail(NAME, format!("{variant} draw {i}: {e}"))
                    }
                }
            }

            let set = match closed_form_roots(variant, &params, &phases) {
                Ok(s) => s,
                Err(e) => return CheckOutcome::fail(NAME, format!("{variant} draw {i}: {e}")),
            };
            let general =
                match PhaseConfig::general(phases.rho(), phases.mu(), phases.sigma(), phases.nu())
                {
                    Ok(g) => g,
                    Err(e) => {
                        return CheckOutcome::fail(NAME, format!("{variant} draw {i}: {e}"))
                    }
                };
            let gset = match closed_form_roots(VariantId::FourPhase, &params, &general) {
                Ok(s) => s,
                Err(e) => return CheckOutcome::fail(NAME, format!("{variant} draw {i}: {e}")),
            };
            let dist =
                match multiset_distance(&set.lambda_pair(), &gset.lambda_pair()) {
                    Some(d) => d,
                    None => unreachable!("lambda pairs always have two members"),
                };
            if dist >= 1e-10 {
                return CheckOutcome::fail(
                    NAME,
                    format!("{variant} draw {i}: specialization deviation {dist:e}"),
                );
            }
            worst_spec = worst_spec.max(dist);
        }
    }
    CheckOutcome::pass(
        NAME,
        format!(
            "max product deviation {worst_vieta:.3e}, max specialization deviation {worst_spec:.3e}"
        ),
    )
}

/// Criterion 9: the transverse profile solves its equation and the
/// lowest-level lowering image vanishes.
pub fn check_transverse_profiles(_profile: &CheckProfile) -> CheckOutcome {
    const NAME: &str = "transverse profiles";
    let mut worst: f64 = 0.0;
    for &field in &[0.3, 1.0, 2.7] {
        for &p_x in &[-0.8, 0.0, 1.1] {
            for n in 0..=6u32 {
                let mode = match TransverseMode::new(n, field, p_x) {
                    Ok(m) => m,
                    Err(e) => return CheckOutcome::fail(NAME, e.to_string()),
                };
                let sqrt_b = field.sqrt();
                let h = 0.01 / sqrt_b;
                let mut f_max: f64 = 0.0;
                let mut res_max: f64 = 0.0;
                for j in 0..81 {
                    let t = -4.0 + 8.0 * (j as f64) / 80.0;
                    let y = mode.y_from_scaled(t);
                    let f0 = eval_f(&mode, y);
                    f_max = f_max.max(f0.abs());
                    // five-point second derivative
                    let fm2 = eval_f(&mode, y - 2.0 * h);
                    let fm1 = eval_f(&mode, y - h);
                    let fp1 = eval_f(&mode, y + h);
                    let fp2 = eval_f(&mode, y + 2.0 * h);
                    let d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2)
                        / (12.0 * h * h);
                    let w = p_x + field * y;
                    let residual = d2 + (2.0 * f64::from(n) * field + field - w * w) * f0;
                    res_max = res_max.max(residual.abs());

                    if n == 0 {
                        let g = eval_g(&mode, y);
                        if g != 0.0 {
                            return CheckOutcome::fail(
                                NAME,
                                format!("lowest-level g = {g:e} at t = {t}"),
                            );
                        }
                    }
                }
                let rel = res_max / f_max;
                if rel >= 1e-6 {
                    return CheckOutcome::fail(
                        NAME,
                        format!("n = {n}, B = {field}, p_x = {p_x}: residual {rel:e}"),
                    );
                }
                worst = worst.max(rel);
            }
        }
    }
    CheckOutcome::pass(
        NAME,
        format!("levels 0..=6 over 9 parameter points, max residual {worst:.3e} of max |f|"),
    )
}

/// Criterion 10: emitted momenta verify, and counts track the phase
/// estimate.
pub fn check_spectrum_residuals(_profile: &CheckProfile) -> CheckOutcome {
    const NAME: &str = "spectrum residuals";
    struct Case {
        variant: VariantId,
        gens: Vec<f64>,
        parameterization: Parameterization,
        a_slab: f64,
        window: (f64, f64),
        selector: usize,
    }
    let cases = [
        Case {
            variant: VariantId::OnePhase(1),
            gens: vec![0.6],
            parameterization: Parameterization::LandauLevel(0),
            a_slab: 1.0,
            window: (0.0, 10.0),
            selector: 0,
        },
        Case {
            variant: VariantId::OnePhase(3),
            gens: vec![1.7],
            parameterization: Parameterization::LandauLevel(1),
            a_slab: 1.3,
            window: (0.0, 8.0),
            selector: 1,
        },
        Case {
            variant: VariantId::TwoPhase(2),
            gens: vec![0.9, 2.1],
            parameterization: Parameterization::FixedEpsilon(3.0),
            a_slab: 1.4,
            window: (0.0, 8.0_f64.sqrt()),
            selector: 2,
        },
    ];
    let mut worst: f64 = 0.0;
    let mut rows_total = 0usize;
    for (ci, case) in cases.iter().enumerate() {
        let phases = match PhaseConfig::from_generators(case.variant, &case.gens) {
            Ok(p) => p,
            Err(e) => return CheckOutcome::fail(NAME, format!("case {ci}: {e}")),
        };
        let problem = match QuantizationProblem::new(
            case.variant,
            phases,
            1.0,
            0.8,
            case.parameterization,
            case.a_slab,
            case.window,
            case.selector,
        ) {
            Ok(p) => p,
            Err(e) => return CheckOutcome::fail(NAME, format!("case {ci}: {e}")),
        };
        let table = match allowed_k(&problem, 512) {
            Ok(t) => t,
            Err(e) => return CheckOutcome::fail(NAME, format!("case {ci}: {e}")),
        };
        if !table.excluded.is_empty() {
            return CheckOutcome::fail(
                NAME,
                format!("case {ci}: {} grid points excluded", table.excluded.len()),
            );
        }
        for row in &table.rows {
            if row.residual >= 1e-9 {
                return CheckOutcome::fail(
                    NAME,
                    format!("case {ci}: k = {} has residual {:e}", row.k, row.residual),
                );
            }
            worst = worst.max(row.residual);
        }
        let m = f64::from(table.phase_multiplier);
        let span = case.window.1 - case.window.0;
        let estimate = m * case.a_slab * span / std::f64::consts::TAU;
        let count = table.rows.len() as f64;
        if (count - estimate).abs() > 2.0 {
            return CheckOutcome::fail(
                NAME,
                format!("case {ci}: {count} rows vs phase estimate {estimate:.2}"),
            );
        }
        rows_total += table.rows.len();
    }
    CheckOutcome::pass(
        NAME,
        format!("{rows_total} momenta verified, max residual {worst:.3e}"),
    )
}

/// The full battery, in criterion order.
pub fn run_all(profile: &CheckProfile) -> Vec<CheckOutcome> {
    vec![
        check_catalog_oracle(profile),
        check_unit_modulus(profile),
        check_determinant_vanishing(profile),
        check_exact_quantization(profile),
        check_rank_structure(profile),
        check_null_space_forms(profile),
        check_wall_current(profile),
        check_vieta_specialization(profile),
        check_transverse_profiles(profile),
        check_spectrum_residuals(profile),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_battery_is_all_green() {
        let profile = CheckProfile::quick(11);
        let outcomes = run_all(&profile);
        assert_eq!(outcomes.len(), 10);
        for outcome in &outcomes {
            assert!(
                outcome.passed,
                "check `{}` failed: {}",
                outcome.name, outcome.detail
            );
        }
    }

    #[test]
    fn battery_is_deterministic_for_a_seed() {
        let a = run_all(&CheckProfile::quick(42));
        let b = run_all(&CheckProfile::quick(42));
        assert_eq!(a, b);
    }

    #[test]
    fn principal_sine_separates_spans() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let e1 = [one, zero, zero, zero];
        let e2 = [zero, one, zero, zero];
        let e3 = [zero, zero, one, zero];
        assert!(max_principal_sine(&[e1, e2], &[e2, e1]) < 1e-15);
        assert!((max_principal_sine(&[e1], &[e3]) - 1.0).abs() < 1e-15);
        // a 45-degree tilt
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let tilted = [
            Complex64::new(s, 0.0),
            zero,
            Complex64::new(s, 0.0),
            zero,
        ];
        let sine = max_principal_sine(&[e1], &[tilted]);
        assert!((sine - s).abs() < 1e-12);
    }
}
