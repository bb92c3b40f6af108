//! Closed-form roots of det S(K) = 0 for every wall-phase variant.
//!
//! The determinant is a quartic in the round-trip phase K = e^{2ika},
//! even in K for every cataloged pattern, so it is a quadratic in
//! Lambda = K^2. Variants fall in two kinds:
//!
//! - K-kind: the quartic pins K itself. Equal phases on both walls give
//!   K in {+1, +1, -1, -1}; two of the two-phase patterns give
//!   {+1, -1, +-sqrt(Lambda~)} with a single configuration-dependent
//!   square root.
//! - Lambda-kind: the quadratic in Lambda has the fixed root 1 paired
//!   with a Moebius-rational root, a repeated root, or a conjugate pair
//!   produced by a radical.
//!
//! Formulas are written in the Moebius images X, Y, Z, V, W of the wall
//! phase factors under x -> (alpha - x)/(1 - alpha x), which maps the
//! unit circle to itself for alpha > 1. On the circle the images keep
//! every root at unit modulus; `verify_unit_modulus` checks that and
//! `vieta_check` ties root products to the printed extreme coefficients.
//! None of this is trusted on its own: the numeric quartic oracle in
//! `boundary` cross-validates every formula in the test suite.
//!
//! Denominators are guarded; a vanishing one reports which subexpression
//! degenerated. For physical inputs (0 < k <= p, alpha > 1) the guarded
//! factors are bounded away from zero, mostly because |k - p| < k + p
//! while the Moebius images stay on the unit circle.

use num_complex::Complex64;

use crate::error::DomainError;
use crate::params::{mobius_x, PhaseConfig, PhysicalParams, VariantId};

/// Whether a root entry fixes K directly or Lambda = K^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    K,
    Lambda,
}

/// One root with multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootEntry {
    pub value: Complex64,
    pub multiplicity: u32,
    pub kind: RootKind,
}

impl RootEntry {
    fn k(value: Complex64, multiplicity: u32) -> Self {
        RootEntry {
            value,
            multiplicity,
            kind: RootKind::K,
        }
    }

    fn lambda(value: Complex64, multiplicity: u32) -> Self {
        RootEntry {
            value,
            multiplicity,
            kind: RootKind::Lambda,
        }
    }
}

/// The closed-form root list of one variant at one parameter point.
///
/// K-kind entries carry total multiplicity 4; Lambda-kind entries carry
/// total multiplicity 2 and expand to 4 K-roots via +-sqrt.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    variant: VariantId,
    entries: Vec<RootEntry>,
}

impl RootSet {
    pub fn variant(&self) -> VariantId {
        self.variant
    }

    pub fn entries(&self) -> &[RootEntry] {
        &self.entries
    }

    /// All four K-roots, entry order, Lambda entries expanded to
    /// (+sqrt, -sqrt) pairs with the principal branch first.
    pub fn expanded_k_roots(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(4);
        for e in &self.entries {
            match e.kind {
                RootKind::K => {
                    for _ in 0..e.multiplicity {
                        out.push(e.value);
                    }
                }
                RootKind::Lambda => {
                    let r = e.value.sqrt();
                    for _ in 0..e.multiplicity {
                        out.push(r);
                        out.push(-r);
                    }
                }
            }
        }
        out
    }

    /// The two Lambda roots of the underlying bi-quadratic, with
    /// multiplicity. For K-kind entries they come from squaring the
    /// K-roots, which pair up exactly under K -> -K.
    pub fn lambda_pair(&self) -> [Complex64; 2] {
        if self.variant.is_lambda_kind() {
            match self.entries.len() {
                1 => [self.entries[0].value, self.entries[0].value],
                _ => [self.entries[0].value, self.entries[1].value],
            }
        } else {
            let mut squared: Vec<Complex64> =
                self.expanded_k_roots().iter().map(|k| k * k).collect();
            squared.sort_by(|a, b| {
                (a.re, a.im)
                    .partial_cmp(&(b.re, b.im))
                    .expect("finite roots")
            });
            [squared[0], squared[2]]
        }
    }
}

/// Number of distinct root entries `closed_form_roots` emits for a
/// variant; selectors in quantization problems index into this range.
pub fn root_entry_count(variant: VariantId) -> usize {
    match variant {
        VariantId::OnePhase(6) | VariantId::OnePhase(8) => 1,
        VariantId::TwoPhase(2) | VariantId::TwoPhase(3) => 4,
        _ => 2,
    }
}

/// Largest deviation of root moduli from 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusReport {
    pub max_deviation: f64,
}

impl ModulusReport {
    pub fn passed(&self) -> bool {
        self.max_deviation < 1e-10
    }
}

/// Check | |K| - 1 | over the four expanded K-roots.
pub fn verify_unit_modulus(roots: &RootSet) -> ModulusReport {
    let max_deviation = roots
        .expanded_k_roots()
        .iter()
        .map(|r| (r.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    ModulusReport { max_deviation }
}

/// Root product against the ratio of extreme bi-quadratic coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VietaReport {
    /// Lambda_1 * Lambda_2 from the closed-form roots.
    pub product: Complex64,
    /// c / a from the printed extreme coefficients.
    pub ratio: Complex64,
    pub deviation: f64,
}

impl VietaReport {
    pub fn passed(&self) -> bool {
        self.deviation < 1e-10
    }
}

struct VariantRoots {
    entries: Vec<RootEntry>,
    /// Extreme coefficients (a, c) of a Lambda^2 + b Lambda + c where
    /// printed; None for the K-kind variants.
    vieta: Option<(Complex64, Complex64)>,
}

/// Guarded division; names the subexpression if the denominator
/// degenerates. `scale` is the natural magnitude of the denominator.
fn cdiv(
    num: Complex64,
    den: Complex64,
    expr: &'static str,
    scale: f64,
) -> Result<Complex64, DomainError> {
    if den.norm() < 1e-13 * scale {
        return Err(DomainError::SingularConfiguration {
            expr,
            magnitude: den.norm(),
        });
    }
    Ok(num / den)
}

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Closed-form roots for `variant` at the given kinematics and phases.
///
/// Requires k > 0 (several denominators and the mode itself degenerate
/// at k = 0) and phases built for the same variant.
pub fn closed_form_roots(
    variant: VariantId,
    params: &PhysicalParams,
    phases: &PhaseConfig,
) -> Result<RootSet, DomainError> {
    variant.validate()?;
    if variant != phases.variant() {
        return Err(DomainError::VariantMismatch {
            requested: variant.to_string(),
            configured: phases.variant().to_string(),
        });
    }
    let v = variant_roots(variant, params, phases)?;
    Ok(RootSet {
        variant,
        entries: v.entries,
    })
}

/// Lambda_1 Lambda_2 = c/a for the Lambda-kind variants.
///
/// The product of the two bi-quadratic roots must equal the ratio of
/// extreme coefficients; since |a| = |c| holds for the printed forms,
/// this is the unimodularity argument in algebraic clothing.
pub fn vieta_check(
    variant: VariantId,
    params: &PhysicalParams,
    phases: &PhaseConfig,
) -> Result<VietaReport, DomainError> {
    variant.validate()?;
    if variant != phases.variant() {
        return Err(DomainError::VariantMismatch {
            requested: variant.to_string(),
            configured: phases.variant().to_string(),
        });
    }
    let v = variant_roots(variant, params, phases)?;
    let (a, c) = v
        .vieta
        .ok_or_else(|| DomainError::ProductCheckNotApplicable(variant.to_string()))?;
    let set = RootSet {
        variant,
        entries: v.entries,
    };
    let [l1, l2] = set.lambda_pair();
    let product = l1 * l2;
    let ratio = cdiv(c, a, "leading bi-quadratic coefficient", c.norm() + 1e-300)?;
    Ok(VietaReport {
        product,
        ratio,
        deviation: (product - ratio).norm(),
    })
}

fn variant_roots(
    variant: VariantId,
    params: &PhysicalParams,
    phases: &PhaseConfig,
) -> Result<VariantRoots, DomainError> {
    let k = params.k();
    if k <= 0.0 {
        return Err(DomainError::MomentumNotPositive(k));
    }
    let p = params.p();
    let alpha = params.alpha();
    let gu = phases.generator_units();

    match variant {
        VariantId::OnePhase(i) => one_phase(i, alpha, k, p, gu[0]),
        VariantId::TwoPhase(i) => two_phase(i, alpha, k, p, gu[0], gu[1]),
        VariantId::ThreePhase(i) => three_phase(i, alpha, k, p, gu[0], gu[1], gu[2]),
        VariantId::FourPhase => four_phase(alpha, k, p, gu[0], gu[1], gu[2], gu[3]),
    }
}

fn fixed_pm_pair() -> VariantRoots {
    VariantRoots {
        entries: vec![RootEntry::k(ONE, 2), RootEntry::k(-ONE, 2)],
        vieta: None,
    }
}

fn one_phase(
    idx: u8,
    alpha: f64,
    k: f64,
    p: f64,
    x: Complex64,
) -> Result<VariantRoots, DomainError> {
    let a2 = alpha * alpha;
    let kp = k + p;
    let km = k - p;

    match idx {
        1 => Ok(fixed_pm_pair()),
        2 => {
            // raw phase factor form; the Moebius image hides the
            // alpha^2 structure here
            let x2 = x * x;
            let num = (a2 * (x2 - 1.0) - x2 + 1.0) * k
                + (a2 * (-x2 - 1.0) + 4.0 * alpha * x - x2 - 1.0) * p;
            let den = (a2 * (x2 - 1.0) - x2 + 1.0) * k
                + (a2 * (x2 + 1.0) - 4.0 * alpha * x + x2 + 1.0) * p;
            let scale = kp * (1.0 + a2);
            let lam2 = -cdiv(num, den, "mixed-sign wall polynomial", scale)?;
            let a = (k * x2 * a2 + p * x2 * a2 - k * x2 + p * x2) + (-k * a2 + p * a2)
                - 4.0 * p * alpha * x
                + Complex64::new(k + p, 0.0);
            let c = (-k * x2 * a2 + p * x2 * a2 + k * x2 + p * x2) + (k * a2 + p * a2)
                - 4.0 * p * alpha * x
                + Complex64::new(-k + p, 0.0);
            Ok(VariantRoots {
                entries: vec![RootEntry::lambda(ONE, 1), RootEntry::lambda(lam2, 1)],
                vieta: Some((a, c)),
            })
        }
        3 | 4 => {
            let xx = mobius_sq(alpha, x)?;
            let lam2 = cdiv(
                -km * xx + kp,
                kp * xx + Complex64::new(-k + p, 0.0),
                "(k+p) X^2 - k + p",
                kp,
            )?;
            let a = kp * xx + Complex64::new(-k + p, 0.0);
            let c = -(km * xx - Complex64::new(k + p, 0.0));
            Ok(VariantRoots {
                entries: vec![RootEntry::lambda(ONE, 1), RootEntry::lambda(lam2, 1)],
                vieta: Some((a, c)),
            })
        }
        5 => {
            let xx = mobius_sq(alpha, x)?;
            let lam2 = cdiv(
                kp * xx + Complex64::new(-k + p, 0.0),
                -km * xx + kp,
                "(p-k) X^2 + k + p",
                kp,
            )?;
            let a = km * xx - Complex64::new(k + p, 0.0);
            let c = -(kp * xx + Complex64::new(-k + p, 0.0));
            Ok(VariantRoots {
                entries: vec![RootEntry::lambda(ONE, 1), RootEntry::lambda(lam2, 1)],
                vieta: Some((a, c)),
            })
        }
        6 => Ok(VariantRoots {
            entries: vec![RootEntry::lambda(ONE, 2)],
            vieta: Some((-ONE, -ONE)),
        }),
        7 => {
            let xx = mobius_sq(alpha, x)?;
            let w = xx + cdiv(ONE, xx, "X^2", 1.0)?;
            let ell = (k * k) / (p * p);
            let u = ell * (w - 2.0);
            let s = (u * (u + 4.0)).sqrt();
            let lam1 = 1.0 + 0.5 * u + 0.5 * s;
            let lam2 = 1.0 + 0.5 * u - 0.5 * s;
            Ok(VariantRoots {
                entries: vec![RootEntry::lambda(lam1, 1), RootEntry::lambda(lam2, 1)],
                vieta: Some((ONE, ONE)),
            })
        }
        8 => {
            let xx = mobius_sq(alpha, x)?;
            let lam = cdiv(
                -km * xx + kp,
                kp * xx + Complex64::new(-k + p, 0.0),
                "(k+p) X^2 - k + p",
                kp,
            )?;
            let a0 = kp * xx + Complex64::new(-k + p, 0.0);
            let c0 = km * xx - Complex64::new(k + p, 0.0);
            Ok(VariantRoots {
                entries: vec![RootEntry::lambda(lam, 2)],
                vieta: Some((a0 * a0, c0 * c0)),
            })
        }
        _ => Err(DomainError::VariantIndex {
            family: "one-phase",
            index: idx,
            max: 8,
        }),
    }
}

fn two_phase(
    idx: u8,
    alpha: f64,
    k: f64,
    p: f64,
    x_unit: Complex64,
    y_unit: Complex64,
) -> Result<VariantRoots, DomainError> {
    let kp = k + p;
    let km = k - p;
    match idx {
        1 => Ok(fixed_pm_pair()),
        2 | 3 => {
            let x = mobius_x(alpha, x_unit)?;
            let y = mobius_x(alpha, y_unit)?;
            let f1 = y * x * kp + Complex64::new(-k + p, 0.0);
            let f2 = x * km - y * kp;
            let g1 = y * x * km - Complex64::new(k + p, 0.0);
            let g2 = x * kp - y * km;
            let scale = kp * kp;
            let lam = if idx == 2 {
                cdiv(f1 * f2, g1 * g2, "(YX(k-p) - k - p)(X(k+p) - Y(k-p))", scale)?
            } else {
                cdiv(g1 * f2, f1 * g2, "(YX(k+p) - k + p)(X(k+p) - Y(k-p))", scale)?
            };
            let r = lam.sqrt();
            Ok(VariantRoots {
                entries: vec![
                    RootEntry::k(ONE, 1),
                    RootEntry::k(-ONE, 1),
                    RootEntry::k(r, 1),
                    RootEntry::k(-r, 1),
                ],
                vieta: None,
            })
        }
        4 => {
            let x = mobius_x(alpha, x_unit)?;
            let y = mobius_x(alpha, y_unit)?;
            let d0 = kp * x - km * y;
            let d = d0 * d0;
            let yx = y * x - 1.0;
            let r_expr = yx * yx * ((k * k) * ((y * y - 1.0) * x * x - y * y + 1.0) + (p * p) * (x + y) * (x + y));
            let n = (2.0 * k * k * y * y + Complex64::new(p * p - k * k, 0.0)) * x * x
                + y * (p * p - k * k) * (2.0 * x + y)
                + Complex64::new(2.0 * k * k, 0.0);
            let s = r_expr.sqrt();
            let scale = kp * kp;
            let lam1 = cdiv(2.0 * k * s + n, d, "((k+p)X - (k-p)Y)^2", scale)?;
            let lam2 = cdiv(-2.0 * k * s + n, d, "((k+p)X - (k-p)Y)^2", scale)?;
            let c0 = x * km - kp * y;
            Ok(VariantRoots {
                entries: vec![RootEntry::lambda(lam1, 1), RootEntry::lambda(lam2, 1)],
                vieta: Some((d, c0 * c0)),
            })
        }
        _ => Err(DomainError::VariantIndex {
            family: "two-phase",
            index: idx,
            max: 4,
        }),
    }
}

fn three_phase(
    idx: u8,
    alpha: f64,
    k: f64,
    p: f64,
    x_unit: Complex64,
    y_unit: Complex64,
    z_unit: Complex64,
) -> Result<VariantRoots, DomainError> {
    let kp = k + p;
    let km = k - p;
    let x = mobius_x(alpha, x_unit)?;
    let y = mobius_x(alpha, y_unit)?;
    let z = mobius_x(alpha, z_unit)?;
    let scale2 = kp * kp;

    match idx {
        1 => {
            let num = (km * x - kp * y) * (kp * x - km * z);
            let den = (kp * x - km * y) * (km * x - kp * z);
            let lam2 = cdiv(num, den, "((k+p)X - (k-p)Y)((k-p)X - (k+p)Z)", scale2)?;
            let a = (kp * x - km * y) * (km * x - kp * z);
            let c = (km * x - kp * y) * (kp * x - km * z);
            Ok(VariantRoots {
                entries: vec![RootEntry::lambda(ONE, 1), RootEntry::lambda(lam2, 1)],
                vieta: Some((a, c)),
            })
        }
        2 => {
            let num = (km * x - kp * z) * (kp * x - km * y);
            let den = (kp * x - km * z) * (km * x - kp * y);
            let lam2 = cdiv(num, den, "((k+p)X - (k-p)Z)((k-p)X - (k+p)Y)", scale2)?;
            let a = (kp * x - km * z) * (km * x - kp * y);
            let c = (kp * x - km * y) * (km * x - kp * z);
            Ok(VariantRoots {
                entries: vec![RootEntry::lambda(ONE, 1), RootEntry::lambda(lam2, 1)],
                vieta: Some((a, c)),
            })
        }
        3 => {
            let d = p * x * (k * (y - z) - p * (y + z));
            let nd = (k * k) * (x * x + y * z) - (k * k - p * p) * (y + z) * x;
            let r_expr = (k * k)
                * ((x - z) * (x - z) * (x - y) * (x - y) * (k * k)
                    + 2.0 * p * p * ((y + z) * x - 2.0 * y * z) * x * (x - 0.5 * z - 0.5 * y));
            let s = r_expr.sqrt();
            let scale = p * kp;
            let lam1 = cdiv(s - nd, d, "p X (k(Y-Z) - (Y+Z)p)", scale)?;
            let lam2 = cdiv(-s - nd, d, "p X (k(Y-Z) - (Y+Z)p)", scale)?;
            let c = -(p * x * (k * (y - z) + p * (y + z)));
            Ok(VariantRoots {
                entries: vec![RootEntry::lambda(lam1, 1), RootEntry::lambda(lam2, 1)],
                vieta: Some((d, c)),
            })
        }
        4 => {
            let x2 = x * x;
            let d = ((x2 - 1.0) * k + (x2 + 1.0) * p) * ((y - z) * k - (y + z) * p);
            let r_expr = (x * z - 1.0) * (x - z) * (x * y - 1.0) * (x - y) * (k * k)
                - (y * z * (x2 + 1.0) - x * (y + z)) * (x2 - x * (y + z) + 1.0) * (p * p);
            let n = ((y + z) * x2 - 2.0 * (y * z + 1.0) * x + y + z) * (k * k)
                - (y + z) * (x2 + 1.0) * (p * p);
            let s = r_expr.sqrt();
            let lam1 = cdiv(2.0 * k * s + n, d, "((X^2-1)k + (X^2+1)p)((Y-Z)k - (Y+Z)p)", scale2)?;
            let lam2 = cdiv(-2.0 * k * s + n, d, "((X^2-1)k + (X^2+1)p)((Y-Z)k - (Y+Z)p)", scale2)?;
            let c = ((x2 - 1.0) * k - (x2 + 1.0) * p) * ((y - z) * k + (y + z) * p);
            Ok(VariantRoots {
                entries: vec![RootEntry::lambda(lam1, 1), RootEntry::lambda(lam2, 1)],
                vieta: Some((d, c)),
            })
        }
        5 => {
            let lam1 = -cdiv(x * km - y * kp, kp * x - y * km, "(k+p)X - (k-p)Y", kp)?;
            let lam2 = -cdiv(x * km - z * kp, kp * x - z * km, "(k+p)X - (k-p)Z", kp)?;
            let a = (kp * x - y * km) * (kp * x - z * km);
            let c = (x * km - y * kp) * (x * km - z * kp);
            Ok(VariantRoots {
                entries: vec![RootEntry::lambda(lam1, 1), RootEntry::lambda(lam2, 1)],
                vieta: Some((a, c)),
            })
        }
        6 => {
            let x2 = x * x;
            let d = (y * km * x - kp) * (x * kp - z * km);
            let r_expr = -((y - z) * (x2 - 1.0) * (x * z - 1.0) * (x - y) * (k * k)
                - (y * z * (x2 - 1.0) + (z - y) * x) * (x2 + (z - y) * x - 1.0) * (p * p));
            let n = ((y - 2.0 * z) * (k * k) - y * (p * p)) * x2
                + (y * z + 1.0) * (k * k - p * p) * x
                + (z - 2.0 * y) * (k * k)
                - z * (p * p);
            let s = r_expr.sqrt();
            let lam1 = cdiv(2.0 * k * s + n, d, "(Y(k-p)X - k - p)(X(k+p) - Z(k-p))", scale2)?;
            let lam2 = cdiv(-2.0 * k * s + n, d, "(Y(k-p)X - k - p)(X(k+p) - Z(k-p))", scale2)?;
            let kp2 = kp * kp;
            let km2 = km * km;
            let ksq = k * k - p * p;
            let a = -(ksq * (y * x2 + z)) + (km2 * z * y + kp2) * x;
            let c = -(ksq * (y * x2 + z)) + (kp2 * z * y + km2) * x;
            Ok(VariantRoots {
                entries: vec![RootEntry::lambda(lam1, 1), RootEntry::lambda(lam2, 1)],
                vieta: Some((a, c)),
            })
        }
        _ => Err(DomainError::VariantIndex {
            family: "three-phase",
            index: idx,
            max: 6,
        }),
    }
}

fn four_phase(
    alpha: f64,
    k: f64,
    p: f64,
    x_unit: Complex64,
    y_unit: Complex64,
    v_unit: Complex64,
    w_unit: Complex64,
) -> Result<VariantRoots, DomainError> {
    let x = mobius_x(alpha, x_unit)?;
    let y = mobius_x(alpha, y_unit)?;
    let v = mobius_x(alpha, v_unit)?;
    let w = mobius_x(alpha, w_unit)?;
    let kp = k + p;

    let d = ((w - y) * k + (w + y) * p) * ((v - x) * k - (v + x) * p);
    let r_expr = (((x - y) * w + x * y) * v - w * x * y) * (v + x - y - w) * (p * p)
        - (x - y) * (w - x) * (v - y) * (v - w) * (k * k);
    let n = ((w - 2.0 * x + y) * v + (x - 2.0 * y) * w + x * y) * (k * k)
        - (w + y) * (v + x) * (p * p);
    let s = r_expr.sqrt();
    let scale = kp * kp;
    let lam1 = cdiv(2.0 * k * s + n, d, "((W-Y)k + (W+Y)p)((V-X)k - (V+X)p)", scale)?;
    let lam2 = cdiv(-2.0 * k * s + n, d, "((W-Y)k + (W+Y)p)((V-X)k - (V+X)p)", scale)?;
    let a = ((v - x) * k - (v + x) * p) * ((w - y) * k + (w + y) * p);
    let c = ((w - y) * k - (w + y) * p) * ((v - x) * k + (v + x) * p);
    Ok(VariantRoots {
        entries: vec![RootEntry::lambda(lam1, 1), RootEntry::lambda(lam2, 1)],
        vieta: Some((a, c)),
    })
}

/// X^2 for the Moebius image of a unit phase factor.
fn mobius_sq(alpha: f64, x: Complex64) -> Result<Complex64, DomainError> {
    let img = mobius_x(alpha, x)?;
    Ok(img * img)
}
