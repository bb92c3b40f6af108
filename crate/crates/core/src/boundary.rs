//! Wall-condition linear algebra.
//!
//! A slab solution is a combination A1..A4 of four traveling waves, two
//! per direction along z, with polarization weights alpha and beta on
//! the spin branches. Imposing the reflection phases on both walls gives
//! a homogeneous 4x4 system S(K) A = 0 in the round-trip phase
//! K = e^{2 i k a}. Modes exist where det S(K) = 0.
//!
//! In row order, the four conditions are: the spin-up identification at
//! the lower wall (phase rho), the same at the upper wall (mu), then the
//! spin-down identifications at the lower (sigma) and upper (nu) walls,
//! which carry the (k +- p) weights of the small components. Columns 3
//! and 4 pick up a factor K on rows tied to one wall and lose it on the
//! other; that asymmetry is what turns det S = 0 into a quartic in K.
//!
//! Everything here is numeric: determinants by pivoted elimination with
//! a cofactor cross-check, the quartic extracted by sampling det S at
//! five points and certified at a sixth, ranks and null spaces by
//! singular value decomposition. Closed forms live in `catalog` and are
//! held to these numbers by the test suite, never trusted alone.

use nalgebra::{Matrix3, Matrix4, SMatrix, SVector, Vector4};
use num_complex::Complex64;

use crate::error::{DomainError, InternalError};
use crate::params::{PhaseConfig, PhysicalParams};

/// Relative threshold under which a singular value counts as zero.
pub const RANK_TOL: f64 = 1e-10;

/// Relative threshold under which det S certifies K as a root.
pub const ROOT_DET_TOL: f64 = 1e-8;

/// The wall-condition matrix S(K) with the inputs it was built from.
#[derive(Debug, Clone)]
pub struct BoundaryMatrix {
    entries: Matrix4<Complex64>,
    params: PhysicalParams,
    phases: PhaseConfig,
    k_value: Complex64,
}

/// Build S(K). Total for valid params; K may be any complex number,
/// including the non-unit sample points used for the quartic fit.
pub fn build_s(params: &PhysicalParams, phases: &PhaseConfig, k_value: Complex64) -> BoundaryMatrix {
    let alpha = Complex64::new(params.alpha(), 0.0);
    let beta = Complex64::new(params.beta(), 0.0);
    let kp = Complex64::new(params.k() + params.p(), 0.0);
    let km = Complex64::new(params.k() - params.p(), 0.0);
    let [x_rho, x_mu, x_sigma, x_nu] = phases.unit_values();
    let kk = k_value;

    let r1 = [alpha - x_rho, beta - x_rho];
    let r2 = [alpha - x_mu, beta - x_mu];
    let r3 = [alpha - x_sigma, beta - x_sigma];
    let r4 = [alpha - x_nu, beta - x_nu];

    let entries = Matrix4::new(
        r1[0],
        r1[1],
        r1[0] * kk,
        r1[1] * kk,
        r2[0] * kk,
        r2[1] * kk,
        r2[0],
        r2[1],
        r3[0] * kp,
        r3[1] * km,
        -r3[0] * km * kk,
        -r3[1] * kp * kk,
        r4[0] * kp * kk,
        r4[1] * km * kk,
        -r4[0] * km,
        -r4[1] * kp,
    );

    BoundaryMatrix {
        entries,
        params: *params,
        phases: *phases,
        k_value,
    }
}

impl BoundaryMatrix {
    pub fn entries(&self) -> &Matrix4<Complex64> {
        &self.entries
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn phases(&self) -> &PhaseConfig {
        &self.phases
    }

    pub fn k_value(&self) -> Complex64 {
        self.k_value
    }

    /// Product of row max-magnitudes: the natural magnitude of det S.
    /// Tolerances on "det is zero" are relative to this.
    pub fn hadamard_scale(&self) -> f64 {
        let mut scale = 1.0;
        for i in 0..4 {
            let mut row_max: f64 = 0.0;
            for j in 0..4 {
                row_max = row_max.max(self.entries[(i, j)].norm());
            }
            scale *= row_max;
        }
        scale
    }

    /// Determinant by partial-pivoting elimination.
    pub fn det(&self) -> Complex64 {
        self.entries.determinant()
    }

    /// Determinant by cofactor expansion along the first row.
    /// Exists as an independent cross-check on `det`.
    pub fn det_cofactor(&self) -> Complex64 {
        let m = &self.entries;
        let minor = |col: usize| -> Complex64 {
            let mut idx = [0usize; 3];
            let mut w = 0;
            for j in 0..4 {
                if j != col {
                    idx[w] = j;
                    w += 1;
                }
            }
            Matrix3::new(
                m[(1, idx[0])],
                m[(1, idx[1])],
                m[(1, idx[2])],
                m[(2, idx[0])],
                m[(2, idx[1])],
                m[(2, idx[2])],
                m[(3, idx[0])],
                m[(3, idx[1])],
                m[(3, idx[2])],
            )
            .determinant()
        };
        let mut det = Complex64::new(0.0, 0.0);
        let mut sign = 1.0;
        for col in 0..4 {
            det += sign * m[(0, col)] * minor(col);
            sign = -sign;
        }
        det
    }

    /// Singular values, sorted descending.
    pub fn singular_values(&self) -> [f64; 4] {
        let svd = self.entries.svd(false, false);
        let mut s = [
            svd.singular_values[0],
            svd.singular_values[1],
            svd.singular_values[2],
            svd.singular_values[3],
        ];
        s.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
        s
    }

    /// Numeric rank: singular values above RANK_TOL times the largest.
    pub fn rank(&self) -> usize {
        let s = self.singular_values();
        let tol = RANK_TOL * s[0];
        s.iter().filter(|&&v| v > tol).count()
    }

    /// Orthonormal basis of the numeric null space, smallest singular
    /// value first. Empty when the matrix has full numeric rank.
    pub fn null_basis(&self) -> Vec<[Complex64; 4]> {
        let svd = self.entries.svd(false, true);
        let v_t = svd.v_t.expect("requested v_t");
        let sv = svd.singular_values;
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&a, &b| sv[a].partial_cmp(&sv[b]).expect("finite"));
        let tol = RANK_TOL * sv[order[3]];
        let mut basis = Vec::new();
        for &i in &order {
            if sv[i] <= tol {
                // A = U S V^H, so null vectors are conjugated rows of V^H
                let row = v_t.row(i);
                basis.push([
                    row[0].conj(),
                    row[1].conj(),
                    row[2].conj(),
                    row[3].conj(),
                ]);
            }
        }
        basis
    }

    /// Frobenius norm of S.
    pub fn frobenius(&self) -> f64 {
        self.entries.norm()
    }
}

/// det S(K) by pivoted elimination.
pub fn det_s(params: &PhysicalParams, phases: &PhaseConfig, k_value: Complex64) -> Complex64 {
    build_s(params, phases, k_value).det()
}

/// Numeric rank of S(K).
pub fn rank_s(params: &PhysicalParams, phases: &PhaseConfig, k_value: Complex64) -> usize {
    build_s(params, phases, k_value).rank()
}

/// Unit-norm amplitude vector (A1..A4) combining the four basis waves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientVector {
    a: [Complex64; 4],
}

impl CoefficientVector {
    /// Normalize to Euclidean length 1. Rejects the zero vector.
    pub fn from_components(a: [Complex64; 4]) -> Result<Self, DomainError> {
        let norm = a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm < 1e-200 {
            return Err(DomainError::ZeroCoefficients);
        }
        let mut out = a;
        for c in &mut out {
            *c /= norm;
        }
        Ok(CoefficientVector { a: out })
    }

    pub fn components(&self) -> [Complex64; 4] {
        self.a
    }

    pub fn component(&self, i: usize) -> Complex64 {
        self.a[i]
    }

    pub fn norm(&self) -> f64 {
        self.a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ||S A||_2; small iff A is numerically a null vector of S.
    pub fn residual_norm(&self, matrix: &BoundaryMatrix) -> f64 {
        let v = Vector4::from_row_slice(&self.a);
        (matrix.entries() * v).norm()
    }
}

/// Orthonormal null-space basis of S at a certified root.
///
/// Demands |det S| < ROOT_DET_TOL times the Hadamard row-scale and a
/// nonempty numeric null space; anything else earns a not-a-root error.
pub fn nullspace_a(
    params: &PhysicalParams,
    phases: &PhaseConfig,
    k_root: Complex64,
) -> Result<Vec<CoefficientVector>, DomainError> {
    let m = build_s(params, phases, k_root);
    let scale = m.hadamard_scale();
    let det_mag = m.det().norm();
    let tol = ROOT_DET_TOL * scale;
    if det_mag >= tol {
        return Err(DomainError::NotARoot { det_mag, tol });
    }
    let raw = m.null_basis();
    if raw.is_empty() {
        return Err(DomainError::NotARoot { det_mag, tol });
    }
    let mut out = Vec::with_capacity(raw.len());
    for b in raw {
        out.push(CoefficientVector::from_components(b)?);
    }
    Ok(out)
}

/// det S as a polynomial in K: c0 + c1 K + c2 K^2 + c3 K^3 + c4 K^4.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarticPoly {
    c: [Complex64; 5],
}

impl QuarticPoly {
    pub fn new(c: [Complex64; 5]) -> Self {
        QuarticPoly { c }
    }

    pub fn coeffs(&self) -> [Complex64; 5] {
        self.c
    }

    pub fn coeff(&self, j: usize) -> Complex64 {
        self.c[j]
    }

    /// Largest coefficient magnitude.
    pub fn norm_inf(&self) -> f64 {
        self.c.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation.
    pub fn eval(&self, k: Complex64) -> Complex64 {
        let mut acc = self.c[4];
        for j in (0..4).rev() {
            acc = acc * k + self.c[j];
        }
        acc
    }

    /// Value and derivative in one Horner pass.
    pub fn eval_with_derivative(&self, k: Complex64) -> (Complex64, Complex64) {
        let mut acc = self.c[4];
        let mut d = Complex64::new(0.0, 0.0);
        for j in (0..4).rev() {
            d = d * k + acc;
            acc = acc * k + self.c[j];
        }
        (acc, d)
    }

    /// Natural magnitude of an evaluation at |K| = r:
    /// sum of |c_j| r^j. Backward errors are judged against this.
    pub fn eval_scale(&self, k: Complex64) -> f64 {
        let r = k.norm();
        let mut scale = 0.0;
        let mut pw = 1.0;
        for c in &self.c {
            scale += c.norm() * pw;
            pw *= r;
        }
        scale
    }

    /// True when the odd coefficients vanish relative to the norm.
    pub fn is_even(&self, rel_tol: f64) -> bool {
        let s = self.norm_inf();
        self.c[1].norm() <= rel_tol * s && self.c[3].norm() <= rel_tol * s
    }
}

/// Sample points for the quartic fit; -2i is held out as the certifier.
pub const FIT_SAMPLES: [Complex64; 5] = [
    Complex64::new(0.0, 0.0),
    Complex64::new(1.0, 0.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(2.0, 0.0),
    Complex64::new(0.0, 1.0),
];

const CERTIFIER: Complex64 = Complex64::new(0.0, -2.0);

/// Fit det S(K) as a quartic from five samples and certify the fit on a
/// held-out sixth point. Certification failure signals a bug (det S is
/// a quartic in K by construction), never bad input.
pub fn quartic_from_samples(
    params: &PhysicalParams,
    phases: &PhaseConfig,
) -> Result<QuarticPoly, InternalError> {
    let mut vander = SMatrix::<Complex64, 5, 5>::zeros();
    let mut rhs = SVector::<Complex64, 5>::zeros();
    for (i, &k) in FIT_SAMPLES.iter().enumerate() {
        let mut pw = Complex64::new(1.0, 0.0);
        for j in 0..5 {
            vander[(i, j)] = pw;
            pw *= k;
        }
        rhs[i] = det_s(params, phases, k);
    }
    let solved = vander
        .lu()
        .solve(&rhs)
        .ok_or(InternalError::LinearSolve("quartic sample fit"))?;
    let q = QuarticPoly::new([solved[0], solved[1], solved[2], solved[3], solved[4]]);

    // reconstruction at the sample points
    for (i, &k) in FIT_SAMPLES.iter().enumerate() {
        let resid = (q.eval(k) - rhs[i]).norm();
        let tol = 1e-10 * (q.eval_scale(k) + rhs[i].norm()) + 1e-300;
        if resid >= tol {
            return Err(InternalError::QuarticCertification { residual: resid, tol });
        }
    }
    // degree certification at the held-out point
    let det_c = det_s(params, phases, CERTIFIER);
    let resid = (q.eval(CERTIFIER) - det_c).norm();
    let tol = 1e-9 * (q.eval_scale(CERTIFIER) + det_c.norm()) + 1e-300;
    if resid >= tol {
        return Err(InternalError::QuarticCertification { residual: resid, tol });
    }
    Ok(q)
}

/// Up to three guarded Newton steps; keeps the best iterate seen.
fn polish_root(q: &QuarticPoly, start: Complex64) -> Complex64 {
    let mut best = start;
    let mut best_res = q.eval(start).norm();
    let mut cur = start;
    for _ in 0..3 {
        let (v, dv) = q.eval_with_derivative(cur);
        if dv.norm() < 1e-290 {
            break;
        }
        cur -= v / dv;
        let res = q.eval(cur).norm();
        if res < best_res {
            best = cur;
            best_res = res;
        } else {
            break;
        }
    }
    best
}

/// Stable quadratic roots of a x^2 + b x + c with |disc| pre-computed.
fn quadratic_roots(a: Complex64, b: Complex64, c: Complex64) -> (Complex64, Complex64) {
    let disc = b * b - 4.0 * a * c;
    let s = disc.sqrt();
    // pick the sign that avoids cancellation in b + s
    let sign = if (b.conj() * s).re >= 0.0 { 1.0 } else { -1.0 };
    let qq = -0.5 * (b + sign * s);
    if qq.norm() == 0.0 {
        // b = 0 and disc = -4ac; symmetric pair
        let r = (-c / a).sqrt();
        (r, -r)
    } else {
        (qq / a, c / qq)
    }
}

const DK_MAX_SWEEPS: usize = 500;

/// Roots of q with multiplicity, deterministically ordered by
/// (re, im). Degree deflates when leading coefficients vanish
/// relative to the norm; a constant nonzero q yields no roots.
///
/// Bi-quadratics (the only shape the wall problem produces) go through
/// an exact quadratic solve in Lambda = K^2; general polynomials fall
/// back to a simultaneous-iteration solver. Every root is Newton
/// polished and its backward error certified against the coefficient
/// scale.
pub fn numeric_roots(q: &QuarticPoly) -> Result<Vec<Complex64>, InternalError> {
    let s = q.norm_inf();
    if s < 1e-250 {
        return Err(InternalError::DegenerateQuartic);
    }
    let rel = 1e-12 * s;
    let mut degree = 0;
    for j in (0..5).rev() {
        if q.coeff(j).norm() >= rel {
            degree = j;
            break;
        }
    }
    if degree == 0 {
        return Ok(Vec::new());
    }

    let mut roots: Vec<Complex64>;
    if degree == 4 && q.is_even(1e-12) {
        let a = q.coeff(4);
        let b = q.coeff(2);
        let c = q.coeff(0);
        let disc = b * b - 4.0 * a * c;
        let disc_scale = (b.norm() * b.norm()).max(4.0 * (a * c).norm());
        if disc.norm() < 1e-13 * disc_scale {
            // double root in Lambda; the midpoint -b/2a is then accurate
            // to rounding, while the split +-sqrt(disc) would not be
            let lam = -b / (2.0 * a);
            let r = lam.sqrt();
            roots = vec![r, -r, r, -r];
        } else {
            let (lam1, lam2) = quadratic_roots(a, b, c);
            let r1 = lam1.sqrt();
            let r2 = lam2.sqrt();
            roots = vec![r1, -r1, r2, -r2]
                .into_iter()
                .map(|r| polish_root(q, r))
                .collect();
        }
    } else {
        roots = durand_kerner(q, degree)?;
        roots = roots.into_iter().map(|r| polish_root(q, r)).collect();
    }

    for &r in &roots {
        let err = q.eval(r).norm();
        let tol = 1e-9 * q.eval_scale(r) + 1e-300;
        if err >= tol {
            return Err(InternalError::RootBackwardError { err, tol });
        }
    }
    roots.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).expect("finite roots"));
    Ok(roots)
}

/// Simultaneous root iteration on the monic deflated polynomial.
fn durand_kerner(q: &QuarticPoly, degree: usize) -> Result<Vec<Complex64>, InternalError> {
    let lead = q.coeff(degree);
    let monic: Vec<Complex64> = (0..=degree).map(|j| q.coeff(j) / lead).collect();
    let eval = |z: Complex64| -> Complex64 {
        let mut acc = monic[degree];
        for j in (0..degree).rev() {
            acc = acc * z + monic[j];
        }
        acc
    };
    let radius = 1.0 + monic.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let unit = seed / seed.norm();
    // distinct starts on a circle that bounds every root
    let mut z: Vec<Complex64> = (0..degree)
        .map(|j| unit.powu(j as u32 + 1) * radius)
        .collect();
    for _ in 0..DK_MAX_SWEEPS {
        let mut max_step: f64 = 0.0;
        for i in 0..degree {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..degree {
                if j != i {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() < 1e-290 {
                // coincident iterates; nudge apart deterministically
                z[i] += Complex64::new(1e-8 * radius, 1e-8 * radius);
                max_step = f64::MAX;
                continue;
            }
            let step = eval(z[i]) / denom;
            z[i] -= step;
            max_step = max_step.max(step.norm());
        }
        let spread = 1.0 + z.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if max_step < 1e-14 * spread {
            return Ok(z);
        }
        // multiple roots stall the sweep; accept once backward errors
        // are at the certification scale
        if max_step < 1e-7 * spread {
            let ok = z
                .iter()
                .all(|&v| q.eval(v).norm() < 1e-9 * q.eval_scale(v) + 1e-300);
            if ok {
                return Ok(z);
            }
        }
    }
    let ok = z
        .iter()
        .all(|&v| q.eval(v).norm() < 1e-9 * q.eval_scale(v) + 1e-300);
    if ok {
        Ok(z)
    } else {
        Err(InternalError::RootIteration(DK_MAX_SWEEPS))
    }
}
