//! Transverse profiles of a charged fermion in a uniform field.
//!
//! In the gauge where the vector potential grows linearly in y, the
//! transverse problem reduces to a shifted oscillator in the scaled
//! coordinate t = (p_x + B y) / sqrt(B). Level n contributes
//! lambda^2 = 2 n B to the dispersion, and the two spinor profiles are
//!
//!   f(y) = H_n(t) exp(-t^2/2)
//!   g(y) = (d/dy + (p_x + B y)) f = 2 n sqrt(B) H_{n-1}(t) exp(-t^2/2)
//!
//! with the physicists' Hermite polynomials H_n. The lowering identity
//! behind g makes g vanish identically at n = 0, which is why the
//! lowest level never populates the second and fourth spinor slots.

use crate::error::DomainError;

/// Hermite recurrences stay well inside f64 range up to this level.
pub const MAX_LEVEL: u32 = 64;

/// One transverse level: index n, field strength, and the conserved
/// transverse momentum component p_x.
///
/// Invariants: field > 0, n <= MAX_LEVEL, lambda_sq = 2 n B cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseMode {
    n: u32,
    field: f64,
    p_x: f64,
    lambda_sq: f64,
}

impl TransverseMode {
    pub fn new(n: u32, field: f64, p_x: f64) -> Result<Self, DomainError> {
        if !field.is_finite() || field <= 0.0 {
            return Err(DomainError::FieldNotPositive(field));
        }
        if !p_x.is_finite() {
            return Err(DomainError::InvalidTransverseMomentum(p_x));
        }
        if n > MAX_LEVEL {
            return Err(DomainError::LevelTooLarge {
                got: n,
                max: MAX_LEVEL,
            });
        }
        Ok(TransverseMode {
            n,
            field,
            p_x,
            lambda_sq: 2.0 * f64::from(n) * field,
        })
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn field(&self) -> f64 {
        self.field
    }

    pub fn transverse_momentum(&self) -> f64 {
        self.p_x
    }

    /// Transverse contribution lambda^2 = 2 n B to the dispersion.
    pub fn lambda_sq(&self) -> f64 {
        self.lambda_sq
    }

    /// Scaled coordinate t = (p_x + B y) / sqrt(B).
    pub fn scaled_coordinate(&self, y: f64) -> f64 {
        (self.p_x + self.field * y) * self.field.sqrt().recip()
    }

    /// Inverse of `scaled_coordinate`.
    pub fn y_from_scaled(&self, t: f64) -> f64 {
        (t * self.field.sqrt() - self.p_x) / self.field
    }

    /// Center of the Gaussian envelope, y with t = 0.
    pub fn guiding_center(&self) -> f64 {
        -self.p_x / self.field
    }
}

/// Physicists' Hermite polynomial H_n(t) by the three-term recurrence.
fn hermite(n: u32, t: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0 * t,
        _ => {
            let mut prev = 1.0;
            let mut cur = 2.0 * t;
            for j in 1..n {
                let next = 2.0 * t * cur - 2.0 * f64::from(j) * prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Upper-component profile f(y) = H_n(t) exp(-t^2 / 2).
pub fn eval_f(mode: &TransverseMode, y: f64) -> f64 {
    let t = mode.scaled_coordinate(y);
    hermite(mode.n, t) * (-0.5 * t * t).exp()
}

/// Lower-component profile g(y) = 2 n sqrt(B) H_{n-1}(t) exp(-t^2 / 2).
///
/// Identically zero at n = 0 (returned as exact 0.0, no rounding).
pub fn eval_g(mode: &TransverseMode, y: f64) -> f64 {
    if mode.n == 0 {
        return 0.0;
    }
    let t = mode.scaled_coordinate(y);
    2.0 * f64::from(mode.n) * mode.field.sqrt() * hermite(mode.n - 1, t) * (-0.5 * t * t).exp()
}

/// f scaled to unit L2 norm in the t coordinate,
/// dividing by sqrt(2^n n! sqrt(pi)).
pub fn eval_f_normalized(mode: &TransverseMode, y: f64) -> f64 {
    eval_f(mode, y) / norm_constant(mode.n)
}

/// sqrt of the squared t-norm of H_n(t) exp(-t^2/2).
fn norm_constant(n: u32) -> f64 {
    let mut sq = std::f64::consts::PI.sqrt();
    for j in 1..=n {
        sq *= 2.0 * f64::from(j);
    }
    sq.sqrt()
}

/// Dispersion at level n: epsilon = sqrt(mass^2 + k^2 + 2 n B).
pub fn energy_from_landau(mass: f64, k: f64, n: u32, field: f64) -> Result<f64, DomainError> {
    if !mass.is_finite() || mass <= 0.0 {
        return Err(DomainError::InvalidMass(mass));
    }
    if !k.is_finite() {
        return Err(DomainError::InvalidMomentum(k));
    }
    if !field.is_finite() || field < 0.0 {
        return Err(DomainError::FieldNegative(field));
    }
    if n > MAX_LEVEL {
        return Err(DomainError::LevelTooLarge {
            got: n,
            max: MAX_LEVEL,
        });
    }
    Ok((mass * mass + k * k + 2.0 * f64::from(n) * field).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn mode(n: u32, field: f64, p_x: f64) -> TransverseMode {
        TransverseMode::new(n, field, p_x).unwrap()
    }

    #[test]
    fn profiles_at_the_envelope_center() {
        // B = 1, p_x = 0 puts t = y
        let m0 = mode(0, 1.0, 0.0);
        assert_eq!(eval_f(&m0, 0.0), 1.0);
        assert_eq!(eval_g(&m0, 0.0), 0.0);

        let m1 = mode(1, 1.0, 0.0);
        assert_eq!(eval_f(&m1, 0.0), 0.0);
        assert_abs_diff_eq!(eval_g(&m1, 0.0), 2.0, epsilon = 1e-15);

        // H_2(1) = 4 - 2 = 2
        let m2 = mode(2, 1.0, 0.0);
        assert_abs_diff_eq!(eval_f(&m2, 1.0), 2.0 * (-0.5f64).exp(), epsilon = 1e-14);
    }

    #[test]
    fn scaled_coordinate_respects_the_gauge_shift() {
        let m = mode(3, 4.0, 1.0);
        assert_abs_diff_eq!(m.scaled_coordinate(0.25), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.y_from_scaled(1.0), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(m.guiding_center(), -0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(m.lambda_sq(), 24.0, epsilon = 1e-15);
    }

    #[test]
    fn dispersion_reference_points() {
        assert_abs_diff_eq!(energy_from_landau(1.0, 0.0, 0, 5.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(energy_from_landau(1.0, 1.0, 1, 1.0).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(energy_from_landau(3.0, 4.0, 0, 0.7).unwrap(), 5.0, epsilon = 1e-15);
    }

    #[test]
    fn constructor_rejects_bad_levels_and_fields() {
        assert!(matches!(
            TransverseMode::new(0, 0.0, 0.0),
            Err(DomainError::FieldNotPositive(_))
        ));
        assert!(matches!(
            TransverseMode::new(MAX_LEVEL + 1, 1.0, 0.0),
            Err(DomainError::LevelTooLarge { .. })
        ));
        assert!(matches!(
            energy_from_landau(1.0, 0.0, 0, -1.0),
            Err(DomainError::FieldNegative(_))
        ));
    }

    #[test]
    fn normalized_profiles_have_unit_t_norm() {
        // trapezoid quadrature in t; integrand decays like exp(-t^2)
        for n in 0..=8 {
            let m = mode(n, 0.77, 0.3);
            let pts = 4001;
            let (lo, hi) = (-12.0f64, 12.0f64);
            let h = (hi - lo) / (pts - 1) as f64;
            let mut sum = 0.0;
            for i in 0..pts {
                let t = lo + h * i as f64;
                let v = eval_f_normalized(&m, m.y_from_scaled(t));
                let w = if i == 0 || i == pts - 1 { 0.5 } else { 1.0 };
                sum += w * v * v * h;
            }
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn adjacent_levels_are_orthogonal() {
        let pts = 4001;
        let (lo, hi) = (-12.0f64, 12.0f64);
        let h = (hi - lo) / (pts - 1) as f64;
        for n in 0..=5u32 {
            let ma = mode(n, 1.3, -0.4);
            let mb = mode(n + 2, 1.3, -0.4);
            let mut sum = 0.0;
            for i in 0..pts {
                let t = lo + h * i as f64;
                let y = ma.y_from_scaled(t);
                let w = if i == 0 || i == pts - 1 { 0.5 } else { 1.0 };
                sum += w * eval_f_normalized(&ma, y) * eval_f_normalized(&mb, y) * h;
            }
            assert!(sum.abs() < 1e-10, "levels {} and {} overlap: {}", n, n + 2, sum);
        }
    }

    #[test]
    fn g_is_the_lowering_image_of_f() {
        // g must equal 2 n sqrt(B) H_{n-1} e^{-t^2/2}; cross-check against
        // a centered first derivative of f plus the gauge term.
        let m = mode(4, 0.9, 0.2);
        let hy = 1e-5 / m.field().sqrt();
        for i in 0..60 {
            let t = -5.9 + 0.2 * i as f64;
            let y = m.y_from_scaled(t);
            let df = (eval_f(&m, y + hy) - eval_f(&m, y - hy)) / (2.0 * hy);
            let expected = df + (m.transverse_momentum() + m.field() * y) * eval_f(&m, y);
            let scale = 1.0 + expected.abs();
            assert!(
                (eval_g(&m, y) - expected).abs() < 1e-5 * scale,
                "lowering identity broken at t = {t}"
            );
        }
    }

    proptest! {
        #[test]
        fn g_vanishes_identically_on_the_lowest_level(
            field in 0.05f64..5.0,
            p_x in -3.0f64..3.0,
            y in -8.0f64..8.0,
        ) {
            let m = mode(0, field, p_x);
            prop_assert_eq!(eval_g(&m, y), 0.0);
        }

        #[test]
        fn f_decays_far_from_the_guiding_center(
            n in 0u32..6,
            field in 0.2f64..3.0,
            p_x in -2.0f64..2.0,
        ) {
            let m = mode(n, field, p_x);
            let near = eval_f_normalized(&m, m.y_from_scaled(0.5)).abs();
            let far = eval_f_normalized(&m, m.y_from_scaled(11.0)).abs();
            prop_assert!(far < 1e-12 + near);
            prop_assert!(far < 1e-8);
        }
    }
}
