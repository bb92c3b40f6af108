//! Kinematics of a charged fermion in a slab threaded by a uniform field.
//!
//! The slab occupies |z| <= a with the field along z, taken in a gauge
//! where the vector potential depends on y only. Motion along z then
//! decouples: a state is labelled by the conserved energy, a transverse
//! momentum component p_x, and the longitudinal momentum k. The wall
//! condition mixes the two spin polarizations through the ratio
//! alpha = (energy + p) / mass and its reciprocal, where p is the
//! longitudinal momentum magnitude at the same energy.
//!
//! Wall reflection enters the algebra through four phase angles, one per
//! spin component per wall. The named variants tie these angles together
//! in fixed patterns; each pattern is generated by one to four free
//! angles. `PhaseConfig` stores both the generators and the four
//! expanded angles so downstream code never re-derives the pattern.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use crate::error::DomainError;

/// Reduce an angle to [0, 2 pi).
pub fn reduce_angle(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    // rem_euclid of a tiny negative can round up to TAU itself
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Longitudinal momentum magnitude p = sqrt(energy^2 - mass^2).
///
/// Requires mass > 0 and energy >= mass; energies below the gap would be
/// evanescent along z and are out of scope.
pub fn longitudinal_p(energy: f64, mass: f64) -> Result<f64, DomainError> {
    if !mass.is_finite() || mass <= 0.0 {
        return Err(DomainError::InvalidMass(mass));
    }
    if !energy.is_finite() || energy < mass {
        return Err(DomainError::EnergyNotAboveMass { energy, mass });
    }
    Ok((energy * energy - mass * mass).max(0.0).sqrt())
}

/// Polarization weight ratio alpha = (energy + p) / mass and beta = 1 / alpha.
///
/// beta equals (energy - p) / mass analytically; returning the exact
/// reciprocal keeps alpha * beta = 1 to the last bit, which the root
/// catalog relies on.
pub fn polarization_ratios(energy: f64, mass: f64) -> Result<(f64, f64), DomainError> {
    let p = longitudinal_p(energy, mass)?;
    let alpha = (energy + p) / mass;
    Ok((alpha, 1.0 / alpha))
}

/// Moebius image X = (alpha - x) / (1 - alpha x) of a phase factor x.
///
/// For alpha > 1 the map sends the unit circle to itself and is an
/// involution: applying it twice returns x. Requires alpha > 1; at
/// alpha = 1 the map degenerates to a constant.
pub fn mobius_x(alpha: f64, x: Complex64) -> Result<Complex64, DomainError> {
    if !alpha.is_finite() || alpha <= 1.0 {
        return Err(DomainError::RatioNotHyperbolic(alpha));
    }
    let den = Complex64::new(1.0, 0.0) - alpha * x;
    if den.norm() < 1e-12 * (1.0 + alpha) {
        return Err(DomainError::MobiusPole {
            alpha,
            denom: den.norm(),
        });
    }
    Ok((Complex64::new(alpha, 0.0) - x) / den)
}

/// Wall-phase variant label.
///
/// Families are named by how many free angles generate the four wall
/// phases. Indices run 1..=8, 1..=4 and 1..=6; the four-phase family has
/// a single member with all angles free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VariantId {
    OnePhase(u8),
    TwoPhase(u8),
    ThreePhase(u8),
    FourPhase,
}

impl VariantId {
    /// Every variant, in catalog order.
    pub fn all() -> Vec<VariantId> {
        let mut v = Vec::with_capacity(19);
        for i in 1..=8 {
            v.push(VariantId::OnePhase(i));
        }
        for i in 1..=4 {
            v.push(VariantId::TwoPhase(i));
        }
        for i in 1..=6 {
            v.push(VariantId::ThreePhase(i));
        }
        v.push(VariantId::FourPhase);
        v
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        let (family, index, max) = match *self {
            VariantId::OnePhase(i) => ("one-phase", i, 8),
            VariantId::TwoPhase(i) => ("two-phase", i, 4),
            VariantId::ThreePhase(i) => ("three-phase", i, 6),
            VariantId::FourPhase => return Ok(()),
        };
        if index < 1 || index > max {
            return Err(DomainError::VariantIndex { family, index, max });
        }
        Ok(())
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            VariantId::OnePhase(_) => "one-phase",
            VariantId::TwoPhase(_) => "two-phase",
            VariantId::ThreePhase(_) => "three-phase",
            VariantId::FourPhase => "four-phase",
        }
    }

    /// Number of free angles generating the four wall phases.
    pub fn generator_count(&self) -> usize {
        match self {
            VariantId::OnePhase(_) => 1,
            VariantId::TwoPhase(_) => 2,
            VariantId::ThreePhase(_) => 3,
            VariantId::FourPhase => 4,
        }
    }

    /// True when the determinant quartic factors through Lambda = K^2
    /// with configuration-dependent roots. The remaining variants pin
    /// K itself to fixed values or a single free square root.
    pub fn is_lambda_kind(&self) -> bool {
        !matches!(
            self,
            VariantId::OnePhase(1) | VariantId::TwoPhase(1) | VariantId::TwoPhase(2) | VariantId::TwoPhase(3)
        )
    }

    /// Sign pattern mapping generators to the four wall phases.
    /// Entry (g, s) at position j means phase_j = s * generator_g.
    fn pattern(&self) -> [(usize, i8); 4] {
        match *self {
            VariantId::OnePhase(1) => [(0, 1), (0, 1), (0, 1), (0, 1)],
            VariantId::OnePhase(2) => [(0, -1), (0, 1), (0, 1), (0, 1)],
            VariantId::OnePhase(3) => [(0, 1), (0, -1), (0, 1), (0, 1)],
            VariantId::OnePhase(4) => [(0, 1), (0, 1), (0, -1), (0, 1)],
            VariantId::OnePhase(5) => [(0, 1), (0, 1), (0, 1), (0, -1)],
            VariantId::OnePhase(6) => [(0, 1), (0, 1), (0, -1), (0, -1)],
            VariantId::OnePhase(7) => [(0, 1), (0, -1), (0, 1), (0, -1)],
            VariantId::OnePhase(8) => [(0, 1), (0, -1), (0, -1), (0, 1)],
            VariantId::TwoPhase(1) => [(0, 1), (0, 1), (1, 1), (1, 1)],
            VariantId::TwoPhase(2) => [(0, 1), (0, 1), (1, 1), (1, -1)],
            VariantId::TwoPhase(3) => [(0, 1), (0, -1), (1, 1), (1, 1)],
            VariantId::TwoPhase(4) => [(0, 1), (0, -1), (1, 1), (1, -1)],
            VariantId::ThreePhase(1) => [(0, 1), (0, 1), (1, 1), (2, 1)],
            VariantId::ThreePhase(2) => [(1, 1), (2, 1), (0, 1), (0, 1)],
            VariantId::ThreePhase(3) => [(0, 1), (1, 1), (0, 1), (2, 1)],
            VariantId::ThreePhase(4) => [(0, 1), (1, 1), (0, -1), (2, 1)],
            VariantId::ThreePhase(5) => [(0, 1), (1, 1), (2, 1), (0, 1)],
            VariantId::ThreePhase(6) => [(0, 1), (1, 1), (2, 1), (0, -1)],
            VariantId::FourPhase => [(0, 1), (1, 1), (2, 1), (3, 1)],
            _ => unreachable!("validated before use"),
        }
    }
}

impl fmt::Display for VariantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VariantId::OnePhase(i) => write!(f, "one-phase({i})"),
            VariantId::TwoPhase(i) => write!(f, "two-phase({i})"),
            VariantId::ThreePhase(i) => write!(f, "three-phase({i})"),
            VariantId::FourPhase => write!(f, "four-phase"),
        }
    }
}

/// The four wall phases (rho, mu, sigma, nu), reduced to [0, 2 pi),
/// together with the generators they were expanded from.
///
/// rho and sigma set the spin-up and spin-down reflection phases on the
/// wall at z = -a; mu and nu do the same at z = +a.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseConfig {
    rho: f64,
    mu: f64,
    sigma: f64,
    nu: f64,
    variant: VariantId,
    generators: [f64; 4],
}

impl PhaseConfig {
    /// Expand a variant's generator angles into the four wall phases.
    pub fn from_generators(variant: VariantId, generators: &[f64]) -> Result<Self, DomainError> {
        variant.validate()?;
        let expected = variant.generator_count();
        if generators.len() != expected {
            return Err(DomainError::GeneratorCount {
                family: variant.family_name(),
                expected,
                got: generators.len(),
            });
        }
        let mut gens = [0.0; 4];
        for (slot, &g) in gens.iter_mut().zip(generators) {
            if !g.is_finite() {
                return Err(DomainError::InvalidGenerator(g));
            }
            *slot = reduce_angle(g);
        }
        let pat = variant.pattern();
        let mut phases = [0.0; 4];
        for (phase, &(g, s)) in phases.iter_mut().zip(&pat) {
            *phase = reduce_angle(f64::from(s) * gens[g]);
        }
        Ok(PhaseConfig {
            rho: phases[0],
            mu: phases[1],
            sigma: phases[2],
            nu: phases[3],
            variant,
            generators: gens,
        })
    }

    /// All four phases free.
    pub fn general(rho: f64, mu: f64, sigma: f64, nu: f64) -> Result<Self, DomainError> {
        Self::from_generators(VariantId::FourPhase, &[rho, mu, sigma, nu])
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn variant(&self) -> VariantId {
        self.variant
    }

    /// The generator angles, reduced to [0, 2 pi).
    pub fn generators(&self) -> &[f64] {
        &self.generators[..self.variant.generator_count()]
    }

    /// Phase factors (e^{i rho}, e^{i mu}, e^{i sigma}, e^{i nu}).
    pub fn unit_values(&self) -> [Complex64; 4] {
        [
            Complex64::from_polar(1.0, self.rho),
            Complex64::from_polar(1.0, self.mu),
            Complex64::from_polar(1.0, self.sigma),
            Complex64::from_polar(1.0, self.nu),
        ]
    }

    /// Phase factors of the generators, e^{i g}.
    pub fn generator_units(&self) -> Vec<Complex64> {
        self.generators()
            .iter()
            .map(|&g| Complex64::from_polar(1.0, g))
            .collect()
    }
}

/// Kinematic data for one slab state.
///
/// Invariants established at construction: mass > 0, energy > mass,
/// field >= 0, slab half-width > 0, all components finite. The derived
/// longitudinal magnitude p, along with alpha and beta = 1/alpha, are
/// cached so every consumer sees identical values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    mass: f64,
    energy: f64,
    transverse_momentum: f64,
    field: f64,
    slab_half_width: f64,
    k: f64,
    p: f64,
    alpha: f64,
    beta: f64,
}

impl PhysicalParams {
    pub fn new(
        mass: f64,
        energy: f64,
        transverse_momentum: f64,
        field: f64,
        slab_half_width: f64,
        longitudinal_momentum: f64,
    ) -> Result<Self, DomainError> {
        if !mass.is_finite() || mass <= 0.0 {
            return Err(DomainError::InvalidMass(mass));
        }
        if !energy.is_finite() || energy <= mass {
            return Err(DomainError::EnergyNotAboveMass { energy, mass });
        }
        if !transverse_momentum.is_finite() {
            return Err(DomainError::InvalidTransverseMomentum(transverse_momentum));
        }
        if !field.is_finite() || field < 0.0 {
            return Err(DomainError::FieldNegative(field));
        }
        if !slab_half_width.is_finite() || slab_half_width <= 0.0 {
            return Err(DomainError::HalfWidthNotPositive(slab_half_width));
        }
        if !longitudinal_momentum.is_finite() {
            return Err(DomainError::InvalidMomentum(longitudinal_momentum));
        }
        let p = longitudinal_p(energy, mass)?;
        let (alpha, beta) = polarization_ratios(energy, mass)?;
        Ok(PhysicalParams {
            mass,
            energy,
            transverse_momentum,
            field,
            slab_half_width,
            k: longitudinal_momentum,
            p,
            alpha,
            beta,
        })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn transverse_momentum(&self) -> f64 {
        self.transverse_momentum
    }

    pub fn field(&self) -> f64 {
        self.field
    }

    pub fn slab_half_width(&self) -> f64 {
        self.slab_half_width
    }

    /// Longitudinal momentum k (signed; the catalog requires k > 0).
    pub fn k(&self) -> f64 {
        self.k
    }

    /// Longitudinal magnitude p = sqrt(energy^2 - mass^2).
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn longitudinal_p_matches_known_values() {
        assert_abs_diff_eq!(longitudinal_p(2f64.sqrt(), 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(longitudinal_p(5.0, 3.0).unwrap(), 4.0, epsilon = 1e-14);
        assert_eq!(longitudinal_p(1.5, 1.5).unwrap(), 0.0);
    }

    #[test]
    fn longitudinal_p_rejects_bad_regimes() {
        assert!(matches!(
            longitudinal_p(0.9, 1.0),
            Err(DomainError::EnergyNotAboveMass { .. })
        ));
        assert!(matches!(longitudinal_p(1.0, 0.0), Err(DomainError::InvalidMass(_))));
        assert!(matches!(longitudinal_p(1.0, -2.0), Err(DomainError::InvalidMass(_))));
        assert!(matches!(
            longitudinal_p(f64::NAN, 1.0),
            Err(DomainError::EnergyNotAboveMass { .. })
        ));
    }

    #[test]
    fn polarization_ratio_at_sqrt_two() {
        let (alpha, beta) = polarization_ratios(2f64.sqrt(), 1.0).unwrap();
        assert_abs_diff_eq!(alpha, 1.0 + 2f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(beta, 2f64.sqrt() - 1.0, epsilon = 1e-14);
        assert_eq!(alpha * beta, alpha * (1.0 / alpha));
    }

    #[test]
    fn mobius_fixed_points_and_reference_value() {
        let one = Complex64::new(1.0, 0.0);
        assert_abs_diff_eq!(mobius_x(2.0, one).unwrap().re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(mobius_x(2.0, -one).unwrap().re, 1.0, epsilon = 1e-15);
        let x = mobius_x(2.0, Complex64::new(0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(x.re, 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(x.im, 0.6, epsilon = 1e-15);
    }

    #[test]
    fn mobius_rejects_non_hyperbolic_ratio() {
        let x = Complex64::new(0.0, 1.0);
        assert!(matches!(mobius_x(1.0, x), Err(DomainError::RatioNotHyperbolic(_))));
        assert!(matches!(mobius_x(0.3, x), Err(DomainError::RatioNotHyperbolic(_))));
    }

    #[test]
    fn phase_patterns_expand_with_documented_signs() {
        let c = PhaseConfig::from_generators(VariantId::OnePhase(2), &[0.3]).unwrap();
        assert_abs_diff_eq!(c.rho(), TAU - 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(c.mu(), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(c.sigma(), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(c.nu(), 0.3, epsilon = 1e-15);

        let c = PhaseConfig::from_generators(VariantId::TwoPhase(4), &[0.5, 1.1]).unwrap();
        assert_abs_diff_eq!(c.rho(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(c.mu(), TAU - 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(c.sigma(), 1.1, epsilon = 1e-15);
        assert_abs_diff_eq!(c.nu(), TAU - 1.1, epsilon = 1e-15);

        let c = PhaseConfig::from_generators(VariantId::ThreePhase(2), &[0.2, 0.7, 1.9]).unwrap();
        assert_abs_diff_eq!(c.rho(), 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(c.mu(), 1.9, epsilon = 1e-15);
        assert_abs_diff_eq!(c.sigma(), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(c.nu(), 0.2, epsilon = 1e-15);

        let c = PhaseConfig::from_generators(VariantId::ThreePhase(6), &[0.2, 0.7, 1.9]).unwrap();
        assert_abs_diff_eq!(c.nu(), TAU - 0.2, epsilon = 1e-15);
    }

    #[test]
    fn phase_config_validates_shape() {
        assert!(matches!(
            PhaseConfig::from_generators(VariantId::OnePhase(1), &[0.1, 0.2]),
            Err(DomainError::GeneratorCount { .. })
        ));
        assert!(matches!(
            PhaseConfig::from_generators(VariantId::OnePhase(9), &[0.1]),
            Err(DomainError::VariantIndex { .. })
        ));
        assert!(matches!(
            PhaseConfig::from_generators(VariantId::TwoPhase(0), &[0.1, 0.2]),
            Err(DomainError::VariantIndex { .. })
        ));
        assert!(matches!(
            PhaseConfig::from_generators(VariantId::OnePhase(1), &[f64::INFINITY]),
            Err(DomainError::InvalidGenerator(_))
        ));
    }

    #[test]
    fn params_reject_threshold_energy() {
        assert!(matches!(
            PhysicalParams::new(1.0, 1.0, 0.0, 1.0, 1.0, 0.5),
            Err(DomainError::EnergyNotAboveMass { .. })
        ));
        assert!(matches!(
            PhysicalParams::new(1.0, 2.0, 0.0, -1.0, 1.0, 0.5),
            Err(DomainError::FieldNegative(_))
        ));
        assert!(matches!(
            PhysicalParams::new(1.0, 2.0, 0.0, 1.0, 0.0, 0.5),
            Err(DomainError::HalfWidthNotPositive(_))
        ));
    }

    #[test]
    fn params_cache_consistent_derived_values() {
        let p = PhysicalParams::new(1.5, 2.5, 0.3, 0.8, 1.2, 0.9).unwrap();
        assert_abs_diff_eq!(p.p(), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p.alpha(), 3.0, epsilon = 1e-14);
        assert_eq!(p.beta(), 1.0 / p.alpha());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn ratios_are_exact_reciprocals(mass in 0.1f64..10.0, gap in 1e-9f64..50.0) {
            let (alpha, beta) = polarization_ratios(mass + gap, mass).unwrap();
            prop_assert!(alpha >= 1.0);
            prop_assert!((alpha * beta - 1.0).abs() < 1e-15);
        }

        #[test]
        fn mobius_preserves_the_circle_and_involutes(
            alpha in 1.0001f64..50.0,
            angle in 0.0f64..TAU,
        ) {
            let x = Complex64::from_polar(1.0, angle);
            let big_x = mobius_x(alpha, x).unwrap();
            prop_assert!((big_x.norm() - 1.0).abs() < 1e-12);
            let back = mobius_x(alpha, big_x).unwrap();
            prop_assert!((back - x).norm() < 1e-9);
            let conj_image = mobius_x(alpha, x.conj()).unwrap();
            prop_assert!((conj_image - big_x.conj()).norm() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn reduced_angles_stay_in_range(a in -1e6f64..1e6) {
            let r = reduce_angle(a);
            prop_assert!((0.0..TAU).contains(&r));
        }
    }
}
