//! Explicit spinor profiles inside the slab and their longitudinal
//! current.
//!
//! A mode is a four-component combination of the +k and -k traveling
//! solutions, weighted by a coefficient vector A from the null space of
//! the boundary matrix. With c() = e^(+ikz), c'() = e^(-ikz) and the
//! transverse envelopes f, g:
//!
//! ```text
//! Phi_1 / f = c (A1 + A2)             + c' (A3 + A4)
//! Phi_3 / f = c (alpha A1 + beta A2)  + c' (alpha A3 + beta A4)
//! Phi_2 / g = c (A1/(k-p) + A2/(k+p)) - c' (A3/(k+p) + A4/(k-p))
//! Phi_4 / g = c (alpha A1/(k-p) + beta A2/(k+p))
//!             - c' (alpha A3/(k+p) + beta A4/(k-p))
//! ```
//!
//! Note the swap of the (k-p) and (k+p) weights between the +k and -k
//! pieces; the wall-current checks below are the arbiter that this is
//! the consistent convention. The overall e^(-i eps t) e^(i p_x x)
//! factor is dropped; the current
//!
//! ```text
//! J^z = (|Phi_1|^2 - |Phi_3|^2) - (|Phi_2|^2 - |Phi_4|^2)
//! ```
//!
//! does not feel it. Certified modes (unit-modulus root, vanishing
//! determinant, null coefficients, consistent dispersion, and a
//! half-width that actually quantizes the root) drive J^z to zero on
//! both walls; `boundary_residual` measures how well.

use num_complex::Complex64;

use crate::boundary::{build_s, CoefficientVector};
use crate::error::DomainError;
use crate::params::{reduce_angle, PhaseConfig, PhysicalParams};
use crate::transverse::{eval_f, eval_g, TransverseMode};

/// Relative tolerance for the certification gates.
const CERT_TOL: f64 = 1e-8;

/// A slab eigenmode candidate: kinematics, wall phases, the boundary
/// root it quantizes, its coefficient vector, and the transverse level.
#[derive(Debug, Clone)]
pub struct SlabMode {
    params: PhysicalParams,
    phases: PhaseConfig,
    k_root: Complex64,
    coeffs: CoefficientVector,
    transverse: TransverseMode,
}

/// Wall-current summary over a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryReport {
    /// max wall |J^z| over max interior |J^z|, or over the mode's
    /// norm scale when the interior current vanishes identically.
    pub residual: f64,
    /// True when the interior current was below noise and the norm
    /// scale was used as the denominator.
    pub interior_current_vanishes: bool,
    /// True on the lowest transverse level, where Phi_2 = Phi_4 = 0.
    pub spin_down_zero: bool,
}

/// Smallest half-width a > 0 with e^(2ika) equal to the root.
pub fn quantizing_half_width(k_root: Complex64, k: f64) -> Result<f64, DomainError> {
    if !(k.is_finite() && k > 0.0) {
        return Err(DomainError::MomentumNotPositive(k));
    }
    Ok((reduce_angle(k_root.arg()) + std::f64::consts::TAU) / (2.0 * k))
}

impl SlabMode {
    /// Build a mode and certify every invariant: |K| = 1, e^(2ika) = K,
    /// det S(K) below the Hadamard-scaled floor, S A below the
    /// Frobenius-scaled floor, and the level consistent with the
    /// dispersion eps^2 = M^2 + k^2 + 2nB.
    pub fn certified(
        params: PhysicalParams,
        phases: PhaseConfig,
        k_root: Complex64,
        coeffs: CoefficientVector,
        level: u32,
    ) -> Result<Self, DomainError> {
        let k = params.k();
        if k <= 0.0 {
            return Err(DomainError::MomentumNotPositive(k));
        }
        let transverse = TransverseMode::new(level, params.field(), params.transverse_momentum())?;

        let modulus_dev = (k_root.norm() - 1.0).abs();
        if modulus_dev >= 1e-10 {
            return Err(DomainError::RootNotUnitModulus(modulus_dev));
        }

        let round_trip = Complex64::from_polar(1.0, 2.0 * k * params.slab_half_width());
        let rt_dev = (round_trip - k_root).norm();
        if rt_dev >= CERT_TOL {
            return Err(DomainError::RoundTripMismatch {
                deviation: rt_dev,
                tol: CERT_TOL,
            });
        }

        let matrix = build_s(&params, &phases, k_root);
        let det_mag = matrix.det().norm();
        let det_tol = CERT_TOL * matrix.hadamard_scale();
        if det_mag >= det_tol {
            return Err(DomainError::NotARoot {
                det_mag,
                tol: det_tol,
            });
        }

        let residual = coeffs.residual_norm(&matrix);
        let null_tol = CERT_TOL * matrix.frobenius();
        if residual >= null_tol {
            return Err(DomainError::NotANullVector {
                residual,
                tol: null_tol,
            });
        }

        let eps = params.energy();
        let required = eps * eps - params.mass() * params.mass() - k * k;
        let lambda_sq = transverse.lambda_sq();
        if (lambda_sq - required).abs() > CERT_TOL * (eps * eps).max(1.0) {
            return Err(DomainError::TransverseMismatch {
                lambda_sq,
                required,
            });
        }

        Ok(SlabMode {
            params,
            phases,
            k_root,
            coeffs,
            transverse,
        })
    }

    /// Build a mode without certification, for diagnostics and
    /// counterexamples. Wall-current claims hold only for certified
    /// modes.
    pub fn unverified(
        params: PhysicalParams,
        phases: PhaseConfig,
        k_root: Complex64,
        coeffs: CoefficientVector,
        level: u32,
    ) -> Result<Self, DomainError> {
        let transverse = TransverseMode::new(level, params.field(), params.transverse_momentum())?;
        Ok(SlabMode {
            params,
            phases,
            k_root,
            coeffs,
            transverse,
        })
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn phases(&self) -> &PhaseConfig {
        &self.phases
    }

    pub fn k_root(&self) -> Complex64 {
        self.k_root
    }

    pub fn coefficients(&self) -> &CoefficientVector {
        &self.coeffs
    }

    pub fn transverse(&self) -> &TransverseMode {
        &self.transverse
    }

    /// The four components (Phi_1, Phi_2, Phi_3, Phi_4) at a point.
    pub fn assemble_phi(&self, y: f64, z: f64) -> Result<[Complex64; 4], DomainError> {
        let a_slab = self.params.slab_half_width();
        if !z.is_finite() || z.abs() > a_slab {
            return Err(DomainError::OutsideSlab {
                z,
                half_width: a_slab,
            });
        }
        let k = self.params.k();
        let p = self.params.p();
        let alpha = self.params.alpha();
        let beta = self.params.beta();
        let [a1, a2, a3, a4] = self.coeffs.components();
        let cp = Complex64::from_polar(1.0, k * z);
        let cm = Complex64::from_polar(1.0, -k * z);

        let f = eval_f(&self.transverse, y);
        let phi1 = f * (cp * (a1 + a2) + cm * (a3 + a4));
        let phi3 = f * (cp * (alpha * a1 + beta * a2) + cm * (alpha * a3 + beta * a4));

        let (phi2, phi4) = if self.transverse.level() == 0 {
            // g vanishes identically on the lowest level; the singular
            // k = p weights are never touched
            (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
        } else {
            let wm = k - p;
            let wp = k + p;
            if wm.abs() < 1e-12 * wp {
                return Err(DomainError::SingularWeights {
                    gap: wm.abs(),
                    level: self.transverse.level(),
                });
            }
            let g = eval_g(&self.transverse, y);
            let phi2 = g * (cp * (a1 / wm + a2 / wp) - cm * (a3 / wp + a4 / wm));
            let phi4 = g
                * (cp * (alpha * a1 / wm + beta * a2 / wp)
                    - cm * (alpha * a3 / wp + beta * a4 / wm));
            (phi2, phi4)
        };
        Ok([phi1, phi2, phi3, phi4])
    }

    /// Longitudinal current J^z at a point.
    pub fn current_jz(&self, y: f64, z: f64) -> Result<f64, DomainError> {
        let [phi1, phi2, phi3, phi4] = self.assemble_phi(y, z)?;
        Ok((phi1.norm_sqr() - phi3.norm_sqr()) - (phi2.norm_sqr() - phi4.norm_sqr()))
    }

    /// Wall current relative to the interior current (or to the mode's
    /// norm scale when the interior is quiet; see the flag).
    pub fn boundary_residual(&self, y_grid: &[f64]) -> Result<BoundaryReport, DomainError> {
        if y_grid.is_empty() {
            return Err(DomainError::EmptyGrid);
        }
        let a_slab = self.params.slab_half_width();
        let mut wall_max: f64 = 0.0;
        let mut interior_max: f64 = 0.0;
        let mut norm_scale: f64 = 0.0;

        let mut visit = |z: f64, wall: bool, this: &Self| -> Result<(), DomainError> {
            for &y in y_grid {
                let phi = this.assemble_phi(y, z)?;
                let jz = (phi[0].norm_sqr() - phi[2].norm_sqr())
                    - (phi[1].norm_sqr() - phi[3].norm_sqr());
                let density: f64 = phi.iter().map(|c| c.norm_sqr()).sum();
                norm_scale = norm_scale.max(density);
                if wall {
                    wall_max = wall_max.max(jz.abs());
                } else {
                    interior_max = interior_max.max(jz.abs());
                }
            }
            Ok(())
        };

        visit(-a_slab, true, self)?;
        visit(a_slab, true, self)?;
        for j in 0..9 {
            let z = -0.8 * a_slab + 1.6 * a_slab * (j as f64) / 8.0;
            visit(z, false, self)?;
        }

        let floor = 1e-300_f64;
        let interior_quiet = interior_max <= 1e-12 * norm_scale;
        let residual = if interior_quiet {
            wall_max / norm_scale.max(floor)
        } else {
            wall_max / interior_max.max(floor)
        };
        Ok(BoundaryReport {
            residual,
            interior_current_vanishes: interior_quiet,
            spin_down_zero: self.transverse.level() == 0,
        })
    }

    /// Largest deviation of the defining wall conditions
    /// Phi_3 = e^(i rho|mu) Phi_1 and Phi_4 = e^(i sigma|nu) Phi_2 over
    /// the grid, relative to the peak spinor norm of the mode.
    ///
    /// The scale samples the interior as well as the walls: standing
    /// waves with wall nodes are legitimate modes, and measuring them
    /// against the wall amplitude alone would divide noise by noise.
    pub fn wall_phase_deviation(&self, y_grid: &[f64]) -> Result<f64, DomainError> {
        if y_grid.is_empty() {
            return Err(DomainError::EmptyGrid);
        }
        let a_slab = self.params.slab_half_width();
        let walls = [
            (-a_slab, self.phases.rho(), self.phases.sigma()),
            (a_slab, self.phases.mu(), self.phases.nu()),
        ];
        let mut dev: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (z, up, down) in walls {
            let xu = Complex64::from_polar(1.0, up);
            let xd = Complex64::from_polar(1.0, down);
            for &y in y_grid {
                let [phi1, phi2, phi3, phi4] = self.assemble_phi(y, z)?;
                let norm = (phi1.norm_sqr() + phi2.norm_sqr() + phi3.norm_sqr()
                    + phi4.norm_sqr())
                .sqrt();
                scale = scale.max(norm);
                dev = dev.max((phi3 - xu * phi1).norm());
                dev = dev.max((phi4 - xd * phi2).norm());
            }
        }
        for j in 0..9 {
            let z = -0.8 * a_slab + 1.6 * a_slab * (j as f64) / 8.0;
            for &y in y_grid {
                let phi = self.assemble_phi(y, z)?;
                let norm = phi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                scale = scale.max(norm);
            }
        }
        Ok(dev / scale.max(1e-300))
    }

    /// 41 sample points spanning t in [-6, 6] in the scaled transverse
    /// coordinate, covering the Gaussian support of low levels.
    pub fn default_y_grid(&self) -> Vec<f64> {
        default_y_grid(&self.transverse)
    }
}

/// See [`SlabMode::default_y_grid`].
pub fn default_y_grid(transverse: &TransverseMode) -> Vec<f64> {
    (0..41)
        .map(|i| {
            let t = -6.0 + 12.0 * (i as f64) / 40.0;
            transverse.y_from_scaled(t)
        })
        .collect()
}
