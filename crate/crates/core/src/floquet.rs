//! One-period propagators and quasi-energies of the flux-driven lab-frame
//! Hamiltonian, used to check the rotating-frame shifts without the
//! rotating-wave approximation.

use std::f64::consts::TAU;

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{annihilation, CMatrix, CompositeSpace};
use crate::model::{Level, PumpSpec, Qubit, SystemSpec};
use crate::spectra::diagonalize;

pub const DEFAULT_STEPS: usize = 1024;
pub const MIN_STEPS: usize = 256;
/// Unitarity residual above which a propagator is rejected.
pub const UNITARITY_LIMIT: f64 = 1e-6;
/// Geometric amplitude levels used to follow branches from zero drive.
pub const CONTINUATION_LEVELS: usize = 10;

/// A Hamiltonian with `H(t + T) = H(t)`.
pub trait TimePeriodic {
    fn dim(&self) -> usize;
    fn period(&self) -> f64;
    fn hamiltonian_at(&self, t: f64) -> CMatrix;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Exact exponential of `H` at each step midpoint.
    #[default]
    Midpoint,
    /// Fourth-order commutator-free scheme with two exponentials per step on
    /// the Gauss-Legendre nodes.
    CommutatorFree4,
}

/// Pumped transmon plus cavity under `phi(t) = phi_s + dphi sin(omega_p t + theta)`.
/// The spectator transmon is dropped.
#[derive(Debug, Clone)]
pub struct PeriodicHamiltonian {
    sys: SystemSpec,
    pump: PumpSpec,
    phase: f64,
    space: CompositeSpace,
    qubit_n: Vec<f64>,
    cavity_n: Vec<f64>,
    kerr: Vec<f64>,
    coupling: CMatrix,
}

impl PeriodicHamiltonian {
    pub fn new(sys: &SystemSpec, pump: &PumpSpec) -> Result<Self> {
        pump.validate()?;
        let qubit = sys.qubit(pump.target);
        let space = CompositeSpace::new(vec![qubit.dim, sys.cavity.dim])?;
        let n = space.total_dim();
        let occ: Vec<Vec<usize>> = (0..n).map(|i| space.occupations(i)).collect();
        let qubit_n: Vec<f64> = occ.iter().map(|o| o[0] as f64).collect();
        let cavity_n: Vec<f64> = occ.iter().map(|o| o[1] as f64).collect();
        let kerr = qubit_n
            .iter()
            .map(|&m| 0.5 * qubit.anharmonicity * m * (m - 1.0))
            .collect();
        let x = |dim: usize| -> Result<CMatrix> {
            let a = annihilation(dim)?.into_matrix();
            Ok(&a + a.adjoint())
        };
        let coupling = space.embed_matrix(&x(qubit.dim)?, 0)? * space.embed_matrix(&x(sys.cavity.dim)?, 1)?;
        Ok(Self {
            sys: sys.clone(),
            pump: pump.clone(),
            phase: 0.0,
            space,
            qubit_n,
            cavity_n,
            kerr,
            coupling,
        })
    }

    /// Shift the drive phase; `theta = pi` is the same drive with the
    /// amplitude sign reversed.
    pub fn with_phase(mut self, theta: f64) -> Self {
        self.phase = theta;
        self
    }

    pub fn pump(&self) -> &PumpSpec {
        &self.pump
    }

    pub fn target(&self) -> Qubit {
        self.pump.target
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    /// Flat index of `|level, photons>`.
    pub fn index(&self, level: usize, photons: usize) -> Result<usize> {
        self.space.index(&[level, photons])
    }

    pub fn flux(&self, t: f64) -> f64 {
        self.sys.static_flux + self.pump.amplitude * (self.pump.frequency * t + self.phase).sin()
    }

    pub fn hamiltonian_at_flux(&self, phi: f64) -> CMatrix {
        let wq = self.sys.qubit(self.pump.target).frequency(phi);
        let wc = self.sys.cavity.frequency(phi);
        let g = self.sys.coupler.static_coupling(self.pump.target, phi);
        let diag = DVector::from_iterator(
            self.qubit_n.len(),
            (0..self.qubit_n.len())
                .map(|i| Complex64::new(wq * self.qubit_n[i] + self.kerr[i] + wc * self.cavity_n[i], 0.0)),
        );
        CMatrix::from_diagonal(&diag) + &self.coupling * Complex64::new(g, 0.0)
    }

    /// `H` at the static bias.
    pub fn static_hamiltonian(&self) -> CMatrix {
        self.hamiltonian_at_flux(self.sys.static_flux)
    }
}

impl TimePeriodic for PeriodicHamiltonian {
    fn dim(&self) -> usize {
        self.space.total_dim()
    }

    fn period(&self) -> f64 {
        TAU / self.pump.frequency
    }

    fn hamiltonian_at(&self, t: f64) -> CMatrix {
        self.hamiltonian_at_flux(self.flux(t))
    }
}

/// `exp(-i H dt)` through the Hermitian eigendecomposition.
fn expm_hermitian(h: &CMatrix, dt: f64) -> CMatrix {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, -l * dt)),
    );
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    scaled * v.adjoint()
}

/// Frobenius norm of `U^dagger U - I`.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - CMatrix::identity(n, n)).norm()
}

/// `U(T)` from `steps` piecewise exponentials.
pub fn one_period_propagator<P: TimePeriodic + ?Sized>(p: &P, steps: usize, scheme: Scheme) -> Result<CMatrix> {
    propagate(p, p.period(), steps, scheme)
}

/// `U(t)` from `0` to `t` with `steps` piecewise exponentials.
pub fn propagate<P: TimePeriodic + ?Sized>(p: &P, t: f64, steps: usize, scheme: Scheme) -> Result<CMatrix> {
    if steps < MIN_STEPS {
        return Err(Error::param("steps", format!("need at least {MIN_STEPS} time steps")));
    }
    let n = p.dim();
    let h = t / steps as f64;

    let h0 = p.hamiltonian_at(0.0);
    let e = SymmetricEigen::new(h0).eigenvalues;
    let spread = e.max() - e.min();
    if spread * h > 0.1 {
        log::debug!("spectral width x step = {:.3} exceeds 0.1", spread * h);
    }

    let s3 = 3.0_f64.sqrt();
    let (c1, c2) = (0.5 - s3 / 6.0, 0.5 + s3 / 6.0);
    let (a1, a2) = ((3.0 - 2.0 * s3) / 12.0, (3.0 + 2.0 * s3) / 12.0);
    let mut u = CMatrix::identity(n, n);
    for k in 0..steps {
        let t0 = k as f64 * h;
        u = match scheme {
            Scheme::Midpoint => expm_hermitian(&p.hamiltonian_at(t0 + 0.5 * h), h) * u,
            Scheme::CommutatorFree4 => {
                let h1 = p.hamiltonian_at(t0 + c1 * h);
                let h2 = p.hamiltonian_at(t0 + c2 * h);
                let first = &h1 * Complex64::new(a2, 0.0) + &h2 * Complex64::new(a1, 0.0);
                let second = &h1 * Complex64::new(a1, 0.0) + &h2 * Complex64::new(a2, 0.0);
                expm_hermitian(&second, h) * expm_hermitian(&first, h) * u
            }
        };
    }
    let residual = unitarity_residual(&u);
    if residual > UNITARITY_LIMIT {
        return Err(Error::Tolerance {
            what: format!("unitarity residual with {steps} steps (increase the step count)"),
            value: residual,
            limit: UNITARITY_LIMIT,
        });
    }
    Ok(u)
}

/// Fold into `(-omega/2, omega/2]`.
pub fn fold(eps: f64, omega: f64) -> f64 {
    let mut r = eps - omega * (eps / omega).round();
    if r <= -0.5 * omega {
        r += omega;
    } else if r > 0.5 * omega {
        r -= omega;
    }
    r
}

/// Representative of `eps` modulo `omega` nearest to `reference`.
pub fn unfold(eps: f64, omega: f64, reference: f64) -> f64 {
    eps + omega * ((reference - eps) / omega).round()
}

#[derive(Debug, Clone)]
pub struct QuasiEnergySpectrum {
    /// Drive angular frequency `2 pi / T`.
    pub omega: f64,
    /// Folded quasi-energies, in the order of the columns of `vectors`.
    pub energies: Vec<f64>,
    /// Floquet states at `t = 0`.
    pub vectors: CMatrix,
}

/// Eigenphases of a one-period propagator as quasi-energies.
pub fn quasienergies(u: &CMatrix, period: f64) -> Result<QuasiEnergySpectrum> {
    let (rows, cols) = u.shape();
    if rows != cols {
        return Err(Error::NonSquare { rows, cols });
    }
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::param("period", "must be positive"));
    }
    let residual = unitarity_residual(u);
    if residual > UNITARITY_LIMIT {
        return Err(Error::Tolerance {
            what: "unitarity residual of the propagator".into(),
            value: residual,
            limit: UNITARITY_LIMIT,
        });
    }
    let (q, t) = u.clone().schur().unpack();
    let lambda: Vec<Complex64> = (0..rows).map(|j| t[(j, j)]).collect();

    // for a normal matrix the Schur vectors are eigenvectors
    let mut defect = 0.0_f64;
    for (j, l) in lambda.iter().enumerate() {
        defect = defect.max((u * q.column(j) - q.column(j) * *l).norm());
    }
    if defect > 1e-8 {
        return Err(Error::Tolerance {
            what: "Floquet eigenvector residual".into(),
            value: defect,
            limit: 1e-8,
        });
    }

    let omega = TAU / period;
    let energies = lambda.iter().map(|l| fold(-l.arg() / period, omega)).collect();
    Ok(QuasiEnergySpectrum {
        omega,
        energies,
        vectors: q,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetOptions {
    pub steps: usize,
    pub scheme: Scheme,
    pub continuation_levels: usize,
    /// Drive phase offset, see [`PeriodicHamiltonian::with_phase`].
    pub phase: f64,
}

impl Default for FloquetOptions {
    fn default() -> Self {
        Self {
            steps: DEFAULT_STEPS,
            scheme: Scheme::Midpoint,
            continuation_levels: CONTINUATION_LEVELS,
            phase: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloquetChi {
    /// `chi` from unfolded quasi-energies at the requested amplitude.
    pub chi: f64,
    /// `chi` of the undriven lab-frame Hamiltonian.
    pub chi_static: f64,
    /// Unfolded quasi-energies of `|g,0>, |g,1>, |e,0>, |e,1>`.
    pub energies: [f64; 4],
    /// Smallest overlap accepted while following the branches.
    pub min_overlap: f64,
}

/// `chi = ([eps(e,1) - eps(e,0)] - [eps(g,1) - eps(g,0)]) / 2` with the four
/// branches followed from the static dressed states through a geometric
/// amplitude ladder.
pub fn floquet_chi(sys: &SystemSpec, pump: &PumpSpec, opts: &FloquetOptions) -> Result<FloquetChi> {
    if pump.amplitude > 0.05 {
        log::warn!("Floquet continuation above 0.05 flux quanta is outside the validated range");
    }
    let ph0 = PeriodicHamiltonian::new(sys, &pump.with_amplitude(0.0))?;
    let static_sol = diagonalize(&ph0.static_hamiltonian())?;
    let refs = [(0, 0), (0, 1), (1, 0), (1, 1)];
    let mut energies = [0.0; 4];
    let mut vectors = Vec::with_capacity(4);
    for (slot, &(m, n)) in refs.iter().enumerate() {
        let (k, w) = static_sol.dressed_index(ph0.index(m, n)?);
        if w < 0.5 {
            return Err(Error::Tracking(format!(
                "static state |{},{n}> has no dressed partner above one half",
                Level(m)
            )));
        }
        energies[slot] = static_sol.energies()[k];
        vectors.push(static_sol.vector(k).into_owned());
    }
    let chi_of = |e: &[f64; 4]| 0.5 * ((e[3] - e[2]) - (e[1] - e[0]));
    let chi_static = chi_of(&energies);

    let mut min_overlap = 1.0_f64;
    if pump.amplitude > 0.0 {
        let levels = opts.continuation_levels.max(1);
        for l in 0..levels {
            let amp = pump.amplitude * 2f64.powi(l as i32 + 1 - levels as i32);
            let ph = PeriodicHamiltonian::new(sys, &pump.with_amplitude(amp))?.with_phase(opts.phase);
            let u = one_period_propagator(&ph, opts.steps, opts.scheme)?;
            let qs = quasienergies(&u, ph.period())?;

            let mut chosen = [usize::MAX; 4];
            for slot in 0..4 {
                let overlaps: Vec<f64> = (0..qs.vectors.ncols())
                    .map(|j| qs.vectors.column(j).dotc(&vectors[slot]).norm_sqr())
                    .collect();
                let (j, w) = overlaps
                    .iter()
                    .copied()
                    .enumerate()
                    .fold((0, -1.0), |b, (j, w)| if w > b.1 { (j, w) } else { b });
                if w < 0.5 {
                    return Err(Error::Tracking(format!(
                        "branch {slot} lost at amplitude {amp:.3e} (overlap {w:.3})"
                    )));
                }
                if chosen[..slot].contains(&j) {
                    return Err(Error::Tracking(format!("branches collide at amplitude {amp:.3e}")));
                }
                chosen[slot] = j;
                min_overlap = min_overlap.min(w);
            }
            for slot in 0..4 {
                let j = chosen[slot];
                energies[slot] = unfold(qs.energies[j], qs.omega, energies[slot]);
                vectors[slot] = qs.vectors.column(j).into_owned();
            }
        }
    }
    Ok(FloquetChi {
        chi: chi_of(&energies),
        chi_static,
        energies,
        min_overlap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{ghz, mhz};

    /// Spin in a static field plus a circularly rotating transverse field.
    struct RotatingFieldSpin {
        omega0: f64,
        rabi: f64,
        drive: f64,
    }

    impl TimePeriodic for RotatingFieldSpin {
        fn dim(&self) -> usize {
            2
        }

        fn period(&self) -> f64 {
            TAU / self.drive
        }

        fn hamiltonian_at(&self, t: f64) -> CMatrix {
            let c = |x: f64| Complex64::new(x, 0.0);
            let off = Complex64::from_polar(0.5 * self.rabi, -self.drive * t);
            CMatrix::from_row_slice(2, 2, &[c(0.5 * self.omega0), off, off.conj(), c(-0.5 * self.omega0)])
        }
    }

    #[test]
    fn rabi_populations_match_closed_form() {
        for (omega0, detune) in [(1.0, 0.0), (1.0, 0.03)] {
            let spin = RotatingFieldSpin {
                omega0,
                rabi: 0.05,
                drive: omega0 - detune,
            };
            let t = 3.7 * spin.period();
            for scheme in [Scheme::Midpoint, Scheme::CommutatorFree4] {
                let steps = if scheme == Scheme::Midpoint { 8192 } else { 1024 };
                let u = propagate(&spin, t, steps, scheme).unwrap();
                // start in the lower level (index 1)
                let p_up = u[(0, 1)].norm_sqr();
                let rr = (spin.rabi.powi(2) + detune.powi(2)).sqrt();
                let want = (spin.rabi / rr).powi(2) * (0.5 * rr * t).sin().powi(2);
                assert!((p_up - want).abs() < 1e-6, "{scheme:?}: {p_up} vs {want}");
            }
        }
    }

    #[test]
    fn fold_and_unfold() {
        let w = 2.0;
        for eps in [-3.1, -1.0, -0.3, 0.0, 0.7, 1.0, 5.2] {
            let f = fold(eps, w);
            assert!(f > -1.0 && f <= 1.0);
            assert_eq!(fold(f, w), f);
            assert!((fold(eps + w, w) - f).abs() < 1e-12);
            assert!((unfold(f, w, eps) - eps).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_has_zero_quasienergies() {
        let qs = quasienergies(&CMatrix::identity(3, 3), 1.0).unwrap();
        assert!(qs.energies.iter().all(|e| e.abs() < 1e-14));
    }

    #[test]
    fn diagonal_phases() {
        let period = 1.0;
        let (w1, w2) = (0.4, -1.1);
        let u = CMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::from_polar(1.0, -w1 * period),
            Complex64::from_polar(1.0, -w2 * period),
        ]));
        let qs = quasienergies(&u, period).unwrap();
        let mut e = qs.energies.clone();
        e.sort_by(f64::total_cmp);
        assert!((e[0] - w2).abs() < 1e-12 && (e[1] - w1).abs() < 1e-12);
    }

    #[test]
    fn undriven_propagator_matches_static_spectrum() {
        let sys = SystemSpec::paper_defaults();
        let pump = PumpSpec::new(Qubit::R, ghz(2.6), 0.0).unwrap();
        let ph = PeriodicHamiltonian::new(&sys, &pump).unwrap();
        let u = one_period_propagator(&ph, 256, Scheme::Midpoint).unwrap();
        assert!(unitarity_residual(&u) < 1e-9);
        let qs = quasienergies(&u, ph.period()).unwrap();
        let sol = diagonalize(&ph.static_hamiltonian()).unwrap();
        let mut want: Vec<f64> = sol.energies().iter().map(|&e| fold(e, qs.omega)).collect();
        let mut got = qs.energies.clone();
        want.sort_by(f64::total_cmp);
        got.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() < 1e-8 * qs.omega, "{a} vs {b}");
        }
    }

    #[test]
    fn rejects_too_few_steps() {
        let sys = SystemSpec::paper_defaults();
        let pump = PumpSpec::new(Qubit::R, ghz(2.6), 0.0).unwrap();
        let ph = PeriodicHamiltonian::new(&sys, &pump).unwrap();
        assert!(one_period_propagator(&ph, 100, Scheme::Midpoint).is_err());
    }

    #[test]
    fn periodic_in_time() {
        let sys = SystemSpec::paper_defaults();
        let pump = PumpSpec::new(Qubit::R, ghz(2.6), 0.01).unwrap();
        let ph = PeriodicHamiltonian::new(&sys, &pump).unwrap();
        let t = 0.123 * ph.period();
        let d = (ph.hamiltonian_at(t) - ph.hamiltonian_at(t + ph.period())).norm();
        assert!(d < 1e-12 * ph.hamiltonian_at(t).norm() * 1e3);
        assert!(crate::hilbert::check_hermitian(&ph.hamiltonian_at(t), 0.0).unwrap());
    }

    #[test]
    fn undriven_chi_is_static_chi() {
        let sys = SystemSpec::paper_defaults();
        let pump = PumpSpec::new(Qubit::R, ghz(2.6), 0.0).unwrap();
        let res = floquet_chi(&sys, &pump, &FloquetOptions::default()).unwrap();
        assert_eq!(res.chi, res.chi_static);
        // static shift at the operating bias is a few hundred kHz
        assert!(res.chi.abs() > mhz(0.05) && res.chi.abs() < mhz(1.0));
    }
}
