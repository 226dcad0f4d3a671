//! Lab-frame and pump-rotating-frame Hamiltonians.
//!
//! Transmons use the normal-ordered Kerr term `(alpha/2) n (n - 1)`, so that
//! `omega_ge = omega` and `omega_ef - omega_ge = alpha`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{annihilation, number, CMatrix, CompositeSpace};
use crate::model::spec::{ModeSpec, PumpSpec, Qubit, SystemSpec};

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `omega n + (alpha/2) n (n-1)` on a single mode.
fn mode_term(omega: f64, alpha: f64, dim: usize) -> CMatrix {
    let diag = nalgebra::DVector::from_iterator(
        dim,
        (0..dim).map(|n| {
            let n = n as f64;
            real(omega * n + 0.5 * alpha * n * (n - 1.0))
        }),
    );
    CMatrix::from_diagonal(&diag)
}

fn quadrature(dim: usize) -> Result<CMatrix> {
    let a = annihilation(dim)?.into_matrix();
    Ok(&a + a.adjoint())
}

/// A lab-frame Hamiltonian together with the space it acts on.
#[derive(Debug, Clone)]
pub struct LabHamiltonian {
    pub space: CompositeSpace,
    /// Qubits included, in the order of the leading factors; the cavity is
    /// always the last factor.
    pub qubits: Vec<Qubit>,
    pub matrix: CMatrix,
}

impl LabHamiltonian {
    /// Flat index of the basis state with the given qubit levels and photon
    /// number.
    pub fn index(&self, qubit_levels: &[usize], photons: usize) -> Result<usize> {
        let mut occ = qubit_levels.to_vec();
        occ.push(photons);
        self.space.index(&occ)
    }
}

/// Build the lab Hamiltonian over the listed qubits plus the cavity.
pub fn lab_hamiltonian_over(sys: &SystemSpec, qubits: &[Qubit], phi: f64) -> Result<LabHamiltonian> {
    if !phi.is_finite() {
        return Err(Error::param("phi", "flux must be finite"));
    }
    let mut qubits = qubits.to_vec();
    qubits.sort();
    qubits.dedup();

    let modes: Vec<&ModeSpec> = qubits
        .iter()
        .map(|&q| sys.qubit(q))
        .chain(std::iter::once(&sys.cavity))
        .collect();
    let dims: Vec<usize> = modes.iter().map(|m| m.dim).collect();
    let space = CompositeSpace::new(dims.clone())?;
    let cavity_slot = modes.len() - 1;

    let n = space.total_dim();
    let mut h = CMatrix::zeros(n, n);
    for (slot, mode) in modes.iter().enumerate() {
        let term = mode_term(mode.frequency(phi), mode.anharmonicity, mode.dim);
        h += space.embed_matrix(&term, slot)?;
    }
    let cavity_x = space.embed_matrix(&quadrature(sys.cavity.dim)?, cavity_slot)?;
    for (slot, &q) in qubits.iter().enumerate() {
        let g = sys.coupler.static_coupling(q, phi);
        if g == 0.0 {
            continue;
        }
        let qubit_x = space.embed_matrix(&quadrature(dims[slot])?, slot)?;
        h += (&qubit_x * &cavity_x) * real(g);
    }
    Ok(LabHamiltonian {
        space,
        qubits,
        matrix: h,
    })
}

/// Full three-mode lab Hamiltonian in (L, R, C) order.
pub fn lab_hamiltonian(sys: &SystemSpec, phi: f64) -> Result<CMatrix> {
    Ok(lab_hamiltonian_over(sys, &[Qubit::L, Qubit::R], phi)?.matrix)
}

/// Lab Hamiltonian of one transmon and the cavity, spectator dropped.
pub fn pair_lab_hamiltonian(sys: &SystemSpec, qubit: Qubit, phi: f64) -> Result<LabHamiltonian> {
    lab_hamiltonian_over(sys, &[qubit], phi)
}

/// `Delta_p = omega_p - (omega_C - omega_k)` at flux `phi`.
pub fn pump_detuning(sys: &SystemSpec, pump: &PumpSpec, phi: f64) -> Result<f64> {
    let omega_q = sys.qubit(pump.target).frequency(phi);
    let omega_c = sys.cavity.frequency(phi);
    if omega_q >= omega_c {
        return Err(Error::Domain(format!(
            "qubit {} at {omega_q:.6e} rad/s is not below the cavity at {omega_c:.6e} rad/s",
            pump.target
        )));
    }
    Ok(pump.frequency - (omega_c - omega_q))
}

/// Parameters of the single-pump rotating-frame model
/// `H = (alpha/2) n_q (n_q - 1) - Delta_p n_C + g_p (q c^dag + q^dag c)`
/// on `|m, n>` = qubit level (x) photon number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatingFrame {
    pub anharmonicity: f64,
    pub detuning: f64,
    pub coupling: f64,
    pub qubit_dim: usize,
    pub cavity_dim: usize,
}

impl RotatingFrame {
    pub fn from_system(sys: &SystemSpec, pump: &PumpSpec) -> Result<Self> {
        pump.validate()?;
        let phi = sys.static_flux;
        let detuning = pump_detuning(sys, pump, phi)?;
        let coupling = crate::parametric::g_p_from_flux(sys, pump, phi)?;
        let qubit = sys.qubit(pump.target);
        Ok(Self {
            anharmonicity: qubit.anharmonicity,
            detuning,
            coupling,
            qubit_dim: qubit.dim,
            cavity_dim: sys.cavity.dim,
        })
    }

    pub fn with_detuning(self, detuning: f64) -> Self {
        Self { detuning, ..self }
    }

    pub fn with_coupling(self, coupling: f64) -> Self {
        Self { coupling, ..self }
    }

    pub fn with_dims(self, qubit_dim: usize, cavity_dim: usize) -> Self {
        Self {
            qubit_dim,
            cavity_dim,
            ..self
        }
    }

    pub fn space(&self) -> Result<CompositeSpace> {
        CompositeSpace::new(vec![self.qubit_dim, self.cavity_dim])
    }

    /// Flat index of `|m, n>`.
    pub fn index(&self, level: usize, photons: usize) -> usize {
        level * self.cavity_dim + photons
    }

    /// Rotating-frame energy of `|m, n>` at zero coupling.
    pub fn bare_energy(&self, level: usize, photons: usize) -> f64 {
        let m = level as f64;
        0.5 * self.anharmonicity * m * (m - 1.0) - self.detuning * photons as f64
    }

    pub fn hamiltonian(&self) -> Result<CMatrix> {
        if self.qubit_dim < 2 {
            return Err(Error::InvalidDimension {
                dim: self.qubit_dim,
                min: 2,
            });
        }
        if self.coupling.abs() > 0.5 * self.anharmonicity.abs() {
            log::warn!(
                "g_p = {:.3e} exceeds |alpha|/2 = {:.3e}; dressed-state labels are unreliable",
                self.coupling.abs(),
                0.5 * self.anharmonicity.abs()
            );
        }
        let space = self.space()?;
        let n_q = space.embed(&number(self.qubit_dim)?, 0)?;
        let n_c = space.embed(&number(self.cavity_dim)?, 1)?;
        let q = space.embed(&annihilation(self.qubit_dim)?, 0)?;
        let c = space.embed(&annihilation(self.cavity_dim)?, 1)?;
        let id = CMatrix::identity(space.total_dim(), space.total_dim());

        let kerr = &n_q * (&n_q - &id) * real(0.5 * self.anharmonicity);
        let exchange = &q * c.adjoint();
        let coupling = (&exchange + exchange.adjoint()) * real(self.coupling);
        Ok(kerr - n_c * real(self.detuning) + coupling)
    }

    /// Total excitation number `n_q + n_C`, conserved by [`Self::hamiltonian`].
    pub fn excitation_number(&self) -> Result<CMatrix> {
        Ok(self.space()?.total_number())
    }
}

pub fn rotating_frame_hamiltonian(sys: &SystemSpec, pump: &PumpSpec) -> Result<CMatrix> {
    RotatingFrame::from_system(sys, pump)?.hamiltonian()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{check_hermitian, commutator_norm};
    use crate::model::flux::FluxModel;
    use crate::model::spec::{CouplerSpec, ModeLabel, QubitCoupling};
    use crate::units::{ghz, mhz};
    use nalgebra::SymmetricEigen;

    fn eigenvalues(h: &CMatrix) -> Vec<f64> {
        let mut e: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    fn degenerate_system(omega: f64, g: f64) -> SystemSpec {
        let mode = |label| ModeSpec {
            label,
            flux_model: FluxModel::fixed(omega).unwrap(),
            anharmonicity: if label == ModeLabel::C { 0.0 } else { mhz(-200.0) },
            dim: 2,
        };
        let coupling = QubitCoupling {
            static_slope: 0.0,
            residual: g,
            pump_scale: 0.0,
        };
        SystemSpec {
            left: mode(ModeLabel::L),
            right: mode(ModeLabel::R),
            cavity: mode(ModeLabel::C),
            coupler: CouplerSpec {
                cancellation_flux: 0.0,
                left: coupling,
                right: coupling,
            },
            kappa: mhz(10.0),
            static_flux: 0.0,
        }
    }

    #[test]
    fn uncoupled_degenerate_modes() {
        let w = ghz(5.0);
        let sys = degenerate_system(w, 0.0);
        let e = eigenvalues(&lab_hamiltonian(&sys, 0.0).unwrap());
        let want = [0.0, w, w, w, 2.0 * w, 2.0 * w, 2.0 * w, 3.0 * w];
        for (a, b) in e.iter().zip(want) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn resonant_doublet_in_one_excitation_block() {
        let w = ghz(5.0);
        let g = mhz(20.0);
        let sys = degenerate_system(w, g);
        let lab = pair_lab_hamiltonian(&sys, Qubit::R, 0.0).unwrap();
        let e0 = lab.index(&[1], 0).unwrap();
        let g1 = lab.index(&[0], 1).unwrap();
        let block = CMatrix::from_fn(2, 2, |i, j| {
            let idx = [e0, g1];
            lab.matrix[(idx[i], idx[j])]
        });
        let e = eigenvalues(&block);
        assert!((e[1] - e[0] - 2.0 * g).abs() < 1e-6 * g);
    }

    #[test]
    fn cancellation_point_gives_bare_spectrum() {
        let mut sys = SystemSpec::paper_defaults();
        sys.coupler.left.residual = 0.0;
        sys.coupler.right.residual = 0.0;
        let phi = sys.coupler.cancellation_flux;
        let h = lab_hamiltonian(&sys, phi).unwrap();
        let mut bare = Vec::new();
        for l in 0..sys.left.dim {
            for r in 0..sys.right.dim {
                for n in 0..sys.cavity.dim {
                    let e = |m: &ModeSpec, k: usize| {
                        let k = k as f64;
                        m.frequency(phi) * k + 0.5 * m.anharmonicity * k * (k - 1.0)
                    };
                    bare.push(e(&sys.left, l) + e(&sys.right, r) + e(&sys.cavity, n));
                }
            }
        }
        bare.sort_by(f64::total_cmp);
        let e = eigenvalues(&h);
        for (a, b) in e.iter().zip(&bare) {
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn rotating_frame_uncoupled_is_diagonal() {
        let rf = RotatingFrame {
            anharmonicity: mhz(-220.0),
            detuning: mhz(-37.0),
            coupling: 0.0,
            qubit_dim: 4,
            cavity_dim: 3,
        };
        let h = rf.hamiltonian().unwrap();
        for i in 0..12 {
            for j in 0..12 {
                if i != j {
                    assert_eq!(h[(i, j)], real(0.0));
                }
            }
        }
        for m in 0..4 {
            for n in 0..3 {
                let i = rf.index(m, n);
                assert!((h[(i, i)].re - rf.bare_energy(m, n)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn rotating_frame_resonant_doublet() {
        let g = mhz(5.0);
        let rf = RotatingFrame {
            anharmonicity: mhz(-220.0),
            detuning: 0.0,
            coupling: g,
            qubit_dim: 2,
            cavity_dim: 2,
        };
        let h = rf.hamiltonian().unwrap();
        let idx = [rf.index(1, 0), rf.index(0, 1)];
        let block = CMatrix::from_fn(2, 2, |i, j| h[(idx[i], idx[j])]);
        let e = eigenvalues(&block);
        assert!((e[0] + g).abs() < 1e-9 * g && (e[1] - g).abs() < 1e-9 * g);
    }

    #[test]
    fn ef_crossing_gap_is_root_two_g() {
        let alpha = mhz(-220.0);
        let g = alpha.abs() / 20.0;
        let rf = RotatingFrame {
            anharmonicity: alpha,
            detuning: -alpha,
            coupling: g,
            qubit_dim: 3,
            cavity_dim: 2,
        };
        let h = rf.hamiltonian().unwrap();
        let eig = SymmetricEigen::new(h);
        // dressed states with the largest weight on |f,0> and |e,1>
        let f0 = rf.index(2, 0);
        let e1 = rf.index(1, 1);
        let mut picked: Vec<(f64, f64)> = (0..eig.eigenvalues.len())
            .map(|k| {
                let v = eig.eigenvectors.column(k);
                (v[f0].norm_sqr() + v[e1].norm_sqr(), eig.eigenvalues[k])
            })
            .collect();
        picked.sort_by(|a, b| b.0.total_cmp(&a.0));
        let gap = (picked[0].1 - picked[1].1).abs();
        let want = 2.0 * 2.0_f64.sqrt() * g;
        assert!((gap - want).abs() / want < 0.01, "gap {gap} vs {want}");
    }

    #[test]
    fn pump_detuning_examples() {
        let sys = SystemSpec::paper_defaults();
        let phi = sys.static_flux;
        let abs_delta = -sys.detuning(Qubit::R, phi);
        let pump = PumpSpec::new(Qubit::R, abs_delta, 0.0).unwrap();
        assert!(pump_detuning(&sys, &pump, phi).unwrap().abs() < 1e-3);

        let alpha = sys.right.anharmonicity;
        let pump = pump.at_frequency(abs_delta - alpha);
        let dp = pump_detuning(&sys, &pump, phi).unwrap();
        assert!((dp - mhz(220.0)).abs() < 1e-3);

        let pump = pump.at_frequency(0.9 * abs_delta);
        let dp = pump_detuning(&sys, &pump, phi).unwrap();
        assert!((dp + 0.1 * abs_delta).abs() < 1e-3);
    }

    #[test]
    fn pump_detuning_rejects_qubit_above_cavity() {
        let mut sys = SystemSpec::paper_defaults();
        sys.right.flux_model = FluxModel::fixed(ghz(12.0)).unwrap();
        let pump = PumpSpec::new(Qubit::R, ghz(2.7), 0.0).unwrap();
        assert!(matches!(pump_detuning(&sys, &pump, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn outputs_hermitian_and_rwa_conserves_excitations() {
        let sys = SystemSpec::paper_defaults();
        let h = lab_hamiltonian(&sys, 0.1).unwrap();
        assert!(check_hermitian(&h, 1e-12 * h.norm()).unwrap());
        let pump = PumpSpec::new(Qubit::R, ghz(2.6), 0.005).unwrap();
        let rf = RotatingFrame::from_system(&sys, &pump).unwrap();
        let h = rf.hamiltonian().unwrap();
        assert!(check_hermitian(&h, 1e-12).unwrap());
        assert!(commutator_norm(&h, &rf.excitation_number().unwrap()) < 1e-12 * h.norm().max(1.0));
    }
}
