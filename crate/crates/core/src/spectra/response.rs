use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::annihilation;
use crate::model::{Level, PumpSpec, RotatingFrame, SystemSpec};
use crate::spectra::eigen::{diagonalize, EigenSolution};

/// A cavity-like transition out of the initial dressed state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    /// Lab-frame frequency.
    pub frequency: f64,
    /// Normalized `|<psi_j| c^dagger |psi_init>|^2`.
    pub weight: f64,
}

/// Dressed states reached from `|initial, 0>` by one cavity photon.
///
/// `frame_offset` converts rotating-frame energy differences to lab
/// frequencies; for a pumped qubit it is `omega_q + omega_p`.
pub fn cavity_transitions(
    rf: &RotatingFrame,
    sol: &EigenSolution,
    initial: Level,
    frame_offset: f64,
) -> Result<Vec<Transition>> {
    if initial.0 >= rf.qubit_dim {
        return Err(Error::param("initial", format!("level {initial} is outside the qubit truncation")));
    }
    let space = rf.space()?;
    let c_dag = space.embed(&annihilation(rf.cavity_dim)?, 1)?.adjoint();
    let (k0, _) = sol.dressed_index(rf.index(initial.0, 0));
    let psi = c_dag * sol.vector(k0);
    let amps = sol.vectors().adjoint() * psi;
    let e0 = sol.energies()[k0];

    let total: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    if total == 0.0 {
        return Ok(Vec::new());
    }
    Ok(amps
        .iter()
        .enumerate()
        .filter_map(|(j, z)| {
            let w = z.norm_sqr() / total;
            (w > 1e-12).then(|| Transition {
                frequency: sol.energies()[j] - e0 + frame_offset,
                weight: w,
            })
        })
        .collect())
}

/// `1 - sum_j w_j (kappa/2) / (i (omega - omega_j) + kappa/2)`.
pub fn lorentzian_response(transitions: &[Transition], kappa: f64, probe: f64) -> Complex64 {
    let half = Complex64::new(0.5 * kappa, 0.0);
    let dip: Complex64 = transitions
        .iter()
        .map(|t| t.weight * half / (Complex64::new(0.0, probe - t.frequency) + half))
        .sum();
    Complex64::new(1.0, 0.0) - dip
}

/// Response of the cavity versus probe frequency at one pump setting.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub pump_frequency: f64,
    pub transitions: Vec<Transition>,
    pub response: Vec<Complex64>,
}

/// `omega_q + omega_p` for the pumped qubit at the static bias.
pub fn frame_offset(sys: &SystemSpec, pump: &PumpSpec) -> f64 {
    sys.qubit(pump.target).frequency(sys.static_flux) + pump.frequency
}

pub fn synthesize_cavity_response(
    sys: &SystemSpec,
    pump: &PumpSpec,
    initial: Level,
    probe_grid: &[f64],
) -> Result<SpectrumRow> {
    let rf = RotatingFrame::from_system(sys, pump)?;
    let sol = diagonalize(&rf.hamiltonian()?)?;
    let transitions = cavity_transitions(&rf, &sol, initial, frame_offset(sys, pump))?;
    if let (Some(&lo), Some(&hi)) = (probe_grid.first(), probe_grid.last()) {
        let visible = transitions
            .iter()
            .any(|t| t.weight > 0.01 && t.frequency >= lo.min(hi) && t.frequency <= hi.max(lo));
        if !visible {
            log::warn!(
                "no cavity transition above 1% weight inside the probe window at pump {:.6e} rad/s",
                pump.frequency
            );
        }
    }
    let response = probe_grid
        .iter()
        .map(|&w| lorentzian_response(&transitions, sys.kappa, w))
        .collect();
    Ok(SpectrumRow {
        pump_frequency: pump.frequency,
        transitions,
        response,
    })
}

/// Pump-frequency by probe-frequency response map for one initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    pub initial: Level,
    pub pump_frequencies: Vec<f64>,
    pub probe_frequencies: Vec<f64>,
    /// Rows follow `pump_frequencies`, columns `probe_frequencies`.
    pub response: DMatrix<Complex64>,
}

impl SpectrumGrid {
    pub fn from_rows(initial: Level, probe_frequencies: Vec<f64>, rows: Vec<SpectrumRow>) -> Result<Self> {
        let n = probe_frequencies.len();
        if let Some(bad) = rows.iter().find(|r| r.response.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: bad.response.len(),
            });
        }
        let response = DMatrix::from_fn(rows.len(), n, |i, j| rows[i].response[j]);
        Ok(Self {
            initial,
            pump_frequencies: rows.iter().map(|r| r.pump_frequency).collect(),
            probe_frequencies,
            response,
        })
    }

    pub fn compute(
        sys: &SystemSpec,
        pump: &PumpSpec,
        initial: Level,
        pump_frequencies: &[f64],
        probe_frequencies: &[f64],
    ) -> Result<Self> {
        let rows = pump_frequencies
            .iter()
            .map(|&wp| synthesize_cavity_response(sys, &pump.at_frequency(wp), initial, probe_frequencies))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(initial, probe_frequencies.to_vec(), rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Qubit;
    use crate::units::{ghz, mhz};
    use std::f64::consts::PI;

    fn operating_pump(sys: &SystemSpec, detuning: f64, amplitude: f64) -> PumpSpec {
        let gap = -sys.detuning(Qubit::R, sys.static_flux);
        PumpSpec::new(Qubit::R, gap + detuning, amplitude).unwrap()
    }

    fn dips(row: &SpectrumRow) -> Vec<Transition> {
        let mut t: Vec<Transition> = row.transitions.iter().copied().filter(|t| t.weight > 0.05).collect();
        t.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        t
    }

    #[test]
    fn bare_cavity_lorentzian() {
        let sys = SystemSpec::paper_defaults();
        let pump = operating_pump(&sys, mhz(-300.0), 0.0);
        let wc = sys.cavity.frequency(sys.static_flux);
        let probe: Vec<f64> = (-200..=200).map(|k| wc + mhz(0.25 * k as f64)).collect();
        let row = synthesize_cavity_response(&sys, &pump, Level::G, &probe).unwrap();
        assert_eq!(row.transitions.len(), 1);
        assert!((row.transitions[0].frequency - wc).abs() < 1e-3);
        let centre = row.response[200];
        assert!(centre.norm() < 1e-12);
        // phase jumps by nearly pi across the centre and relaxes in the wings
        let jump = row.response[201].arg() - row.response[199].arg();
        assert!((jump - PI).abs() < 0.1 * PI, "jump {jump}");
        assert!(row.response[0].arg().abs() < 0.1 && row.response[400].arg().abs() < 0.1);
        for z in &row.response {
            assert!(z.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn resonant_doublet_and_ef_doublet() {
        let sys = SystemSpec::paper_defaults();
        let amp = 0.005;
        let probe = vec![sys.cavity.frequency(sys.static_flux)];
        let pump0 = operating_pump(&sys, 0.0, amp);
        let g_p = crate::parametric::g_p_from_flux(&sys, &pump0, sys.static_flux).unwrap();

        let row = synthesize_cavity_response(&sys, &pump0, Level::G, &probe).unwrap();
        let d = dips(&row);
        assert_eq!(d.len(), 2);
        assert!((d[0].weight - d[1].weight).abs() < 0.02);
        let split = d[1].frequency - d[0].frequency;
        assert!((split - 2.0 * g_p).abs() < 0.01 * 2.0 * g_p);

        let alpha = sys.right.anharmonicity;
        let pump1 = operating_pump(&sys, -alpha, amp);
        let row = synthesize_cavity_response(&sys, &pump1, Level::E, &probe).unwrap();
        let d = dips(&row);
        assert_eq!(d.len(), 2);
        let split = d[1].frequency - d[0].frequency;
        let want = 2.0 * 2.0_f64.sqrt() * g_p;
        assert!((split - want).abs() < 0.01 * want);
    }

    #[test]
    fn weights_normalized_and_area_sum_rule() {
        let sys = SystemSpec::paper_defaults();
        let wc = sys.cavity.frequency(sys.static_flux);
        let probe: Vec<f64> = (-40000..=40000).map(|k| wc + mhz(0.05 * k as f64)).collect();
        let step = mhz(0.05);
        let mut areas = Vec::new();
        for amp in [0.0, 0.002, 0.005] {
            let row = synthesize_cavity_response(&sys, &operating_pump(&sys, mhz(3.0), amp), Level::G, &probe).unwrap();
            let wsum: f64 = row.transitions.iter().map(|t| t.weight).sum();
            assert!((wsum - 1.0).abs() < 1e-12);
            let area: f64 = row.response.iter().map(|z| 1.0 - z.re).sum::<f64>() * step;
            areas.push(area);
        }
        for a in &areas[1..] {
            assert!((a - areas[0]).abs() < 0.01 * areas[0]);
        }
    }

    #[test]
    fn grid_shape() {
        let sys = SystemSpec::paper_defaults();
        let pump = operating_pump(&sys, 0.0, 0.005);
        let pumps = [pump.frequency - mhz(20.0), pump.frequency, pump.frequency + mhz(20.0)];
        let probe = [ghz(7.6), ghz(7.65), ghz(7.7)];
        let grid = SpectrumGrid::compute(&sys, &pump, Level::G, &pumps, &probe).unwrap();
        assert_eq!(grid.response.shape(), (3, 3));
        assert!(grid.response.iter().all(|z| z.norm() <= 1.0 + 1e-12));
    }
}
