use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{Level, PumpSpec, RotatingFrame, SystemSpec};
use crate::spectra::eigen::{diagonalize, EigenSolution};
use crate::spectra::response::frame_offset;

/// Overlaps closer than this make a branch assignment ambiguous.
pub const AMBIGUITY_MARGIN: f64 = 0.05;
/// Points used by the hyperbola fit in [`fit_crossing_gap`].
pub const FIT_POINTS: usize = 11;

/// Continuous eigenstate branches through a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct Tracking {
    /// `branches[b][s]` is the eigen index of branch `b` at sweep step `s`.
    /// Branch `b` starts at eigen index `b`.
    pub branches: Vec<Vec<usize>>,
    /// `(step, branch)` pairs whose two best overlaps were within
    /// [`AMBIGUITY_MARGIN`].
    pub ambiguous: Vec<(usize, usize)>,
}

impl Tracking {
    pub fn is_ambiguous(&self) -> bool {
        !self.ambiguous.is_empty()
    }

    /// Energies of branch `b` along the sweep.
    pub fn energies(&self, solutions: &[EigenSolution], b: usize) -> Vec<f64> {
        self.branches[b]
            .iter()
            .zip(solutions)
            .map(|(&k, s)| s.energies()[k])
            .collect()
    }
}

/// Greedy maximum-overlap matching between consecutive eigenbases.
pub fn track_modes(solutions: &[EigenSolution]) -> Result<Tracking> {
    let Some(first) = solutions.first() else {
        return Err(Error::param("solutions", "empty sweep"));
    };
    let n = first.len();
    if let Some(bad) = solutions.iter().find(|s| s.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: bad.len(),
        });
    }

    let mut branches: Vec<Vec<usize>> = (0..n).map(|b| vec![b]).collect();
    let mut ambiguous = Vec::new();
    for (step, pair) in solutions.windows(2).enumerate() {
        let overlap: DMatrix<f64> = (pair[0].vectors().adjoint() * pair[1].vectors()).map(|z| z.norm_sqr());

        let mut candidates: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                candidates.push((overlap[(i, j)], i, j));
            }
        }
        candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut next_of = vec![usize::MAX; n];
        let mut taken = vec![false; n];
        for (_, i, j) in candidates {
            if next_of[i] == usize::MAX && !taken[j] {
                next_of[i] = j;
                taken[j] = true;
            }
        }

        for (b, branch) in branches.iter_mut().enumerate() {
            let i = *branch.last().expect("branches start non-empty");
            let mut row: Vec<f64> = overlap.row(i).iter().copied().collect();
            row.sort_by(|a, b| b.total_cmp(a));
            if n > 1 && row[0] - row[1] < AMBIGUITY_MARGIN {
                ambiguous.push((step + 1, b));
            }
            branch.push(next_of[i]);
        }
    }
    if !ambiguous.is_empty() {
        log::warn!("{} ambiguous branch assignments while tracking modes", ambiguous.len());
    }
    Ok(Tracking { branches, ambiguous })
}

/// Minimum separation of two tracked modes, refined by a least-squares fit of
/// `gap^2 = A x^2 + B x + C` over the [`FIT_POINTS`] sweep points nearest the
/// minimum. The hyperbola `sqrt((x - x0)^2 + 4 g^2)` squared is such a
/// quadratic, with minimum `C - B^2 / 4A = 4 g^2`.
pub fn fit_crossing_gap(x: &[f64], lower: &[f64], upper: &[f64]) -> Result<f64> {
    let n = x.len();
    if lower.len() != n || upper.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: lower.len().min(upper.len()),
        });
    }
    if n < FIT_POINTS {
        return Err(Error::Fit(format!("need at least {FIT_POINTS} sweep points, got {n}")));
    }
    let gap: Vec<f64> = upper.iter().zip(lower).map(|(u, l)| (u - l).abs()).collect();
    let imin = (0..n)
        .min_by(|&a, &b| gap[a].total_cmp(&gap[b]))
        .expect("non-empty sweep");
    if imin == 0 || imin == n - 1 {
        return Err(Error::Fit(
            "minimum gap lies on the sweep boundary; refusing to extrapolate".into(),
        ));
    }

    let half = FIT_POINTS / 2;
    let start = imin.saturating_sub(half).min(n - FIT_POINTS);
    let idx = start..start + FIT_POINTS;

    // centre and scale the abscissa for conditioning
    let x0 = x[imin];
    let scale = idx
        .clone()
        .map(|i| (x[i] - x0).abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let a = DMatrix::from_fn(FIT_POINTS, 3, |r, c| {
        let t = (x[start + r] - x0) / scale;
        t.powi(2 - c as i32)
    });
    let y = DVector::from_iterator(FIT_POINTS, idx.map(|i| gap[i] * gap[i]));
    let coef = a
        .svd(true, true)
        .solve(&y, 1e-14)
        .map_err(|e| Error::Fit(e.to_string()))?;
    let (qa, qb, qc) = (coef[0], coef[1], coef[2]);
    if qa <= 0.0 {
        return Err(Error::Fit("gap is not convex near its minimum".into()));
    }
    let min_sq = (qc - qb * qb / (4.0 * qa)).max(0.0);
    let vertex = -qb / (2.0 * qa);
    if vertex.abs() > 1.0 {
        log::warn!("fitted gap minimum lies outside the fit window");
    }
    Ok(min_sq.sqrt())
}

/// The two dressed cavity transitions that cross when the pumped qubit starts
/// in `initial`, swept over pump frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingSweep {
    pub initial: Level,
    pub pump_frequencies: Vec<f64>,
    /// Lab-frame transition frequencies of the tracked branches, ordered so
    /// that `lower <= upper` pointwise.
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub ambiguous: bool,
}

impl CrossingSweep {
    pub fn gaps(&self) -> Vec<f64> {
        self.upper.iter().zip(&self.lower).map(|(u, l)| u - l).collect()
    }

    /// Pump frequency and value of the smallest sampled gap.
    pub fn min_gap(&self) -> (f64, f64) {
        let gaps = self.gaps();
        let k = (0..gaps.len())
            .min_by(|&a, &b| gaps[a].total_cmp(&gaps[b]))
            .unwrap_or(0);
        (self.pump_frequencies[k], gaps[k])
    }

    pub fn fit_gap(&self) -> Result<f64> {
        fit_crossing_gap(&self.pump_frequencies, &self.lower, &self.upper)
    }
}

/// Sweep the pump over `pump_frequencies` and follow the pair
/// `|m,1>`, `|m+1,0>` (with `m = initial`), which meet at `Delta_p = -m alpha`.
/// Branches are followed adiabatically, so the window should contain only
/// that one crossing of the pair.
pub fn crossing_sweep(
    sys: &SystemSpec,
    pump: &PumpSpec,
    initial: Level,
    pump_frequencies: &[f64],
) -> Result<CrossingSweep> {
    let Some(&first) = pump_frequencies.first() else {
        return Err(Error::param("pump_frequencies", "empty sweep"));
    };
    let base = RotatingFrame::from_system(sys, &pump.at_frequency(first))?;
    let m = initial.0;
    if m + 2 > base.qubit_dim {
        return Err(Error::param(
            "qubit_dim",
            format!("tracking level {initial} needs at least {} qubit levels", m + 2),
        ));
    }
    let frames: Vec<RotatingFrame> = pump_frequencies
        .iter()
        .map(|&wp| RotatingFrame::from_system(sys, &pump.at_frequency(wp)))
        .collect::<Result<_>>()?;
    let solutions: Vec<EigenSolution> = frames
        .iter()
        .map(|rf| diagonalize(&rf.hamiltonian()?))
        .collect::<Result<_>>()?;
    let tracking = track_modes(&solutions)?;

    let start = &solutions[0];
    let branch_of = |basis: usize| start.dressed_index(basis).0;
    let photon = branch_of(base.index(m, 1));
    let sideband = branch_of(base.index(m + 1, 0));
    let ground = branch_of(base.index(m, 0));

    let mut lower = Vec::with_capacity(solutions.len());
    let mut upper = Vec::with_capacity(solutions.len());
    for (s, (sol, &wp)) in solutions.iter().zip(pump_frequencies).enumerate() {
        let offset = frame_offset(sys, &pump.at_frequency(wp));
        let e0 = sol.energies()[tracking.branches[ground][s]];
        let a = sol.energies()[tracking.branches[photon][s]] - e0 + offset;
        let b = sol.energies()[tracking.branches[sideband][s]] - e0 + offset;
        lower.push(a.min(b));
        upper.push(a.max(b));
    }
    let involved = [photon, sideband, ground];
    let ambiguous = tracking.ambiguous.iter().any(|(_, b)| involved.contains(b));
    Ok(CrossingSweep {
        initial,
        pump_frequencies: pump_frequencies.to_vec(),
        lower,
        upper,
        ambiguous,
    })
}
