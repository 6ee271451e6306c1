//! Angle sweeps of target probabilities and extremum refinement.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::FockBasis;
use crate::lift::{evolve_density, Backend};
use crate::mesh::NetworkSpec;
use crate::states::{mixed_input, partial_trace, probability, DensityBasis, DensityOperator, TargetKind, TargetState};

/// Evenly spaced angles `lo..=hi` (radians).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            lo: 0.0,
            hi: TAU,
            count: 1001,
        }
    }
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        let g = GridSpec { lo, hi, count };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if self.count < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {}",
                self.count
            )));
        }
        if self.hi <= self.lo {
            return Err(Error::InvalidGrid(format!("empty interval [{}, {}]", self.lo, self.hi)));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.hi
                } else {
                    self.lo + step * i as f64
                }
            })
            .collect()
    }

    /// Whether the interval spans a whole number of `2π` periods.
    pub fn is_periodic(&self) -> bool {
        let periods = (self.hi - self.lo) / TAU;
        periods >= 1.0 - 1e-12 && (periods - periods.round()).abs() < 1e-9
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NetworkSource {
    /// Nearest-neighbour chain over all modes.
    Chain,
    /// User topology; every splitter takes the swept angle.
    Custom { network: NetworkSpec },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub modes: usize,
    pub photons: usize,
    pub keep: (usize, usize),
    pub targets: Vec<TargetKind>,
    pub grid: GridSpec,
    pub backend: Backend,
    pub network: NetworkSource,
}

impl SweepConfig {
    /// Default chain, default grid, permanent backend.
    pub fn new(modes: usize, photons: usize, keep: (usize, usize), targets: Vec<TargetKind>) -> Self {
        SweepConfig {
            modes,
            photons,
            keep,
            targets,
            grid: GridSpec::default(),
            backend: Backend::Permanent,
            network: NetworkSource::Chain,
        }
    }

    pub fn network_at(&self, theta: f64) -> NetworkSpec {
        match &self.network {
            NetworkSource::Chain => NetworkSpec::chain(self.modes, theta),
            NetworkSource::Custom { network } => network.with_angle(theta),
        }
    }
}

/// Precomputed pieces for evaluating target probabilities at any angle.
#[derive(Clone, Debug)]
pub struct SweepModel {
    config: SweepConfig,
    input: DensityOperator,
    targets: Vec<TargetState>,
}

impl SweepModel {
    pub fn new(config: &SweepConfig) -> Result<Self> {
        let input = mixed_input(config.modes, config.photons)?;
        let (a, b) = config.keep;
        for index in [a, b] {
            if index == 0 || index > config.modes {
                return Err(Error::ModeOutOfRange {
                    index,
                    modes: config.modes,
                });
            }
        }
        if a == b {
            return Err(Error::InvalidKeepPair(a, b));
        }
        if let NetworkSource::Custom { network } = &config.network {
            network.validate()?;
            if network.modes != config.modes {
                return Err(Error::DimensionMismatch {
                    expected: config.modes,
                    found: network.modes,
                });
            }
        }
        let targets = config
            .targets
            .iter()
            .map(|&k| TargetState::new(k))
            .collect::<Result<Vec<_>>>()?;
        Ok(SweepModel {
            config: config.clone(),
            input,
            targets,
        })
    }

    pub fn config(&self) -> &SweepConfig {
        &self.config
    }

    pub fn basis(&self) -> Arc<FockBasis> {
        match self.input.basis() {
            DensityBasis::Full(b) => b.clone(),
            DensityBasis::Reduced(_) => unreachable!("mixed input lives on the full basis"),
        }
    }

    /// Reduced two-mode state on the kept pair after the network at `theta`.
    pub fn reduced_state(&self, theta: f64) -> Result<DensityOperator> {
        let net = self.config.network_at(theta);
        let out = evolve_density(&self.input, &net, self.config.backend)?;
        partial_trace(&out, self.config.keep)
    }

    /// Probabilities of every configured target, in configuration order.
    pub fn evaluate(&self, theta: f64) -> Result<Vec<f64>> {
        let red = self.reduced_state(theta)?;
        self.targets.iter().map(|t| probability(&red, t)).collect()
    }

    pub fn evaluate_target(&self, theta: f64, column: usize) -> Result<f64> {
        let red = self.reduced_state(theta)?;
        probability(&red, &self.targets[column])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub target: TargetKind,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub grid: Vec<f64>,
    pub columns: Vec<Column>,
}

impl SweepResult {
    pub fn backend(&self) -> Backend {
        self.config.backend
    }

    pub fn column(&self, target: TargetKind) -> Result<&Column> {
        self.columns
            .iter()
            .find(|c| c.target == target)
            .ok_or_else(|| Error::MissingColumn(target.to_string()))
    }

    /// CSV with a `theta` column followed by one column per target.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta");
        for c in &self.columns {
            out.push(',');
            out.push_str(c.target.column());
        }
        out.push('\n');
        for (i, theta) in self.grid.iter().enumerate() {
            write!(out, "{theta:.16e}").unwrap();
            for c in &self.columns {
                write!(out, ",{:.16e}", c.values[i]).unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// JSON document holding the result and the extrema of each column.
    pub fn to_document(&self, extrema: &[(TargetKind, Vec<Extremum>)]) -> String {
        #[derive(Serialize)]
        struct ColumnExtrema<'a> {
            target: TargetKind,
            extrema: &'a [Extremum],
        }
        #[derive(Serialize)]
        struct Document<'a> {
            #[serde(flatten)]
            result: &'a SweepResult,
            extrema: Vec<ColumnExtrema<'a>>,
        }
        let doc = Document {
            result: self,
            extrema: extrema
                .iter()
                .map(|(t, e)| ColumnExtrema { target: *t, extrema: e })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("sweep documents serialize")
    }
}

pub fn sweep_theta(config: &SweepConfig) -> Result<SweepResult> {
    config.grid.validate()?;
    let model = SweepModel::new(config)?;
    let grid = config.grid.points();
    let rows = grid
        .par_iter()
        .map(|&theta| model.evaluate(theta))
        .collect::<Result<Vec<_>>>()?;
    let columns = config
        .targets
        .iter()
        .enumerate()
        .map(|(j, &target)| Column {
            target,
            values: rows.iter().map(|r| r[j]).collect(),
        })
        .collect();
    Ok(SweepResult {
        config: config.clone(),
        grid,
        columns,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremumKind {
    Max,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub theta_star: f64,
    pub value: f64,
    pub kind: ExtremumKind,
    /// Final bracket width of the refinement.
    pub width: f64,
}

const REFINE_WIDTH: f64 = 1e-6;
const DEDUP_WINDOW: f64 = 1e-5;
const FLAT: f64 = 1e-14;

/// Golden-section search for a maximum of `f` on `[a, b]`.
fn golden_max<F>(mut a: f64, mut b: f64, f: F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > REFINE_WIDTH {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok((0.5 * (a + b), b - a))
}

/// Local extrema of one column, refined to `1e−6` rad.
///
/// Brackets come from sign changes of consecutive differences, so extrema
/// between grid points and short plateaus are caught. Grids spanning whole
/// `2π` periods are treated as circular, which exposes extrema at the end
/// points; such extrema are reported at every periodic image inside the
/// grid. A constant column yields no extrema.
pub fn find_extrema(result: &SweepResult, target: TargetKind) -> Result<Vec<Extremum>> {
    let column_index = result
        .columns
        .iter()
        .position(|c| c.target == target)
        .ok_or_else(|| Error::MissingColumn(target.to_string()))?;
    let model = SweepModel::new(&result.config)?;
    find_extrema_with(&model, &result.grid, &result.columns[column_index].values, column_index)
}

pub fn find_extrema_with(model: &SweepModel, grid: &[f64], values: &[f64], column: usize) -> Result<Vec<Extremum>> {
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    let spread =
        values.iter().copied().fold(f64::NEG_INFINITY, f64::max) - values.iter().copied().fold(f64::INFINITY, f64::min);
    if spread <= FLAT {
        return Ok(Vec::new());
    }

    let span = hi - lo;
    let periodic = GridSpec {
        lo,
        hi,
        count: grid.len(),
    }
    .is_periodic();
    let (xs, ys): (Vec<f64>, Vec<f64>) = if periodic && grid.len() >= 3 {
        let n = grid.len();
        let mut xs = vec![grid[n - 2] - span];
        let mut ys = vec![values[n - 2]];
        xs.extend_from_slice(grid);
        ys.extend_from_slice(values);
        xs.push(grid[1] + span);
        ys.push(values[1]);
        (xs, ys)
    } else {
        (grid.to_vec(), values.to_vec())
    };

    // (bracket lo, bracket hi, kind)
    let mut brackets = Vec::new();
    let mut last: Option<(usize, f64)> = None;
    for i in 0..ys.len() - 1 {
        let d = ys[i + 1] - ys[i];
        if d.abs() <= FLAT {
            continue;
        }
        let sign = d.signum();
        if let Some((start, prev)) = last {
            if prev != sign {
                let kind = if prev > 0.0 {
                    ExtremumKind::Max
                } else {
                    ExtremumKind::Min
                };
                brackets.push((xs[start], xs[i + 1], kind));
            }
        }
        // the bracket opens at the last point before the trend changed
        last = Some((i, sign));
    }

    let eval = |theta: f64| model.evaluate_target(theta, column);
    let refined = brackets
        .par_iter()
        .map(|&(a, b, kind)| {
            let (theta, width) = match kind {
                ExtremumKind::Max => golden_max(a, b, eval)?,
                ExtremumKind::Min => golden_max(a, b, |t| eval(t).map(|v| -v))?,
            };
            Ok((theta, width, kind))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut found: Vec<Extremum> = Vec::new();
    for (theta, width, kind) in refined {
        let images: Vec<f64> = if periodic {
            let k_max = (span / TAU).round() as i64 + 1;
            (-1..=k_max).map(|k| theta + k as f64 * TAU).collect()
        } else {
            vec![theta]
        };
        for t in images {
            if t < lo - DEDUP_WINDOW || t > hi + DEDUP_WINDOW {
                continue;
            }
            // images just past an end of the grid snap onto it
            let t = t.clamp(lo, hi);
            found.push(Extremum {
                theta_star: t,
                value: eval(t)?,
                kind,
                width,
            });
        }
    }
    found.sort_by(|a, b| a.theta_star.total_cmp(&b.theta_star));
    let mut deduped: Vec<Extremum> = Vec::with_capacity(found.len());
    for e in found {
        let dup = deduped
            .iter()
            .any(|d| d.kind == e.kind && (d.theta_star - e.theta_star).abs() < DEDUP_WINDOW);
        if !dup {
            deduped.push(e);
        }
    }
    Ok(deduped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn config(m: usize, n: usize, keep: (usize, usize), targets: Vec<TargetKind>, count: usize) -> SweepConfig {
        let mut c = SweepConfig::new(m, n, keep, targets);
        c.grid.count = count;
        c
    }

    #[test]
    fn grid_points() {
        let g = GridSpec::new(0.0, 1.0, 5).unwrap();
        assert_eq!(g.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(GridSpec::new(0.0, 1.0, 1).is_err());
        assert!(GridSpec::new(1.0, 1.0, 3).is_err());
        assert!(GridSpec::new(0.0, f64::INFINITY, 3).is_err());
        assert!(GridSpec::default().is_periodic());
        assert!(GridSpec::new(-PI, 3.0 * PI, 9).unwrap().is_periodic());
        assert!(!GridSpec::new(0.0, PI, 9).unwrap().is_periodic());
        let d = GridSpec::default().points();
        assert_eq!(d.len(), 1001);
        assert_eq!(d[1000], TAU);
        assert!(d.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn psi_plus_peaks_at_right_angles() {
        let res = sweep_theta(&config(3, 2, (1, 2), vec![TargetKind::PsiPlus], 1001)).unwrap();
        let col = &res.column(TargetKind::PsiPlus).unwrap().values;
        let best = col.iter().copied().fold(f64::MIN, f64::max);
        for r in 0..=4 {
            let idx = (r as f64 * FRAC_PI_2 / TAU * 1000.0).round() as usize;
            assert!((col[idx] - best).abs() < 1e-12, "r={r}");
        }
    }

    #[test]
    fn first_third_pair_peaks_at_zero() {
        let res = sweep_theta(&config(
            3,
            2,
            (1, 3),
            vec![TargetKind::PsiPlus, TargetKind::PsiMinus],
            201,
        ))
        .unwrap();
        for c in &res.columns {
            assert!((c.values[0] - 1.0 / 3.0).abs() < 1e-12);
            assert!((c.values[200] - 1.0 / 3.0).abs() < 1e-12);
            assert!(c.values.iter().all(|&v| v <= 1.0 / 3.0 + 1e-12));
        }
    }

    #[test]
    fn extrema_refine_and_reproduce() {
        let res = sweep_theta(&config(3, 2, (1, 2), vec![TargetKind::PsiPlus], 401)).unwrap();
        let ext = find_extrema(&res, TargetKind::PsiPlus).unwrap();
        let model = SweepModel::new(&res.config).unwrap();
        assert!(!ext.is_empty());
        for e in &ext {
            assert!(e.width <= 1e-6);
            let fresh = model.evaluate_target(e.theta_star, 0).unwrap();
            assert!((fresh - e.value).abs() <= 1e-9);
        }
        let maxima: Vec<f64> = ext
            .iter()
            .filter(|e| e.kind == ExtremumKind::Max)
            .map(|e| e.theta_star)
            .collect();
        assert_eq!(maxima.len(), 5, "{maxima:?}");
        for (r, t) in maxima.iter().enumerate() {
            assert!((t - r as f64 * FRAC_PI_2).abs() < 1e-4);
        }
    }

    #[test]
    fn extrema_are_mirror_symmetric() {
        let t = TargetKind::NoonMinus(2);
        let res = sweep_theta(&config(3, 2, (1, 2), vec![t], 401)).unwrap();
        let ext = find_extrema(&res, t).unwrap();
        for e in &ext {
            let mirror = 2.0 * PI - e.theta_star;
            assert!(
                ext.iter()
                    .any(|f| f.kind == e.kind && (f.theta_star - mirror).abs() < 1e-5),
                "no mirror for {e:?}"
            );
        }
    }

    #[test]
    fn constant_column_has_no_extrema() {
        // vacuum input: the kept pair is always |00⟩
        let res = sweep_theta(&config(2, 0, (1, 2), vec![TargetKind::PhiPlus], 51)).unwrap();
        assert!(res.columns[0].values.iter().all(|&v| (v - 0.5).abs() < 1e-12));
        assert!(find_extrema(&res, TargetKind::PhiPlus).unwrap().is_empty());
    }

    #[test]
    fn missing_column() {
        let res = sweep_theta(&config(3, 2, (1, 2), vec![TargetKind::PsiPlus], 11)).unwrap();
        assert!(matches!(
            find_extrema(&res, TargetKind::PhiMinus),
            Err(Error::MissingColumn(_))
        ));
    }

    #[test]
    fn non_periodic_grid_uses_interior_points() {
        let mut c = config(3, 2, (1, 2), vec![TargetKind::PsiPlus], 201);
        c.grid = GridSpec::new(0.1, 3.0, 201).unwrap();
        let res = sweep_theta(&c).unwrap();
        let ext = find_extrema(&res, TargetKind::PsiPlus).unwrap();
        assert!(ext.iter().all(|e| e.theta_star > 0.1 && e.theta_star < 3.0));
        assert!(ext
            .iter()
            .any(|e| e.kind == ExtremumKind::Max && (e.theta_star - FRAC_PI_2).abs() < 1e-4));
    }

    #[test]
    fn csv_layout() {
        let mut c = config(3, 2, (1, 2), vec![TargetKind::PsiPlus, TargetKind::NoonMinus(2)], 3);
        c.grid = GridSpec::new(0.0, FRAC_PI_4, 3).unwrap();
        let csv = sweep_theta(&c).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "theta,p_psi_plus,p_noon_minus");
        assert_eq!(lines.len(), 4);
        assert!(!csv.contains('\r'));
        assert!(lines[1].starts_with("0.0000000000000000e0,3.333333333333333"));
    }

    #[test]
    fn sweep_rejects_bad_config() {
        assert!(sweep_theta(&config(3, 4, (1, 2), vec![TargetKind::PsiPlus], 5)).is_err());
        assert!(sweep_theta(&config(3, 2, (1, 1), vec![TargetKind::PsiPlus], 5)).is_err());
        assert!(sweep_theta(&config(3, 2, (1, 4), vec![TargetKind::PsiPlus], 5)).is_err());
        assert!(sweep_theta(&config(3, 2, (1, 2), vec![TargetKind::PsiPlus], 1)).is_err());
    }

    #[test]
    fn custom_topology_takes_swept_angle() {
        let mut c = config(3, 2, (1, 2), vec![TargetKind::PsiPlus], 21);
        c.network = NetworkSource::Custom {
            network: NetworkSpec::chain(3, 123.0),
        };
        let custom = sweep_theta(&c).unwrap();
        c.network = NetworkSource::Chain;
        let chain = sweep_theta(&c).unwrap();
        assert_eq!(custom.columns, chain.columns);
    }
}
