//! Parameter sweeps over any numeric configuration key.

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{LoadedConfig, ScanSection};
use crate::dataset::Dataset;
use crate::error::CliError;
use crate::models::Target;
use crate::validate::ToleranceProfile;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSpec {
    pub target: Target,
    pub sweep: ScanSection,
}

impl ScanSpec {
    /// Parse `key=start:stop:points`.
    pub fn parse_sweep(target: Target, text: &str) -> Result<Self, CliError> {
        let bad = || {
            CliError::Config(format!(
                "--sweep expects key=start:stop:points, got `{text}`"
            ))
        };
        let (key, range) = text.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        let [start, stop, points] = parts[..] else {
            return Err(bad());
        };
        let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
        Ok(Self {
            target,
            sweep: ScanSection {
                parameter: qualify(target, key.trim()),
                start: number(start)?,
                stop: number(stop)?,
                points: points.trim().parse().map_err(|_| bad())?,
            },
        })
    }

    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        let s = &self.sweep;
        if s.points < 2 {
            return Err(CliError::Config(format!(
                "a sweep needs at least 2 points, got {}",
                s.points
            )));
        }
        if !(s.start.is_finite() && s.stop.is_finite()) || s.start >= s.stop {
            return Err(CliError::Config(format!(
                "sweep range must be finite and increasing, got [{}, {}]",
                s.start, s.stop
            )));
        }
        Ok(grid(s.start, s.stop, s.points))
    }

    /// Header name of the swept column.
    pub fn column_name(&self) -> String {
        let prefix = format!("{}.", self.target.name());
        match self.sweep.parameter.strip_prefix(&prefix) {
            Some(short) => short.to_string(),
            None => self.sweep.parameter.clone(),
        }
    }
}

/// Bare keys refer to the target's own table.
fn qualify(target: Target, key: &str) -> String {
    if key.contains('.') {
        key.to_string()
    } else {
        format!("{}.{key}", target.name())
    }
}

/// `n` evenly spaced points with both ends exact.
pub fn grid(start: f64, stop: f64, n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i + 1 == n {
                stop
            } else {
                start + (stop - start) * (i as f64 / last)
            }
        })
        .collect()
}

/// Evaluate the target at every sweep point. Rows are assembled in input
/// order whatever the number of workers.
pub fn run_scan(
    loaded: &LoadedConfig,
    spec: &ScanSpec,
    tolerances: ToleranceProfile,
    workers: Option<usize>,
) -> Result<Dataset, CliError> {
    let key = &spec.sweep.parameter;
    if loaded.is_set(key) {
        return Err(CliError::Config(format!("`{key}` is both swept and fixed")));
    }
    let points = spec.points()?;
    // surfaces unknown keys before any work is spawned
    loaded.with_value(key, points[0])?;

    let target = spec.target;
    let eval = |v: &f64| -> Result<Vec<f64>, CliError> {
        let cfg = loaded.with_value(key, *v)?;
        target.evaluate(&cfg).map_err(|source| CliError::AtPoint {
            point: format!("{key} = {v:e}"),
            source,
        })
    };
    let results: Vec<Result<Vec<f64>, CliError>> = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("worker pool: {e}")))?
            .install(|| points.par_iter().map(eval).collect()),
        None => points.par_iter().map(eval).collect(),
    };

    let short = spec.column_name();
    let model_cols = target.columns();
    let dup = model_cols.iter().position(|c| *c == short);
    let mut columns = vec![short.clone()];
    columns.extend(
        model_cols
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != dup)
            .map(|(_, c)| c.to_string()),
    );
    let mut rows = Vec::with_capacity(points.len());
    for (v, res) in points.iter().zip(results) {
        let values = res?;
        let mut row = vec![*v];
        row.extend(
            values
                .iter()
                .enumerate()
                .filter(|(i, _)| Some(*i) != dup)
                .map(|(_, x)| *x),
        );
        rows.push(row);
    }

    let mut data = Dataset::new(
        &format!("{}-scan", target.name()),
        columns,
        rows,
        &loaded.config,
        tolerances,
    )?;
    data.meta.sweep = Some(spec.sweep.clone());
    if let Some(note) = regime_note(&data) {
        data.meta.notes.push(note);
    }
    Ok(data)
}

/// Evaluate the configuration as given.
pub fn run_point(
    loaded: &LoadedConfig,
    target: Target,
    tolerances: ToleranceProfile,
) -> Result<Dataset, CliError> {
    let row = target.evaluate(&loaded.config)?;
    let columns = target.columns().iter().map(|c| c.to_string()).collect();
    let mut data = Dataset::new(
        target.name(),
        columns,
        vec![row],
        &loaded.config,
        tolerances,
    )?;
    if let Some(note) = regime_note(&data) {
        data.meta.notes.push(note);
    }
    Ok(data)
}

fn regime_note(data: &Dataset) -> Option<String> {
    let flags = data.column("regime_ok")?;
    let outside = flags.iter().filter(|f| **f == 0.0).count();
    (outside > 0).then(|| {
        format!(
            "{outside} of {} points lie outside the asymptotic regime; values there are the printed forms, not claimed accurate",
            flags.len()
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loaded(sets: &[&str]) -> LoadedConfig {
        let sets: Vec<String> = sets.iter().map(|s| s.to_string()).collect();
        LoadedConfig::from_str_with("", &sets).unwrap()
    }

    #[test]
    fn parse_sweep_qualifies_bare_keys() {
        let s = ScanSpec::parse_sweep(Target::Mos, "phi_ratio=-4:4:801").unwrap();
        assert_eq!(s.sweep.parameter, "mos.phi_ratio");
        assert_eq!(s.sweep.points, 801);
        assert_eq!(s.column_name(), "phi_ratio");
        let s = ScanSpec::parse_sweep(Target::Mos, "optics.l=1e-4:2e-4:3").unwrap();
        assert_eq!(s.column_name(), "optics.l");
        assert!(ScanSpec::parse_sweep(Target::Mos, "phi_ratio=-4:4").is_err());
    }

    #[test]
    fn grid_hits_landmarks_exactly() {
        let g = grid(-4.0, 4.0, 801);
        assert_eq!(g[0], -4.0);
        assert_eq!(g[400], 0.0);
        assert_eq!(g[500], 1.0);
        assert_eq!(g[800], 4.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn mos_sweep_columns() {
        let spec = ScanSpec::parse_sweep(Target::Mos, "phi_ratio=-4:4:801").unwrap();
        let d = run_scan(&loaded(&[]), &spec, ToleranceProfile::default(), Some(2)).unwrap();
        assert_eq!(
            &d.columns[..3],
            &["phi_ratio", "g_omega0_over_g00", "g_gamma0_over_g00"]
        );
        assert_eq!(d.rows.len(), 801);
        assert_eq!(d.rows[400][1], 1.0);
        assert!(d.abscissa_increasing());
    }

    #[test]
    fn single_point_is_config_error() {
        let spec = ScanSpec::parse_sweep(Target::Mos, "phi_ratio=-4:4:1").unwrap();
        let err = run_scan(&loaded(&[]), &spec, ToleranceProfile::default(), None).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
    }

    #[test]
    fn bad_ranges_and_keys() {
        for text in ["phi_ratio=4:-4:10", "phi_ratio=0:inf:10", "nonsense=0:1:10"] {
            let spec = ScanSpec::parse_sweep(Target::Mos, text).unwrap();
            let err = run_scan(&loaded(&[]), &spec, ToleranceProfile::default(), None).unwrap_err();
            assert!(matches!(err, CliError::Config(_)), "{text}");
        }
    }

    #[test]
    fn swept_and_fixed_is_rejected() {
        let spec = ScanSpec::parse_sweep(Target::Mos, "phi_ratio=0:1:3").unwrap();
        let err = run_scan(
            &loaded(&["mos.phi_ratio=2"]),
            &spec,
            ToleranceProfile::default(),
            None,
        )
        .unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
    }

    #[test]
    fn model_errors_name_the_point() {
        let spec = ScanSpec::parse_sweep(Target::Mos, "t=0.5:1.5:3").unwrap();
        let err = run_scan(&loaded(&[]), &spec, ToleranceProfile::default(), None).unwrap_err();
        match err {
            CliError::AtPoint { point, .. } => assert_eq!(point, "mos.t = 1.5e0"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn worker_count_does_not_change_bytes() {
        let spec = ScanSpec::parse_sweep(Target::Mate, "x=1e-6:1.2e-6:41").unwrap();
        let a = run_scan(&loaded(&[]), &spec, ToleranceProfile::default(), Some(1)).unwrap();
        let b = run_scan(&loaded(&[]), &spec, ToleranceProfile::default(), Some(4)).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.meta_toml().unwrap(), b.meta_toml().unwrap());
    }
}
