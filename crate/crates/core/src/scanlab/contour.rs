use rayon::prelude::*;
use serde::Serialize;

use super::emit::{format_number, Record};
use super::grid::GridSpec;
use crate::error::{Error, Result};
use crate::lindblad::NoiseParams;
use crate::randomtime::TimingModel;
use crate::survival::{efficiency_ratio, StorageSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordStatus {
    Ok,
    /// Corrected success probability is exactly 1, so R is undefined.
    Degenerate,
}

impl RecordStatus {
    fn as_str(self) -> &'static str {
        match self {
            RecordStatus::Ok => "ok",
            RecordStatus::Degenerate => "degenerate",
        }
    }
}

/// Efficiency ratio at one (τ, T_ed) grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourRecord {
    pub tau: f64,
    pub ted: f64,
    #[serde(rename = "R")]
    pub ratio: Option<f64>,
    pub status: RecordStatus,
}

impl Record for ContourRecord {
    fn header() -> &'static [&'static str] {
        &["tau", "ted", "R", "status"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            format_number(self.tau),
            format_number(self.ted),
            self.ratio.map(format_number).unwrap_or_default(),
            self.status.as_str().to_string(),
        ]
    }
}

/// Evaluates the efficiency ratio over τ × T_ed, τ-major: all T_ed values
/// for the first τ, then the next τ.
///
/// Points are evaluated in parallel; the output order never depends on the
/// worker count.
pub fn ratio_contour_grid(
    noise: NoiseParams,
    storage_time: f64,
    tau_grid: &GridSpec,
    ted_grid: &GridSpec,
) -> Result<Vec<ContourRecord>> {
    let taus = tau_grid.values();
    let teds = ted_grid.values();
    if let Some(&neg) = taus.iter().find(|t| **t < 0.0) {
        return Err(Error::InvalidParameter {
            name: "tau",
            requirement: ">= 0",
            value: neg,
        });
    }
    let points: Vec<(f64, f64)> = taus
        .iter()
        .flat_map(|&tau| teds.iter().map(move |&ted| (tau, ted)))
        .collect();
    points
        .into_par_iter()
        .map(|(tau, ted)| {
            let sched = StorageSchedule::single(storage_time, ted)?;
            match efficiency_ratio(noise, TimingModel::new(tau)?, &sched) {
                Ok(r) => Ok(ContourRecord {
                    tau,
                    ted,
                    ratio: Some(r),
                    status: RecordStatus::Ok,
                }),
                Err(Error::DegenerateDenominator) => Ok(ContourRecord {
                    tau,
                    ted,
                    ratio: None,
                    status: RecordStatus::Degenerate,
                }),
                Err(e) => Err(e),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scanlab::Spacing;

    #[test]
    fn grid_points_match_direct_calls() {
        let noise = NoiseParams::new(1e-5).unwrap();
        let taus = GridSpec::new("tau", 1e-4, 1e-1, 7, Spacing::Logarithmic).unwrap();
        let teds = GridSpec::new("ted", 0.1, 10.0, 5, Spacing::Linear).unwrap();
        let records = ratio_contour_grid(noise, 1e4, &taus, &teds).unwrap();
        assert_eq!(records.len(), 35);
        for (i, rec) in records.iter().enumerate() {
            assert_eq!(rec.tau, taus.values()[i / 5]);
            assert_eq!(rec.ted, teds.values()[i % 5]);
            let direct = efficiency_ratio(
                noise,
                TimingModel::new(rec.tau).unwrap(),
                &StorageSchedule::single(1e4, rec.ted).unwrap(),
            )
            .unwrap();
            assert_eq!(rec.ratio, Some(direct));
        }
    }

    #[test]
    fn degenerate_points_are_kept() {
        let taus = GridSpec::new("tau", 0.0, 0.1, 2, Spacing::Linear).unwrap();
        let teds = GridSpec::new("ted", 0.0, 1.0, 2, Spacing::Linear).unwrap();
        let records = ratio_contour_grid(NoiseParams::noiseless(), 1e4, &taus, &teds).unwrap();
        assert_eq!(records.len(), 4);
        // Noiseless storage survives with certainty unless encode/decode
        // takes time under timing noise.
        for rec in &records[..3] {
            assert_eq!(rec.status, RecordStatus::Degenerate);
            assert_eq!(rec.ratio, None);
            assert_eq!(rec.fields()[2], "");
        }
        assert_eq!(records[3].status, RecordStatus::Ok);
    }

    #[test]
    fn zero_tau_column_is_perfect_timing_limit() {
        let noise = NoiseParams::new(1e-5).unwrap();
        let taus = GridSpec::new("tau", 0.0, 1e-3, 2, Spacing::Linear).unwrap();
        let teds = GridSpec::new("ted", 0.1, 10.0, 4, Spacing::Logarithmic).unwrap();
        let records = ratio_contour_grid(noise, 1e4, &taus, &teds).unwrap();
        let ps = crate::survival::p_survival_single(noise, 1e4).unwrap();
        let corrected = crate::survival::p_survival_encoded(ps).value();
        for rec in records.iter().filter(|r| r.tau == 0.0) {
            let bare = crate::survival::p_survival_single(noise, 1e4 + rec.ted)
                .unwrap()
                .value();
            let expect = (1.0 - bare.powi(5)) / (1.0 - corrected);
            assert!((rec.ratio.unwrap() - expect).abs() < 1e-12);
        }
    }
}
