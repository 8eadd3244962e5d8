use serde::Serialize;

use super::emit::{format_number, Record};
use crate::error::Result;
use crate::lindblad::NoiseParams;
use crate::randomtime::TimingModel;
use crate::survival::{efficiency_ratio, StorageSchedule};

/// Smallest T_ed/T probed; below it the ratio is treated as its T_ed → 0 value.
const MIN_FRACTION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BreakEvenStatus {
    /// R crosses 1 at the reported T_ed/T.
    Crossing,
    /// R < 1 even for vanishing T_ed: correction never helps.
    NeverBeneficial,
    /// R > 1 for every T_ed up to T.
    AlwaysBeneficial,
}

/// Where the efficiency ratio drops through 1 for one decoherence rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BreakEven {
    pub gamma: f64,
    pub tau: f64,
    pub storage_time: f64,
    /// R at the smallest probed T_ed.
    pub ratio_at_min: f64,
    pub ted_over_t: Option<f64>,
    pub status: BreakEvenStatus,
}

impl Record for BreakEven {
    fn header() -> &'static [&'static str] {
        &["gamma", "tau", "T", "R_min_ted", "ted_over_T", "status"]
    }

    fn fields(&self) -> Vec<String> {
        let status = match self.status {
            BreakEvenStatus::Crossing => "crossing",
            BreakEvenStatus::NeverBeneficial => "never_beneficial",
            BreakEvenStatus::AlwaysBeneficial => "always_beneficial",
        };
        vec![
            format_number(self.gamma),
            format_number(self.tau),
            format_number(self.storage_time),
            format_number(self.ratio_at_min),
            self.ted_over_t.map(format_number).unwrap_or_default(),
            status.to_string(),
        ]
    }
}

/// Locates the R = 1 boundary in T_ed/T for each γ by bisection in
/// log(T_ed/T) over [1e-9, 1]. R decreases with T_ed on that range.
pub fn break_even_report(
    timing: TimingModel,
    storage_time: f64,
    gammas: &[f64],
) -> Result<Vec<BreakEven>> {
    gammas
        .iter()
        .map(|&gamma| {
            let noise = NoiseParams::new(gamma)?;
            let ratio = |fraction: f64| -> Result<f64> {
                efficiency_ratio(
                    noise,
                    timing,
                    &StorageSchedule::single(storage_time, fraction * storage_time)?,
                )
            };
            let ratio_at_min = ratio(MIN_FRACTION)?;
            let mut out = BreakEven {
                gamma,
                tau: timing.tau(),
                storage_time,
                ratio_at_min,
                ted_over_t: None,
                status: BreakEvenStatus::Crossing,
            };
            if ratio_at_min < 1.0 {
                out.status = BreakEvenStatus::NeverBeneficial;
                return Ok(out);
            }
            if ratio(1.0)? >= 1.0 {
                out.status = BreakEvenStatus::AlwaysBeneficial;
                return Ok(out);
            }
            let (mut lo, mut hi) = (MIN_FRACTION.ln(), 0.0f64);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if ratio(mid.exp())? >= 1.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-13 {
                    break;
                }
            }
            out.ted_over_t = Some((0.5 * (lo + hi)).exp());
            Ok(out)
        })
        .collect()
}
