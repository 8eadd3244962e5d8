use serde::Serialize;

use super::emit::{format_number, Record};
use crate::error::{Error, Result};
use crate::lindblad::NoiseParams;
use crate::randomtime::TimingModel;
use crate::survival::{p_repeated, StorageSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RepeatRecord {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "P_N")]
    pub p_n: f64,
}

impl Record for RepeatRecord {
    fn header() -> &'static [&'static str] {
        &["N", "P_N"]
    }

    fn fields(&self) -> Vec<String> {
        vec![self.n.to_string(), format_number(self.p_n)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepetitionScan {
    /// Smallest N attaining the maximum of P_N.
    pub n_opt: u32,
    pub table: Vec<RepeatRecord>,
}

impl RepetitionScan {
    /// The optimum sits on the last scanned N, so the true maximum may lie
    /// beyond the scan.
    pub fn at_scan_edge(&self) -> bool {
        self.table.last().is_some_and(|r| r.n == self.n_opt)
    }

    pub fn best(&self) -> f64 {
        self.table[(self.n_opt - 1) as usize].p_n
    }
}

/// Evaluates P_N for N = 1..=n_max and picks the smallest maximizing N.
pub fn optimize_repetitions(
    noise: NoiseParams,
    timing: TimingModel,
    storage_time: f64,
    encode_decode_time: f64,
    n_max: u32,
) -> Result<RepetitionScan> {
    if n_max == 0 {
        return Err(Error::InvalidParameter {
            name: "n_max",
            requirement: ">= 1",
            value: 0.0,
        });
    }
    let table = (1..=n_max)
        .map(|n| {
            let sched = StorageSchedule::new(storage_time, encode_decode_time, n)?;
            Ok(RepeatRecord {
                n,
                p_n: p_repeated(noise, timing, &sched)?.value(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n_opt = table
        .iter()
        .fold(None::<RepeatRecord>, |best, r| match best {
            Some(b) if b.p_n >= r.p_n => Some(b),
            _ => Some(*r),
        })
        .map(|r| r.n)
        .unwrap_or(1);
    Ok(RepetitionScan { n_opt, table })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scan(tau: f64, n_max: u32) -> RepetitionScan {
        optimize_repetitions(
            NoiseParams::new(1e-5).unwrap(),
            TimingModel::new(tau).unwrap(),
            1e4,
            1.0,
            n_max,
        )
        .unwrap()
    }

    #[test]
    fn published_optima() {
        assert_eq!(scan(0.003, 20).n_opt, 6);
        assert_eq!(scan(0.01, 20).n_opt, 3);
        assert_eq!(scan(0.05, 20).n_opt, 1);
    }

    #[test]
    fn table_matches_direct_calls() {
        let s = scan(0.01, 32);
        assert_eq!(s.table.len(), 32);
        for r in &s.table {
            let sched = StorageSchedule::new(1e4, 1.0, r.n).unwrap();
            let direct = p_repeated(
                NoiseParams::new(1e-5).unwrap(),
                TimingModel::new(0.01).unwrap(),
                &sched,
            )
            .unwrap();
            assert_eq!(r.p_n, direct.value());
        }
        assert!(!s.at_scan_edge());
    }

    #[test]
    fn flags_optimum_at_scan_edge() {
        let s = optimize_repetitions(
            NoiseParams::new(1e-5).unwrap(),
            TimingModel::deterministic(),
            1e4,
            1.0,
            8,
        )
        .unwrap();
        assert_eq!(s.n_opt, 8);
        assert!(s.at_scan_edge());
        assert!(optimize_repetitions(
            NoiseParams::new(1e-5).unwrap(),
            TimingModel::deterministic(),
            1e4,
            1.0,
            0
        )
        .is_err());
    }

    #[test]
    fn ties_resolve_to_smallest_n() {
        // Without storage noise or timing noise every N gives P_N = 1.
        let s = optimize_repetitions(
            NoiseParams::noiseless(),
            TimingModel::deterministic(),
            1e4,
            1.0,
            5,
        )
        .unwrap();
        assert_eq!(s.n_opt, 1);
    }
}
