//! File formats: JSON documents for spectra, targets, schedules, weights,
//! decompositions and priors, and CSV tables for curves and studies.
//!
//! CSV floats carry 17 significant digits; JSON floats use the shortest
//! representation that parses back to the same value.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bayes_phase::PhasePrior;
use crate::birkhoff::{BirkhoffDecomposition, BirkhoffTerm};
use crate::design::{DesignResult, ReductionStudyRow};
use crate::error::{Error, Result};
use crate::permutation::Permutation;
use crate::schedule::{Segment, SwitchingSchedule};
use crate::spectrum::{Spectrum, TargetVector};
use crate::weights::BistochasticMatrix;

/// `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFile {
    #[serde(default)]
    pub label: String,
    pub levels: Vec<f64>,
}

impl SpectrumFile {
    pub fn from_spectrum(s: &Spectrum<f64>) -> Self {
        SpectrumFile {
            label: s.label().to_string(),
            levels: s.levels().to_vec(),
        }
    }

    pub fn to_spectrum(&self) -> Result<Spectrum<f64>> {
        Ok(Spectrum::new(self.levels.clone())?.with_label(self.label.clone()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetFile {
    pub ratios: Vec<f64>,
}

impl TargetFile {
    pub fn to_target(&self) -> Result<TargetVector<f64>> {
        TargetVector::new(self.ratios.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentFile {
    pub fraction: f64,
    pub perm: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub total_time: f64,
    pub segments: Vec<SegmentFile>,
}

impl ScheduleFile {
    pub fn from_schedule(s: &SwitchingSchedule<f64>) -> Self {
        ScheduleFile {
            total_time: s.total_time(),
            segments: s
                .segments()
                .iter()
                .map(|g| SegmentFile {
                    fraction: g.fraction,
                    perm: g.perm.as_slice().to_vec(),
                })
                .collect(),
        }
    }

    pub fn to_schedule(&self) -> Result<SwitchingSchedule<f64>> {
        let segments = self
            .segments
            .iter()
            .map(|g| {
                Ok(Segment {
                    fraction: g.fraction,
                    perm: Permutation::new(g.perm.clone())?,
                })
            })
            .collect::<Result<_>>()?;
        SwitchingSchedule::new(segments, self.total_time)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermFile {
    pub weight: f64,
    pub perm: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionFile {
    pub terms: Vec<TermFile>,
}

impl DecompositionFile {
    pub fn from_decomposition(d: &BirkhoffDecomposition<f64>) -> Self {
        DecompositionFile {
            terms: d
                .terms
                .iter()
                .map(|t| TermFile {
                    weight: t.weight,
                    perm: t.perm.as_slice().to_vec(),
                })
                .collect(),
        }
    }

    pub fn to_decomposition(&self) -> Result<BirkhoffDecomposition<f64>> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                if !(t.weight > 0.0) {
                    return Err(Error::InvalidArgument(format!("term weight {}", t.weight)));
                }
                Ok(BirkhoffTerm {
                    weight: t.weight,
                    perm: Permutation::new(t.perm.clone())?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if terms.is_empty() {
            return Err(Error::InvalidArgument("decomposition has no terms".into()));
        }
        let n = terms[0].perm.len();
        if let Some(t) = terms.iter().find(|t| t.perm.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: t.perm.len(),
            });
        }
        Ok(BirkhoffDecomposition { terms })
    }
}

/// Weight matrix document, as written by the `design` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightsFile {
    pub weights: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effective: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub achieved_range: Option<f64>,
}

impl WeightsFile {
    pub fn from_design(d: &DesignResult<f64>) -> Self {
        WeightsFile {
            weights: d.weights.to_rows(),
            method: Some(d.method.as_str().to_string()),
            effective: Some(d.effective.levels().to_vec()),
            achieved_range: Some(d.achieved_range),
        }
    }

    pub fn to_weights(&self) -> Result<BistochasticMatrix<f64>> {
        BistochasticMatrix::from_rows(&self.weights)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakFile {
    pub w: f64,
    pub x: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum PriorFile {
    Flat,
    Delta { peaks: Vec<PeakFile> },
    Fourier { coeffs: Vec<(i64, f64, f64)> },
}

impl PriorFile {
    pub fn to_prior(&self) -> Result<PhasePrior> {
        match self {
            PriorFile::Flat => Ok(PhasePrior::Flat),
            PriorFile::Delta { peaks } => PhasePrior::delta(peaks.iter().map(|p| (p.w, p.x)).collect()),
            PriorFile::Fourier { coeffs } => {
                PhasePrior::fourier(coeffs.iter().map(|&(k, re, im)| (k, Complex64::new(re, im))))
            }
        }
    }

    pub fn from_prior(p: &PhasePrior) -> Self {
        match p {
            PhasePrior::Flat => PriorFile::Flat,
            PhasePrior::Delta(peaks) => PriorFile::Delta {
                peaks: peaks.iter().map(|&(w, x)| PeakFile { w, x }).collect(),
            },
            PhasePrior::Fourier(map) => PriorFile::Fourier {
                coeffs: map.iter().map(|(&k, p)| (k, p.re, p.im)).collect(),
            },
        }
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, to_json(value)?.as_bytes())
}

/// Builds a CSV table row by row.
#[derive(Clone, Debug)]
pub struct CsvTable {
    text: String,
}

/// One CSV cell.
pub enum Cell<'a> {
    F(f64),
    U(u64),
    S(&'a str),
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        CsvTable { text }
    }

    pub fn row(&mut self, cells: &[Cell<'_>]) -> &mut Self {
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            match c {
                Cell::F(x) => self.text.push_str(&fmt_f64(*x)),
                Cell::U(x) => write!(self.text, "{x}").expect("string write"),
                Cell::S(s) => self.text.push_str(s),
            }
        }
        self.text.push('\n');
        self
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.text.as_bytes())
    }
}

pub fn study_csv(rows: &[ReductionStudyRow]) -> CsvTable {
    let mut t = CsvTable::new(&["n", "mean_range", "mean_min_range", "samples", "seed"]);
    for r in rows {
        t.row(&[
            Cell::U(r.n as u64),
            Cell::F(r.mean_range),
            Cell::F(r.mean_min_range),
            Cell::U(r.samples as u64),
            Cell::U(r.seed),
        ]);
    }
    t
}

pub fn curve_csv(points: &[crate::bayes_freq::CurvePoint]) -> CsvTable {
    let mut t = CsvTable::new(&["tau", "bmse", "qfi", "restart_winner", "iters"]);
    for p in points {
        t.row(&[
            Cell::F(p.tau),
            Cell::F(p.bmse),
            Cell::F(p.qfi),
            Cell::U(p.restart_winner as u64),
            Cell::U(p.iters as u64),
        ]);
    }
    t
}

/// `n,cost,trace_norm` rows.
pub fn phase_csv(rows: &[(usize, f64, f64)]) -> CsvTable {
    let mut t = CsvTable::new(&["n", "cost", "trace_norm"]);
    for &(n, c, tn) in rows {
        t.row(&[Cell::U(n as u64), Cell::F(c), Cell::F(tn)]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn prior_json_forms() {
        let flat: PriorFile = serde_json::from_str(r#"{"type":"flat"}"#).unwrap();
        assert_eq!(flat.to_prior().unwrap(), PhasePrior::Flat);
        let d: PriorFile =
            serde_json::from_str(r#"{"type":"delta","peaks":[{"w":0.5,"x":1.0},{"w":0.5,"x":-1.0}]}"#).unwrap();
        assert!(matches!(d.to_prior().unwrap(), PhasePrior::Delta(p) if p.len() == 2));
        let f: PriorFile = serde_json::from_str(r#"{"type":"fourier","coeffs":[[0,1,0],[1,0.3,0.1]]}"#).unwrap();
        let p = f.to_prior().unwrap();
        assert_eq!(p.coefficient(-1), Complex64::new(0.3, -0.1));
        assert_eq!(PriorFile::from_prior(&p), PriorFile::Fourier { coeffs: vec![(0, 1.0, 0.0), (1, 0.3, 0.1)] });
    }

    #[test]
    fn schedule_round_trip() {
        let text = r#"{"total_time": 2.0, "segments": [{"fraction": 0.25, "perm": [1,0]}, {"fraction": 0.75, "perm": [0,1]}]}"#;
        let f: ScheduleFile = serde_json::from_str(text).unwrap();
        let s = f.to_schedule().unwrap();
        assert_eq!(ScheduleFile::from_schedule(&s), f);
        let bad = r#"{"total_time": 2.0, "segments": [{"fraction": 0.25, "perm": [1,1]}]}"#;
        assert!(serde_json::from_str::<ScheduleFile>(bad).unwrap().to_schedule().is_err());
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub").join("a.json");
        write_json(&p, &TargetFile { ratios: vec![0.0, 1.0] }).unwrap();
        write_json(&p, &TargetFile { ratios: vec![1.0, 0.0] }).unwrap();
        let back: TargetFile = read_json(&p).unwrap();
        assert_eq!(back.ratios, vec![1.0, 0.0]);
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
