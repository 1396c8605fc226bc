//! File formats: signals (CSV/JSON), counts (JSONL), fits and footprints.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use nalgebra::DMatrix;

use crate::basis::{pauli_index, pauli_label, BasisKind};
use crate::counts::CountsRecord;
use crate::error::{Error, Result};
use crate::lindblad::LindbladParams;
use crate::ptm::PauliTransferMatrix;
use crate::pencil::{ModelSelection, PencilFit, PARAMS_PER_EIGENVALUE};
use crate::signal::{SignalSource, SpectralSignal};
use crate::stats::BootstrapReport;

/// A complex number as `{"re": …, "im": …}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex<f64>> for ComplexValue {
    fn from(z: Complex<f64>) -> Self {
        ComplexValue { re: z.re, im: z.im }
    }
}

impl From<ComplexValue> for Complex<f64> {
    fn from(z: ComplexValue) -> Self {
        Complex::new(z.re, z.im)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisName {
    Pauli,
    Gellmann,
}

/// `{"d": …, "matrix": [[…]], "basis": "pauli"|"gellmann"}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtmFile {
    pub d: usize,
    pub matrix: Vec<Vec<f64>>,
    pub basis: BasisName,
}

impl PtmFile {
    pub fn from_ptm(s: &PauliTransferMatrix<f64>) -> Self {
        let m = s.matrix();
        PtmFile {
            d: s.dimension(),
            matrix: (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect(),
            basis: match s.basis() {
                BasisKind::Pauli { .. } => BasisName::Pauli,
                BasisKind::GellMann => BasisName::Gellmann,
            },
        }
    }

    pub fn into_ptm(self) -> Result<PauliTransferMatrix<f64>> {
        let kind = match self.basis {
            BasisName::Gellmann if self.d == 3 => BasisKind::GellMann,
            BasisName::Pauli if self.d.is_power_of_two() && self.d >= 2 => BasisKind::Pauli { qubits: self.d.trailing_zeros() as usize },
            _ => return Err(Error::Dimension(format!("no {:?} basis for d = {}", self.basis, self.d))),
        };
        let n = self.matrix.len();
        if self.matrix.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("matrix rows have unequal lengths".into()));
        }
        let flat: Vec<f64> = self.matrix.into_iter().flatten().collect();
        PauliTransferMatrix::new(kind, DMatrix::from_row_slice(n, n, &flat))
    }
}

pub fn ptm_to_json(s: &PauliTransferMatrix<f64>) -> Result<String> {
    Ok(serde_json::to_string_pretty(&PtmFile::from_ptm(s))?)
}

pub fn ptm_from_json(text: &str) -> Result<PauliTransferMatrix<f64>> {
    serde_json::from_str::<PtmFile>(text)?.into_ptm()
}

/// Lindblad parameters together with the evolution time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LindbladFile {
    #[serde(flatten)]
    pub params: LindbladParams<f64>,
    pub tau: f64,
}

impl LindbladFile {
    /// Re-validates the rates, which deserialization alone does not.
    pub fn checked(self) -> Result<Self> {
        let p = self.params;
        LindbladParams::new(p.hx, p.hy, p.hz, p.gamma1, p.gamma_phi)?;
        Ok(self)
    }
}

/// Shots per experiment, or the literal `"exact"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SamplesField {
    Shots(u64),
    Label(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalFile {
    pub n_qubits: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub n_samples: SamplesField,
    pub g: Vec<f64>,
    pub source: SignalSource,
}

impl SignalFile {
    pub fn from_signal(s: &SpectralSignal<f64>) -> Self {
        SignalFile {
            n_qubits: s.n_qubits,
            k: s.k_max(),
            n_samples: match s.n_samples {
                Some(n) => SamplesField::Shots(n),
                None => SamplesField::Label("exact".into()),
            },
            g: s.values().to_vec(),
            source: s.source,
        }
    }

    pub fn into_signal(self) -> Result<SpectralSignal<f64>> {
        if self.g.len() != self.k + 1 {
            return Err(Error::InvalidArgument(format!("K = {} but {} values", self.k, self.g.len())));
        }
        let n_samples = match self.n_samples {
            SamplesField::Shots(n) => Some(n),
            SamplesField::Label(ref l) if l == "exact" => None,
            SamplesField::Label(l) => return Err(Error::InvalidArgument(format!("n_samples must be a count or \"exact\", got {l:?}"))),
        };
        SpectralSignal::new(self.g, self.n_qubits, n_samples, self.source)
    }
}

pub fn signal_to_json(s: &SpectralSignal<f64>) -> Result<String> {
    Ok(serde_json::to_string_pretty(&SignalFile::from_signal(s))?)
}

pub fn signal_from_json(text: &str) -> Result<SpectralSignal<f64>> {
    serde_json::from_str::<SignalFile>(text)?.into_signal()
}

/// `k,g` rows.
pub fn signal_to_csv(values: &[f64]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "g"]).map_err(csv_error)?;
    for (k, g) in values.iter().enumerate() {
        w.write_record([k.to_string(), g.to_string()]).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Parse { line, message: e.to_string() }
}

/// Parses `k,g` rows; `k` must run 0, 1, 2, … without gaps.
pub fn signal_from_csv(text: &str) -> Result<Vec<f64>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = r.headers().map_err(csv_error)?.clone();
    if headers.len() != 2 || &headers[0] != "k" || &headers[1] != "g" {
        return Err(Error::Parse { line: 1, message: "expected header `k,g`".into() });
    }
    let mut out = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let line = row + 2;
        let rec = rec.map_err(csv_error)?;
        let bad = |m: String| Error::Parse { line, message: m };
        let k: usize = rec[0].parse().map_err(|_| bad(format!("bad index {:?}", &rec[0])))?;
        let g: f64 = rec[1].parse().map_err(|_| bad(format!("bad value {:?}", &rec[1])))?;
        if k != out.len() {
            return Err(bad(format!("expected k = {}, found {k}", out.len())));
        }
        out.push(g);
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct CountsLine {
    pauli: String,
    prep: usize,
    k: usize,
    counts: BTreeMap<String, u64>,
}

/// Parses counts JSONL; the Pauli label length fixes the qubit count, which
/// must agree across lines. Blank lines are skipped.
pub fn counts_from_jsonl(text: &str) -> Result<(Vec<CountsRecord>, usize)> {
    let mut out = Vec::new();
    let mut qubits = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let bad = |m: String| Error::Parse { line, message: m };
        let rec: CountsLine = serde_json::from_str(raw).map_err(|e| bad(e.to_string()))?;
        let pauli = pauli_index(&rec.pauli).ok_or_else(|| bad(format!("unknown Pauli label {:?}", rec.pauli)))?;
        if pauli == 0 {
            return Err(bad("identity is not a traceless Pauli".into()));
        }
        let n = rec.pauli.len();
        if *qubits.get_or_insert(n) != n {
            return Err(bad(format!("label {:?} disagrees with earlier qubit count", rec.pauli)));
        }
        let mut counts = BTreeMap::new();
        for (outcome, c) in rec.counts {
            let j: usize = outcome.parse().map_err(|_| bad(format!("bad outcome {outcome:?}")))?;
            counts.insert(j, c);
        }
        let record = CountsRecord { pauli, prep: rec.prep, k: rec.k, counts };
        if record.shots() == 0 {
            return Err(bad("record has no shots".into()));
        }
        out.push(record);
    }
    let qubits = qubits.ok_or(Error::Parse { line: 0, message: "no records".into() })?;
    Ok((out, qubits))
}

pub fn counts_to_jsonl(records: &[CountsRecord], n_qubits: usize) -> Result<String> {
    let mut s = String::new();
    for r in records {
        let line = CountsLine {
            pauli: pauli_label(r.pauli, n_qubits),
            prep: r.prep,
            k: r.k,
            counts: r.counts.iter().map(|(j, c)| (j.to_string(), *c)).collect(),
        };
        s.push_str(&serde_json::to_string(&line)?);
        s.push('\n');
    }
    Ok(s)
}

/// One nested-model comparison `N-1 → N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PValue {
    #[serde(rename = "N")]
    pub n: usize,
    pub p: f64,
}

/// Model-selection provenance stored with a fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionInfo {
    pub alpha: f64,
    pub n_min: usize,
    pub n_max: usize,
    pub comparison: String,
    pub params_per_eigenvalue: usize,
    /// `(N, rms)` for every order that could be fitted.
    pub rms_by_order: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitFile {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub eigenvalues: Vec<ComplexValue>,
    pub amplitudes: Vec<ComplexValue>,
    pub rms: f64,
    pub p_values: Vec<PValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selection: Option<SelectionInfo>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence_intervals: Option<BootstrapReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl FitFile {
    pub fn from_fit(fit: &PencilFit<f64>) -> Self {
        FitFile {
            n: fit.config.n,
            l: fit.config.l,
            k: fit.config.k,
            eigenvalues: fit.eigenvalues.iter().map(|z| (*z).into()).collect(),
            amplitudes: fit.amplitudes.iter().map(|z| (*z).into()).collect(),
            rms: fit.rms,
            p_values: Vec::new(),
            selection: None,
            confidence_intervals: None,
            warnings: fit.warnings.clone(),
        }
    }

    /// The chosen fit of a selection run, or `None` if it failed.
    pub fn from_selection(sel: &ModelSelection<f64>, n_min: usize, n_max: usize) -> Option<Self> {
        let mut f = Self::from_fit(sel.chosen_fit()?);
        f.p_values = sel.p_values.iter().map(|&(n, p)| PValue { n, p }).collect();
        f.selection = Some(SelectionInfo {
            alpha: sel.alpha,
            n_min,
            n_max,
            comparison: "consecutive nested F-test (N-1 vs N)".into(),
            params_per_eigenvalue: PARAMS_PER_EIGENVALUE,
            rms_by_order: sel.fits.iter().filter_map(|(n, f)| f.as_ref().map(|f| (*n, f.rms))).collect(),
        });
        Some(f)
    }

    pub fn eigenvalues(&self) -> Vec<Complex<f64>> {
        self.eigenvalues.iter().map(|z| (*z).into()).collect()
    }

    pub fn amplitudes(&self) -> Vec<Complex<f64>> {
        self.amplitudes.iter().map(|z| (*z).into()).collect()
    }
}

/// One point of the spectral footprint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FootprintRow {
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    pub phase_degrees: f64,
    pub amplitude_re: f64,
    pub amplitude_im: f64,
}

pub fn footprint_rows(eigenvalues: &[Complex<f64>], amplitudes: &[Complex<f64>]) -> Vec<FootprintRow> {
    eigenvalues
        .iter()
        .zip(amplitudes)
        .map(|(l, a)| FootprintRow {
            re: l.re,
            im: l.im,
            modulus: l.re.hypot(l.im),
            phase_degrees: l.im.atan2(l.re).to_degrees(),
            amplitude_re: a.re,
            amplitude_im: a.im,
        })
        .collect()
}

pub fn footprint_csv(rows: &[FootprintRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    if rows.is_empty() {
        w.write_record(["re", "im", "modulus", "phase_degrees", "amplitude_re", "amplitude_im"]).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidArgument(e.to_string()))
}

/// Static polar scatter: unit circle, axes, one marker per eigenvalue with
/// radius growing with `|A|`. Points outside the unit circle are drawn red.
pub fn footprint_svg(rows: &[FootprintRow]) -> String {
    const SIZE: f64 = 400.0;
    const C: f64 = SIZE / 2.0;
    let r_max = rows.iter().map(|r| r.modulus).fold(1.0, f64::max) * 1.1;
    let scale = (C - 20.0) / r_max;
    let a_max = rows.iter().map(|r| r.amplitude_re.hypot(r.amplitude_im)).fold(0.0, f64::max);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#);
    let _ = writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let _ = writeln!(s, r##"<line x1="0" y1="{C}" x2="{SIZE}" y2="{C}" stroke="#bbb"/>"##);
    let _ = writeln!(s, r##"<line x1="{C}" y1="0" x2="{C}" y2="{SIZE}" stroke="#bbb"/>"##);
    let _ = writeln!(s, r#"<circle cx="{C}" cy="{C}" r="{:.3}" fill="none" stroke="black"/>"#, scale);
    for r in rows {
        let x = C + r.re * scale;
        let y = C - r.im * scale;
        let amp = r.amplitude_re.hypot(r.amplitude_im);
        let radius = if a_max > 0.0 { 3.0 + 5.0 * amp / a_max } else { 3.0 };
        let color = if r.modulus > 1.0 { "red" } else { "steelblue" };
        let _ = writeln!(
            s,
            r#"<circle cx="{x:.3}" cy="{y:.3}" r="{radius:.3}" fill="{color}" fill-opacity="0.7"><title>|λ|={:.6} arg={:.3}°</title></circle>"#,
            r.modulus, r.phase_degrees
        );
    }
    s.push_str("</svg>\n");
    s
}
