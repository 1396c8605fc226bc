//! Channel and scenario descriptions, from JSON files or command-line flags.

use serde::Deserialize;
use serde_json::Value;
use spectomo::channels::{amplitude_damping, cnot, cz, depolarizing, rx, ry, rz, unitary};
use spectomo::io::{ComplexValue, LindbladFile, PtmFile};
use spectomo::lindblad::evolve;
use spectomo::linalg::kron;
use spectomo::nonmarkov::{FrameConvention, DEFAULT_QUADRATURE_ORDER};
use spectomo::{BasisKind, Complex64, Ptm, Spam};

pub type CMatrix = spectomo::CMatrix<f64>;

use crate::error::{CliError, CliResult};

fn one() -> usize {
    1
}

/// `{"channel": "<name>", …}`.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "channel", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelFile {
    Identity {
        #[serde(default = "one")]
        qubits: usize,
    },
    Depolarizing {
        p: f64,
        #[serde(default = "one")]
        qubits: usize,
    },
    AmplitudeDamping {
        p: f64,
    },
    Rx {
        angle: f64,
    },
    Ry {
        angle: f64,
    },
    Rz {
        angle: f64,
    },
    Cz,
    Cnot,
    Unitary {
        matrix: Vec<Vec<ComplexValue>>,
    },
    Lindblad(LindbladFile),
}

fn complex_matrix(rows: &[Vec<ComplexValue>]) -> CliResult<CMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Malformed("unitary matrix must be square and nonempty".into()));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j].into()))
}

impl ChannelFile {
    /// The unitary behind a unitary channel, or `None` for noisy channels.
    pub fn unitary_matrix(&self) -> CliResult<Option<CMatrix>> {
        Ok(match self {
            ChannelFile::Identity { qubits } => {
                let d = 1usize << *qubits;
                Some(CMatrix::identity(d, d))
            }
            ChannelFile::Rx { angle } => Some(rx(*angle)),
            ChannelFile::Ry { angle } => Some(ry(*angle)),
            ChannelFile::Rz { angle } => Some(rz(*angle)),
            ChannelFile::Cz => Some(cz()),
            ChannelFile::Cnot => Some(cnot()),
            ChannelFile::Unitary { matrix } => Some(complex_matrix(matrix)?),
            _ => None,
        })
    }

    pub fn build(&self) -> CliResult<Ptm> {
        if let Some(u) = self.unitary_matrix()? {
            return unitary(&u).map_err(CliError::channel);
        }
        let s = match self {
            ChannelFile::Depolarizing { p, qubits } => depolarizing(*qubits, *p),
            ChannelFile::AmplitudeDamping { p } => amplitude_damping(*p),
            ChannelFile::Lindblad(f) => f.checked().and_then(|f| evolve(&f.params, f.tau)),
            _ => unreachable!("unitary channels handled above"),
        };
        s.map_err(CliError::channel)
    }
}

/// `{"scenario": "<name>", …}`.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "scenario", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioFile {
    GaussianCz {
        sigma_degrees: f64,
        #[serde(default = "default_order")]
        order: usize,
        #[serde(rename = "K", default)]
        k: Option<usize>,
    },
    Revival {
        nbar: f64,
        omega_dt: f64,
        #[serde(rename = "K", default)]
        k: Option<usize>,
    },
    FrameMismatch {
        theta_degrees: f64,
        #[serde(default = "default_base")]
        base: String,
        #[serde(default)]
        convention: FrameConvention,
        #[serde(rename = "K", default)]
        k: Option<usize>,
    },
}

fn default_order() -> usize {
    DEFAULT_QUADRATURE_ORDER
}

fn default_base() -> String {
    "cnot".into()
}

impl ScenarioFile {
    pub fn k(&self) -> Option<usize> {
        match self {
            ScenarioFile::GaussianCz { k, .. } | ScenarioFile::Revival { k, .. } | ScenarioFile::FrameMismatch { k, .. } => *k,
        }
    }
}

/// Base gate and `V = I ⊗ Ry(θ)` of the frame-mismatch scenario.
pub fn frame_mismatch_parts(base: &str, theta_degrees: f64) -> CliResult<(Ptm, CMatrix)> {
    let gate = match base {
        "cnot" => cnot(),
        "cz" => cz(),
        other => return Err(CliError::Malformed(format!("unknown frame-mismatch base gate {other:?} (expected cnot or cz)"))),
    };
    let s = unitary(&gate).map_err(CliError::channel)?;
    let v = kron(&CMatrix::identity(2, 2), &ry(theta_degrees.to_radians()));
    Ok((s, v))
}

/// Anything `simulate` can turn into a signal.
#[derive(Clone, Debug)]
pub enum SimSpec {
    Channel(ChannelFile),
    Ptm(PtmFile),
    Scenario(ScenarioFile),
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| CliError::Malformed(format!("{what}: {e}")))
}

impl SimSpec {
    /// Dispatches on the `scenario`, `channel` or `matrix` key.
    pub fn from_json(text: &str) -> CliResult<Self> {
        let v: Value = parse_json(text, "spec")?;
        let obj = v.as_object().ok_or_else(|| CliError::Malformed("spec must be a JSON object".into()))?;
        let malformed = |e: serde_json::Error| CliError::Malformed(format!("spec: {e}"));
        if obj.contains_key("scenario") {
            Ok(SimSpec::Scenario(serde_json::from_value(v).map_err(malformed)?))
        } else if obj.contains_key("channel") {
            Ok(SimSpec::Channel(serde_json::from_value(v).map_err(malformed)?))
        } else if obj.contains_key("matrix") {
            Ok(SimSpec::Ptm(serde_json::from_value(v).map_err(malformed)?))
        } else {
            Err(CliError::Malformed("spec needs a \"scenario\", \"channel\" or \"matrix\" key".into()))
        }
    }
}

/// Builds and validates a transfer matrix from a PTM file.
pub fn ptm_from_file(f: PtmFile) -> CliResult<Ptm> {
    let s = f.into_ptm().map_err(CliError::channel)?;
    let report = s.validate();
    if !report.all_ok() {
        return Err(CliError::InvalidChannel(report.notes.join("; ")));
    }
    Ok(s)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpamFile {
    prep: PtmFile,
    meas: PtmFile,
}

/// `{"prep": <PTM>, "meas": <PTM>}`.
pub fn spam_from_json(text: &str) -> CliResult<Spam> {
    let f: SpamFile = parse_json(text, "SPAM file")?;
    let prep = f.prep.into_ptm().map_err(CliError::channel)?;
    let meas = f.meas.into_ptm().map_err(CliError::channel)?;
    Spam::new(prep, meas).map_err(CliError::channel)
}

/// Target unitary from `name` or `name:angle` (angle in radians).
pub fn parse_target(text: &str) -> CliResult<CMatrix> {
    let (name, arg) = match text.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (text, None),
    };
    let angle = || -> CliResult<f64> {
        arg.ok_or_else(|| CliError::Malformed(format!("target {name} needs an angle, e.g. {name}:0.785398")))?
            .parse()
            .map_err(|_| CliError::Malformed(format!("bad angle in target {text:?}")))
    };
    let qubits = || -> CliResult<usize> {
        arg.map_or(Ok(1), |a| a.parse().map_err(|_| CliError::Malformed(format!("bad qubit count in target {text:?}"))))
    };
    let spec = match name {
        "identity" => ChannelFile::Identity { qubits: qubits()? },
        "rx" => ChannelFile::Rx { angle: angle()? },
        "ry" => ChannelFile::Ry { angle: angle()? },
        "rz" => ChannelFile::Rz { angle: angle()? },
        "cz" => ChannelFile::Cz,
        "cnot" => ChannelFile::Cnot,
        other => return Err(CliError::Malformed(format!("unknown target {other:?}"))),
    };
    Ok(spec.unitary_matrix()?.expect("named targets are unitary"))
}

/// Target unitary from a channel file; noisy channels are rejected.
pub fn target_from_json(text: &str) -> CliResult<CMatrix> {
    let spec: ChannelFile = parse_json(text, "target")?;
    spec.unitary_matrix()?.ok_or_else(|| CliError::Malformed("target must be a unitary channel".into()))
}

/// Qubit count of a transfer matrix, 0 for non-qubit systems.
pub fn n_qubits(s: &Ptm) -> usize {
    match s.basis() {
        BasisKind::Pauli { qubits } => qubits,
        BasisKind::GellMann => 0,
    }
}

pub fn ideal_spectrum(u: &CMatrix) -> CliResult<Vec<Complex64>> {
    let s = unitary(u).map_err(CliError::channel)?;
    Ok(s.spectrum()?.eigenvalues)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispatch_on_keys() {
        assert!(matches!(
            SimSpec::from_json(r#"{"channel":"depolarizing","p":0.1}"#).unwrap(),
            SimSpec::Channel(ChannelFile::Depolarizing { qubits: 1, .. })
        ));
        assert!(matches!(
            SimSpec::from_json(r#"{"scenario":"revival","nbar":5,"omega_dt":0.05,"K":9}"#).unwrap(),
            SimSpec::Scenario(ScenarioFile::Revival { k: Some(9), .. })
        ));
        assert!(matches!(
            SimSpec::from_json(r#"{"d":2,"matrix":[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]],"basis":"pauli"}"#).unwrap(),
            SimSpec::Ptm(_)
        ));
        for bad in ["[]", "{}", "{\"channel\":\"warp\"}", "{\"channel\":\"rx\"}", "not json"] {
            assert_eq!(SimSpec::from_json(bad).unwrap_err().exit_code(), 2, "{bad}");
        }
    }

    #[test]
    fn invalid_channels_map_to_exit_3() {
        let bad_p = ChannelFile::Depolarizing { p: 1.5, qubits: 1 };
        assert_eq!(bad_p.build().unwrap_err().exit_code(), 3);
        let row = |a: f64, b: f64| vec![ComplexValue { re: a, im: 0.0 }, ComplexValue { re: b, im: 0.0 }];
        let not_unitary = ChannelFile::Unitary { matrix: vec![row(1.0, 1.0), row(0.0, 1.0)] };
        assert_eq!(not_unitary.build().unwrap_err().exit_code(), 3);
    }

    #[test]
    fn targets() {
        assert_eq!(parse_target("cnot").unwrap().nrows(), 4);
        assert_eq!(parse_target("identity:2").unwrap().nrows(), 4);
        assert_eq!(parse_target("identity").unwrap().nrows(), 2);
        assert!(parse_target("rx").is_err());
        assert!(parse_target("rx:abc").is_err());
        let e = ideal_spectrum(&parse_target("rx:1.5707963267948966").unwrap()).unwrap();
        assert_eq!(e.len(), 3);
        assert!(target_from_json(r#"{"channel":"amplitude_damping","p":0.1}"#).is_err());
    }
}
