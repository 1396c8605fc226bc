use std::fs;
use std::io::Write as _;
use std::path::Path;

use spectomo::basis::pauli_label;
use spectomo::counts::{estimate_g_from_counts, simulate_all_counts};
use spectomo::io::{
    counts_from_jsonl, counts_to_jsonl, footprint_csv, footprint_rows, footprint_svg, signal_from_csv, signal_from_json,
    signal_to_csv, signal_to_json, FitFile, LindbladFile,
};
use spectomo::lindblad::LindbladParams;
use spectomo::nonmarkov::{
    frame_mismatch_signal, gaussian_cz_signal, revival_signal, tpcp_violations, FrameConvention, FrameMismatchParams,
    GaussianCzParams, RevivalParams, ScenarioSignal,
};
use spectomo::random::random_channel;
use spectomo::rng::stream;
use spectomo::signal::{add_shot_noise, signal_nospam, signal_spam};
use spectomo::stats::wild_bootstrap_ci;
use spectomo::sweep::accuracy_sweep;
use spectomo::{fit as pencil_fit, quality_report, select_model_order, Complex64, Error, PencilConfig, Signal, SignalSource};

use crate::error::{CliError, CliResult};
use crate::spec::{
    frame_mismatch_parts, ideal_spectrum, n_qubits, parse_json, parse_target, ptm_from_file, spam_from_json,
    target_from_json, ChannelFile, ScenarioFile, SimSpec,
};
use crate::{
    BoundsArgs, ChannelArgs, Convention, FitArgs, FitOutputs, FootprintArgs, Format, IngestArgs, ScenarioArgs,
    ScenarioName, ScenarioParams, SelectArgs, SelectOptions, SimulateArgs, SweepArgs,
};

const MAX_DEFAULT_ORDER: usize = 15;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::File { path: path.display().to_string(), source })
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::File { path: path.display().to_string(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|source| CliError::File { path: "<stdout>".into(), source })
        }
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn format_for(explicit: Option<Format>, out: Option<&Path>, default: Format) -> Format {
    explicit.unwrap_or_else(|| match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some("json") => Format::Json,
        Some("csv") => Format::Csv,
        _ => default,
    })
}

fn render_signal(s: &Signal, format: Format) -> CliResult<String> {
    Ok(with_newline(match format {
        Format::Csv => signal_to_csv(s.values())?,
        Format::Json => signal_to_json(s)?,
    }))
}

/// Signal JSON when the text is an object, `k,g` CSV otherwise.
fn load_signal(path: &Path) -> CliResult<Signal> {
    let text = read(path)?;
    let malformed = |e: Error| CliError::Malformed(format!("{}: {e}", path.display()));
    if text.trim_start().starts_with('{') {
        signal_from_json(&text).map_err(malformed)
    } else {
        let values = signal_from_csv(&text).map_err(malformed)?;
        Signal::new(values, 0, None, SignalSource::SimulatedExact).map_err(malformed)
    }
}

fn missing(flag: &str, what: &str) -> CliError {
    CliError::Malformed(format!("--{flag} is required for {what}"))
}

fn channel_from_flags(c: &ChannelArgs) -> CliResult<Option<ChannelFile>> {
    let Some(name) = c.channel.as_deref() else {
        return Ok(None);
    };
    let angle = || c.angle.ok_or_else(|| missing("angle", name));
    let p = || c.p.ok_or_else(|| missing("p", name));
    Ok(Some(match name {
        "identity" => ChannelFile::Identity { qubits: c.qubits.unwrap_or(1) },
        "depolarizing" => ChannelFile::Depolarizing { p: p()?, qubits: c.qubits.unwrap_or(1) },
        "amplitude_damping" | "amplitude-damping" => ChannelFile::AmplitudeDamping { p: p()? },
        "rx" => ChannelFile::Rx { angle: angle()? },
        "ry" => ChannelFile::Ry { angle: angle()? },
        "rz" => ChannelFile::Rz { angle: angle()? },
        "cz" => ChannelFile::Cz,
        "cnot" => ChannelFile::Cnot,
        "lindblad" => ChannelFile::Lindblad(LindbladFile {
            params: LindbladParams {
                hx: c.hx.unwrap_or(0.0),
                hy: c.hy.unwrap_or(0.0),
                hz: c.hz.unwrap_or(0.0),
                gamma1: c.gamma1.unwrap_or(0.0),
                gamma_phi: c.gamma_phi.unwrap_or(0.0),
            },
            tau: c.tau.ok_or_else(|| missing("tau", name))?,
        }),
        other => return Err(CliError::Malformed(format!("unknown channel {other:?}"))),
    }))
}

fn scenario_from_flags(name: ScenarioName, p: &ScenarioParams, k: Option<usize>) -> CliResult<ScenarioFile> {
    Ok(match name {
        ScenarioName::GaussianCz => ScenarioFile::GaussianCz {
            sigma_degrees: p.sigma.ok_or_else(|| missing("sigma", "gaussian-cz"))?,
            order: p.order.unwrap_or(spectomo::nonmarkov::DEFAULT_QUADRATURE_ORDER),
            k,
        },
        ScenarioName::Revival => ScenarioFile::Revival {
            nbar: p.nbar.ok_or_else(|| missing("nbar", "revival"))?,
            omega_dt: p.omega_dt.ok_or_else(|| missing("omega-dt", "revival"))?,
            k,
        },
        ScenarioName::FrameMismatch => ScenarioFile::FrameMismatch {
            theta_degrees: p.theta.ok_or_else(|| missing("theta", "frame-mismatch"))?,
            base: p.base.clone().unwrap_or_else(|| "cnot".into()),
            convention: match p.convention {
                Some(Convention::Product) => FrameConvention::Product,
                _ => FrameConvention::ClosedForm,
            },
            k,
        },
    })
}

/// Generated signal plus the Hilbert-space dimension whose TPCP
/// necessities apply, if any.
fn scenario_signal(sc: &ScenarioFile, k: usize) -> CliResult<(ScenarioSignal, Option<usize>)> {
    let params = |e: Error| match e {
        Error::InvalidArgument(m) => CliError::Malformed(m),
        other => CliError::Core(other),
    };
    Ok(match sc {
        ScenarioFile::GaussianCz { sigma_degrees, order, .. } => {
            let mut p = GaussianCzParams::new(*sigma_degrees, k).map_err(params)?;
            p.order = *order;
            (gaussian_cz_signal(&p).map_err(params)?, Some(4))
        }
        ScenarioFile::Revival { nbar, omega_dt, .. } => {
            let p = RevivalParams::new(*nbar, *omega_dt, k).map_err(params)?;
            (revival_signal(&p).map_err(params)?, None)
        }
        ScenarioFile::FrameMismatch { theta_degrees, base, convention, .. } => {
            let (s, v) = frame_mismatch_parts(base, *theta_degrees)?;
            let d = s.dimension();
            let mut p = FrameMismatchParams::new(s, v, k).map_err(CliError::channel)?;
            p.convention = *convention;
            (frame_mismatch_signal(&p)?, Some(d))
        }
    })
}

pub fn simulate(a: SimulateArgs) -> CliResult<()> {
    let spec = match (&a.spec, &a.scenario) {
        (Some(path), _) => SimSpec::from_json(&read(path)?)?,
        (None, Some(name)) => SimSpec::Scenario(scenario_from_flags(*name, &a.scenario_params, a.k)?),
        (None, None) => SimSpec::Channel(
            channel_from_flags(&a.channel)?.ok_or_else(|| CliError::Malformed("give a spec file, --channel or --scenario".into()))?,
        ),
    };
    let format = format_for(a.format, a.out.as_deref(), Format::Csv);
    let s = match spec {
        SimSpec::Scenario(sc) => {
            if a.counts || a.spam.is_some() {
                return Err(CliError::Malformed("--counts and --spam apply to channels, not scenarios".into()));
            }
            let k = a.k.or(sc.k()).ok_or_else(|| missing("K", "simulate"))?;
            let (generated, _) = scenario_signal(&sc, k)?;
            for w in &generated.warnings {
                eprintln!("warning: {w}");
            }
            let mut g = generated.signal;
            if let Some(shots) = a.shots {
                g = add_shot_noise(&g, shots, a.seed)?;
            }
            return emit(a.out.as_deref(), &render_signal(&g, format)?);
        }
        SimSpec::Channel(c) => c.build()?,
        SimSpec::Ptm(f) => ptm_from_file(f)?,
    };
    let k = a.k.ok_or_else(|| missing("K", "simulate"))?;
    let spam = a.spam.as_deref().map(|p| read(p).and_then(|t| spam_from_json(&t))).transpose()?;
    if a.counts {
        let shots = a.shots.expect("clap enforces --shots with --counts");
        let records = simulate_all_counts(&s, spam.as_ref(), k, shots, a.seed).map_err(CliError::channel)?;
        return emit(a.out.as_deref(), &counts_to_jsonl(&records, n_qubits(&s))?);
    }
    let t = s.t_block();
    let exact = match &spam {
        Some(sp) => signal_spam(&t, sp, k).map_err(CliError::channel)?,
        None => signal_nospam(&t, k)?,
    };
    let exact = Signal::new(exact.into_values(), n_qubits(&s), None, SignalSource::SimulatedExact)?;
    let g = match a.shots {
        Some(shots) => add_shot_noise(&exact, shots, a.seed)?,
        None => exact,
    };
    emit(a.out.as_deref(), &render_signal(&g, format)?)
}

pub fn ingest(a: IngestArgs) -> CliResult<()> {
    let text = read(&a.counts)?;
    let (records, n) = counts_from_jsonl(&text).map_err(|e| CliError::Ingest(e.to_string()))?;
    let k = match a.k {
        Some(k) => k,
        None => records.iter().map(|r| r.k).max().unwrap_or(0),
    };
    let (g, shots) = estimate_g_from_counts(&records, n, k).map_err(|e| match e {
        Error::MissingSettings(list) => {
            let shown: Vec<String> =
                list.iter().map(|(mu, i, k)| format!("(pauli {}, prep {i}, k {k})", pauli_label(*mu, n))).collect();
            CliError::Ingest(format!("{} missing settings: {}", list.len(), shown.join(", ")))
        }
        other => CliError::Ingest(other.to_string()),
    })?;
    if !shots.consistent() {
        eprintln!("warning: shot counts vary across settings ({}..={}); n_samples reports the maximum", shots.min, shots.max);
    }
    let format = format_for(a.format, a.out.as_deref(), Format::Json);
    emit(a.out.as_deref(), &render_signal(&g, format)?)
}

fn default_n_max(k: usize, l: usize) -> usize {
    MAX_DEFAULT_ORDER.min(l).min(k + 1 - l).min(k / 4)
}

fn run_select(g: &[f64], l: usize, opts: &SelectOptions) -> CliResult<FitFile> {
    let k = g.len() - 1;
    if l == 0 || l > k {
        return Err(CliError::Infeasible(format!("L = {l} outside 1..={k}")));
    }
    let n_max = opts.n_max.unwrap_or_else(|| default_n_max(k, l));
    let sel = select_model_order(g, l, opts.n_min, n_max, opts.alpha).map_err(|e| match e {
        Error::InvalidArgument(m) => CliError::Malformed(m),
        other => CliError::pencil(other),
    })?;
    let mut f = FitFile::from_selection(&sel, opts.n_min, n_max)
        .ok_or_else(|| CliError::Infeasible(format!("no order in {}..={n_max} could be fitted", opts.n_min)))?;
    f.warnings.extend(sel.fits.iter().filter(|(_, f)| f.is_none()).map(|(n, _)| format!("order {n} was under-determined")));
    Ok(f)
}

fn run_fixed(g: &[f64], l: usize, n: usize) -> CliResult<FitFile> {
    let cfg = PencilConfig::new(g.len() - 1, l, n).map_err(CliError::pencil)?;
    let f = pencil_fit(g, &cfg).map_err(CliError::pencil)?;
    Ok(FitFile::from_fit(&f))
}

fn finish_fit(g: &[f64], mut f: FitFile, o: &FitOutputs) -> CliResult<()> {
    if let Some(b) = o.bootstrap {
        let cfg = PencilConfig::new(f.k, f.l, f.n).map_err(CliError::pencil)?;
        let report = wild_bootstrap_ci(g, &cfg, b, o.confidence, o.seed).map_err(|e| match e {
            Error::InvalidArgument(m) => CliError::Malformed(m),
            other => CliError::pencil(other),
        })?;
        f.confidence_intervals = Some(report);
    }
    let rows = footprint_rows(&f.eigenvalues(), &f.amplitudes());
    if let Some(path) = &o.footprint {
        emit(Some(path), &footprint_csv(&rows)?)?;
    }
    if let Some(path) = &o.svg {
        emit(Some(path), &footprint_svg(&rows))?;
    }
    let text = serde_json::to_string_pretty(&f).map_err(Error::from)?;
    emit(o.out.as_deref(), &with_newline(text))
}

pub fn fit(a: FitArgs) -> CliResult<()> {
    let g = load_signal(&a.signal)?;
    let k = g.k_max();
    let l = a.l.unwrap_or(k / 2);
    let f = match a.n {
        Some(n) => run_fixed(g.values(), l, n)?,
        None => run_select(g.values(), l, &a.selection)?,
    };
    finish_fit(g.values(), f, &a.outputs)
}

pub fn select(a: SelectArgs) -> CliResult<()> {
    let g = load_signal(&a.signal)?;
    let l = a.l.unwrap_or(g.k_max() / 2);
    let f = run_select(g.values(), l, &a.selection)?;
    finish_fit(g.values(), f, &a.outputs)
}

fn load_fit(path: &Path) -> CliResult<FitFile> {
    let f: FitFile = parse_json(&read(path)?, &path.display().to_string())?;
    if f.eigenvalues.is_empty() {
        return Err(CliError::Malformed(format!("{}: fit has no eigenvalues", path.display())));
    }
    Ok(f)
}

pub fn bounds(a: BoundsArgs) -> CliResult<()> {
    let f = load_fit(&a.fit)?;
    let u = match (&a.target, &a.target_file) {
        (Some(t), _) => parse_target(t)?,
        (None, Some(path)) => target_from_json(&read(path)?)?,
        (None, None) => unreachable!("clap requires a target"),
    };
    let d = u.nrows();
    let eigs: Vec<Complex64> = f.eigenvalues();
    let violations = tpcp_violations(&eigs, d, a.modulus_tolerance);
    if !violations.is_empty() {
        return Err(CliError::NotTpcp(format!(
            "{}; the bounds hold only for a gate that acts as the same TPCP map on every repetition",
            violations.join("; ")
        )));
    }
    if eigs.len() != d * d - 1 {
        return Err(CliError::Malformed(format!(
            "fit has {} eigenvalues but a {d}-dimensional target needs {}",
            eigs.len(),
            d * d - 1
        )));
    }
    let report = quality_report(&eigs, &ideal_spectrum(&u)?, d)?;
    let text = serde_json::to_string_pretty(&report).map_err(Error::from)?;
    emit(a.out.as_deref(), &with_newline(text))
}

pub fn footprint(a: FootprintArgs) -> CliResult<()> {
    let f = load_fit(&a.fit)?;
    let rows = footprint_rows(&f.eigenvalues(), &f.amplitudes());
    if let Some(path) = &a.svg {
        emit(Some(path), &footprint_svg(&rows))?;
    }
    emit(a.out.as_deref(), &footprint_csv(&rows)?)
}

pub fn sweep(a: SweepArgs) -> CliResult<()> {
    let s = match (&a.spec, channel_from_flags(&a.channel)?) {
        (Some(path), _) => match SimSpec::from_json(&read(path)?)? {
            SimSpec::Channel(c) => c.build()?,
            SimSpec::Ptm(f) => ptm_from_file(f)?,
            SimSpec::Scenario(_) => return Err(CliError::Malformed("sweep needs a channel, not a scenario".into())),
        },
        (None, Some(c)) => c.build()?,
        (None, None) => random_channel(2, 2, &mut stream(a.seed, u64::MAX))?,
    };
    if a.trials == 0 {
        return Err(CliError::Malformed("--trials must be at least 1".into()));
    }
    let rows = accuracy_sweep(&s.t_block(), &a.k, &a.l, a.shots, a.trials, a.seed)?;
    let mut text = String::from("K,L,n_samples,mean_delta2,failures\n");
    for r in rows {
        let shots = r.n_samples.map_or_else(|| "exact".to_string(), |n| n.to_string());
        text.push_str(&format!("{},{},{shots},{:e},{}\n", r.k, r.l, r.mean_delta2, r.failures));
    }
    emit(a.out.as_deref(), &text)
}

pub fn scenario(a: ScenarioArgs) -> CliResult<()> {
    let sc = scenario_from_flags(a.name, &a.params, Some(a.k))?;
    let (generated, d) = scenario_signal(&sc, a.k)?;
    if let Some(path) = &a.signal_out {
        let format = format_for(None, Some(path), Format::Csv);
        emit(Some(path), &render_signal(&generated.signal, format)?)?;
    }
    let g = generated.signal.values();
    let l = a.l.unwrap_or(a.k / 2);
    let mut f = match a.n {
        Some(n) => run_fixed(g, l, n)?,
        None => run_select(g, l, &a.selection)?,
    };
    f.warnings.extend(generated.warnings.iter().cloned());
    let eigs = f.eigenvalues();
    match d {
        Some(d) => f.warnings.extend(tpcp_violations(&eigs, d, 0.0).into_iter().map(|v| format!("not a repeated TPCP map: {v}"))),
        None => f.warnings.extend(
            eigs.iter().filter(|z| z.norm() > 1.0).map(|z| format!("eigenvalue {z} has modulus {:.9} > 1", z.norm())),
        ),
    }
    finish_fit(g, f, &a.outputs)
}
