use std::collections::HashMap;
use std::f64::consts::{LN_2, SQRT_2};
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use commonbath::channel::{
    apply_channel, dilation_kraus, evolve_analytic, kraus_closed_form, kraus_from_choi, DensityMatrix4,
    EnvironmentModel, KrausSet,
};
use commonbath::entanglement::{concurrence, static_witness};
use commonbath::numerics::CMatrix;
use commonbath::photonics::{
    compile, parse_netlist, render_template, run_experiment, PhotonState, PhotonicsError, Polarization, TransverseMode,
    DETECTOR_IDS, FIG1_NETLIST, FIG3_NETLIST,
};
use commonbath::sampling::{random_density_matrix, seeded_rng};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::ConfigFile;
use crate::error::CliError;
use crate::output::{emit, Cell, Format, Table};
use crate::{Builtin, Common, InputState, Param};

/// Residual or discrepancy above which `kraus` reports a self-check failure.
const SELF_CHECK_TOL: f64 = 1e-6;
/// Amplitudes at or below this magnitude are omitted from circuit output.
const AMPLITUDE_FLOOR: f64 = 1e-15;

struct Resolved {
    out: Option<PathBuf>,
    format: Format,
    seed: u64,
}

fn resolve(common: &Common, cfg: &ConfigFile) -> Result<Resolved, CliError> {
    let format = match (common.format, &cfg.format) {
        (Some(f), _) => f,
        (None, Some(s)) => Format::parse(s)?,
        (None, None) => Format::Csv,
    };
    Ok(Resolved { out: common.out.clone().or(cfg.out.clone()), format, seed: common.seed.or(cfg.seed).unwrap_or(0) })
}

fn value_enum<T: ValueEnum>(s: &str, what: &str) -> Result<T, CliError> {
    T::from_str(s, false).map_err(|_| CliError::Usage(format!("invalid {what} `{s}`")))
}

fn finish(table: &Table, r: &Resolved) -> Result<(), CliError> {
    emit(&table.render(r.format)?, r.out.as_deref())
}

pub struct CurveFlags {
    pub param: Option<Param>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub points: Option<usize>,
}

/// Sweep points, evaluated in parallel; rows stay in sweep order.
pub fn curve(common: &Common, flags: CurveFlags) -> Result<(), CliError> {
    let cfg = ConfigFile::load(common.config.as_deref())?;
    let r = resolve(common, &cfg)?;
    let param = match (flags.param, &cfg.param) {
        (Some(p), _) => p,
        (None, Some(s)) => value_enum(s, "param")?,
        (None, None) => Param::GammaT,
    };
    let start = flags.start.or(cfg.start).unwrap_or(0.0);
    let stop = flags.stop.or(cfg.stop).unwrap_or(5.0);
    let points = flags.points.or(cfg.points).unwrap_or(11);
    if !(start.is_finite() && stop.is_finite()) || start < 0.0 {
        return Err(CliError::Usage("start and stop must be finite and non-negative".into()));
    }
    if points < 2 || start >= stop {
        return Err(CliError::Usage("a sweep needs points ≥ 2 and start < stop".into()));
    }

    let step = (stop - start) / (points - 1) as f64;
    let rows: Vec<Result<Vec<Cell>, CliError>> = (0..points)
        .into_par_iter()
        .map(|k| {
            let x = if k == points - 1 { stop } else { start + step * k as f64 };
            let (analytic, rho) = match param {
                Param::GammaT => {
                    let (set, _) = kraus_closed_form(x).map_err(|e| CliError::SelfCheck(e.to_string()))?;
                    (0.5 * (1.0 - (-2.0 * x).exp()), apply_channel(&set, &DensityMatrix4::eg()))
                }
                Param::Gt => {
                    let set = dilation_kraus(x, EnvironmentModel::SingleModeCavity)
                        .map_err(|e| CliError::SelfCheck(e.to_string()))?;
                    ((SQRT_2 * x).sin().powi(2) / 2.0, apply_channel(&set, &DensityMatrix4::eg()))
                }
            };
            let rho = rho.map_err(|e| CliError::SelfCheck(e.to_string()))?;
            let numeric = concurrence(&rho).map_err(|e| CliError::SelfCheck(e.to_string()))?.concurrence;
            Ok(vec![
                Cell::Num(x),
                Cell::Num(analytic),
                Cell::Num(numeric),
                Cell::Num(static_witness().expectation(&rho)),
            ])
        })
        .collect();

    let column = match param {
        Param::GammaT => "gammaT",
        Param::Gt => "gt",
    };
    let mut table = Table::new(vec![column, "concurrence_analytic", "concurrence_numeric", "witness_trace"]);
    table.rows = rows.into_iter().collect::<Result<_, _>>()?;
    finish(&table, &r)
}

fn matrix_json(m: &CMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| Value::from((0..m.cols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect::<Vec<_>>()))
        .collect();
    Value::Array(rows)
}

fn set_json(set: &KrausSet) -> Value {
    let ops: Vec<Value> = set
        .labels()
        .iter()
        .zip(set.operators())
        .map(|(l, m)| json!({ "label": l.to_string(), "matrix": matrix_json(m) }))
        .collect();
    json!({ "basis": format!("{:?}", set.basis()).to_lowercase(), "operators": ops })
}

/// Both Kraus sets, their completeness residuals and the worst disagreement
/// with the exact evolution over 20 random states.
pub fn kraus(common: &Common, gamma_t: Option<f64>) -> Result<(), CliError> {
    let cfg = ConfigFile::load(common.config.as_deref())?;
    let r = resolve(common, &cfg)?;
    let g = gamma_t.or(cfg.gamma_t).unwrap_or(1.0);
    if !(g.is_finite() && g >= 0.0) {
        return Err(CliError::Usage(format!("Γt must be finite and non-negative, got {g}")));
    }
    let check = |e: commonbath::channel::ChannelError| CliError::SelfCheck(e.to_string());
    let (closed, _) = kraus_closed_form(g).map_err(check)?;
    let choi = kraus_from_choi(g).map_err(check)?;
    let residual_closed = closed.completeness_residual();
    let residual_choi = choi.completeness_residual();

    let mut rng = seeded_rng(r.seed);
    let mut discrepancy: f64 = 0.0;
    for _ in 0..20 {
        let rho = random_density_matrix(&mut rng);
        let exact = evolve_analytic(&rho, g).map_err(check)?;
        let a = apply_channel(&closed, &rho).map_err(check)?;
        let b = apply_channel(&choi, &rho).map_err(check)?;
        discrepancy = discrepancy.max(exact.max_diff(&a)).max(exact.max_diff(&b)).max(a.max_diff(&b));
    }

    let text = match r.format {
        Format::Json => {
            let v = json!({
                "gammaT": g,
                "closed_form": set_json(&closed),
                "choi": set_json(&choi),
                "residual_closed_form": residual_closed,
                "residual_choi": residual_choi,
                "max_action_discrepancy": discrepancy,
            });
            format!("{}\n", serde_json::to_string_pretty(&v).expect("serializable"))
        }
        Format::Csv => {
            let mut table = Table::new(vec!["set", "basis", "label", "row", "col", "re", "im"]);
            for (name, set) in [("closed_form", &closed), ("choi", &choi)] {
                let basis = format!("{:?}", set.basis()).to_lowercase();
                for (l, m) in set.labels().iter().zip(set.operators()) {
                    for i in 0..m.rows() {
                        for j in 0..m.cols() {
                            table.rows.push(vec![
                                Cell::Text(name.into()),
                                Cell::Text(basis.clone()),
                                Cell::Text(l.to_string()),
                                Cell::Int(i as u64),
                                Cell::Int(j as u64),
                                Cell::Num(m[(i, j)].re),
                                Cell::Num(m[(i, j)].im),
                            ]);
                        }
                    }
                }
            }
            eprintln!("residual_closed_form = {residual_closed:e}");
            eprintln!("residual_choi = {residual_choi:e}");
            eprintln!("max_action_discrepancy = {discrepancy:e}");
            table.to_csv()?
        }
    };
    emit(&text, r.out.as_deref())?;

    let worst = residual_closed.max(residual_choi);
    if worst > SELF_CHECK_TOL || discrepancy > SELF_CHECK_TOL {
        return Err(CliError::SelfCheck(format!(
            "completeness residual {worst:e}, action discrepancy {discrepancy:e} (limit {SELF_CHECK_TOL:e})"
        )));
    }
    Ok(())
}

pub struct CircuitFlags {
    pub netlist: Option<PathBuf>,
    pub builtin: Option<Builtin>,
    pub set: Vec<String>,
    pub state: Option<InputState>,
    pub input: Option<String>,
}

fn read_netlist(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn netlist_error(e: PhotonicsError) -> CliError {
    match e {
        PhotonicsError::Netlist(n) if n.is_syntax() => CliError::Usage(format!("parse error: {n}")),
        PhotonicsError::Netlist(n) => CliError::Validation(n.to_string()),
        other => CliError::SelfCheck(other.to_string()),
    }
}

/// Final amplitudes per (polarization, mode, path) and detector probabilities.
pub fn circuit(common: &Common, flags: CircuitFlags) -> Result<(), CliError> {
    let cfg = ConfigFile::load(common.config.as_deref())?;
    let r = resolve(common, &cfg)?;

    let builtin = match (flags.builtin, &cfg.builtin) {
        (Some(b), _) => Some(b),
        (None, Some(s)) if flags.netlist.is_none() => Some(value_enum(s, "builtin")?),
        _ => None,
    };
    let text = match (builtin, flags.netlist.as_ref().or(cfg.netlist.as_ref())) {
        (Some(Builtin::Fig1), _) => FIG1_NETLIST.to_string(),
        (Some(Builtin::Fig3), _) => FIG3_NETLIST.to_string(),
        (None, Some(path)) => read_netlist(path)?,
        (None, None) => return Err(CliError::Usage("circuit needs --netlist or --builtin".into())),
    };

    let mut values: HashMap<String, String> =
        cfg.set.iter().map(|(k, v)| (k.clone(), v.as_str().map_or_else(|| v.to_string(), str::to_string))).collect();
    for kv in &flags.set {
        let (k, v) =
            kv.split_once('=').ok_or_else(|| CliError::Usage(format!("--set expects NAME=VALUE, got `{kv}`")))?;
        values.insert(k.to_string(), v.to_string());
    }
    let rendered = render_template(&text, &values).map_err(|e| netlist_error(e.into()))?;
    let ir = parse_netlist(&rendered).map_err(|e| netlist_error(e.into()))?;
    let compiled = compile(&ir).map_err(netlist_error)?;

    let state = match (flags.state, &cfg.state) {
        (Some(s), _) => Some(s),
        (None, Some(s)) => Some(value_enum(s, "state")?),
        (None, None) => None,
    };
    let input = match state {
        Some(s) => {
            let label = flags
                .input
                .clone()
                .or(cfg.input.clone())
                .or(ir.prep().map(|p| p.path.clone()))
                .or(ir.inputs().first().cloned())
                .ok_or_else(|| CliError::Usage("the circuit has no input path for --state".into()))?;
            let path =
                compiled.path_index(&label).ok_or_else(|| CliError::Usage(format!("unknown input path `{label}`")))?;
            PhotonState::basis(s as usize, path, compiled.path_count())
        }
        None => {
            compiled.prep_state().ok_or_else(|| CliError::Usage("the netlist has no source; pass --state".into()))?
        }
    };
    let out = compiled.propagate(&input);

    let mut table = Table::new(vec!["kind", "name", "pol", "mode", "re", "im", "probability"]);
    for path in 0..compiled.path_count() {
        let name = compiled.path_label(path).map_or_else(|| format!("vacuum{path}"), str::to_string);
        for pol in [Polarization::V, Polarization::H] {
            for mode in [TransverseMode::V, TransverseMode::H] {
                let a = out.amplitude(pol, mode, path);
                if a.norm() > AMPLITUDE_FLOOR {
                    table.rows.push(vec![
                        Cell::Text("amplitude".into()),
                        Cell::Text(name.clone()),
                        Cell::Text(pol.to_string()),
                        Cell::Text(mode.to_string()),
                        Cell::Num(a.re),
                        Cell::Num(a.im),
                        Cell::Num(a.norm_sqr()),
                    ]);
                }
            }
        }
    }
    for (id, p) in compiled.detector_probabilities(&out) {
        table.rows.push(vec![
            Cell::Text("detector".into()),
            Cell::Text(id),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Num(p),
        ]);
    }
    finish(&table, &r)
}

/// Counts, estimates and exact references for one simulated run.
pub fn experiment(common: &Common, gamma_t: Option<f64>, shots: Option<u64>) -> Result<(), CliError> {
    let cfg = ConfigFile::load(common.config.as_deref())?;
    let r = resolve(common, &cfg)?;
    let g = gamma_t.or(cfg.gamma_t).unwrap_or(LN_2);
    let shots = shots.or(cfg.shots).unwrap_or(100_000);
    let outcome = run_experiment(g, shots, r.seed).map_err(|e| match e {
        PhotonicsError::InvalidArgument(m) => CliError::Usage(m),
        other => CliError::SelfCheck(other.to_string()),
    })?;

    let mut columns = vec!["gammaT", "theta1", "theta2", "shots", "seed"];
    let mut row = vec![
        Cell::Num(g),
        Cell::Num(outcome.angles.theta1),
        Cell::Num(outcome.angles.theta2),
        Cell::Int(shots),
        Cell::Int(r.seed),
    ];
    const COUNT_COLUMNS: [&str; 4] = ["C1", "C2", "C3", "C4"];
    const PROB_COLUMNS: [&str; 4] = ["p1", "p2", "p3", "p4"];
    for (k, id) in DETECTOR_IDS.iter().enumerate() {
        columns.push(COUNT_COLUMNS[k]);
        row.push(Cell::Int(outcome.record.count(id)));
    }
    for (k, p) in outcome.exact_probabilities.iter().enumerate() {
        columns.push(PROB_COLUMNS[k]);
        row.push(Cell::Num(*p));
    }
    columns.extend([
        "witness_estimate",
        "concurrence_estimate",
        "witness_exact",
        "concurrence_exact",
        "witness_std_error",
        "concurrence_std_error",
    ]);
    row.extend([
        Cell::Num(outcome.witness_estimate),
        Cell::Num(outcome.concurrence_estimate),
        Cell::Num(outcome.exact_witness),
        Cell::Num(outcome.exact_concurrence),
        Cell::Num(outcome.witness_std_error),
        Cell::Num(outcome.concurrence_std_error),
    ]);
    let mut table = Table::new(columns);
    table.rows.push(row);
    table.single = true;
    finish(&table, &r)
}
