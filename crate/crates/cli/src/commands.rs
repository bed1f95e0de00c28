use num_complex::Complex64;
use ptgup::model::{derive_modes, energy, DerivedModes, PhaseClass, StateIndex};
use ptgup::perturbation::{
    delta_energy, pt_eigenvalue, wavefunction_correction, ParityAxis, PtEigenvalue, SampleGrid,
    Wavefunction,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::{fmt_f64, params_json, to_csv, to_json, CliError, Format, RunConfig};

fn modes_for(cfg: &RunConfig) -> Result<DerivedModes, CliError> {
    cfg.validate()?;
    let modes = derive_modes(&cfg.params)?;
    modes.normal_modes()?;
    Ok(modes)
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<String, CliError> {
    let modes = modes_for(cfg)?;
    let mut rows = Vec::new();
    for s in cfg.state_list() {
        let e = energy(&modes, s)?;
        let de = delta_energy(&modes, s, &cfg.params)?;
        rows.push((s, e, de));
    }
    match cfg.format {
        Format::Json => {
            let states: Vec<Value> = rows
                .iter()
                .map(|(s, e, de)| {
                    json!({
                        "n1": s.n1, "n2": s.n2,
                        "E_re": e.re, "E_im": e.im,
                        "dE_re": de.re, "dE_im": de.im,
                    })
                })
                .collect();
            Ok(to_json(&json!({
                "params": params_json(&cfg.params),
                "phase": modes.phase.label(),
                "lambda_crit": modes.lambda_crit,
                "states": states,
            })))
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = rows
                .iter()
                .map(|(s, e, de)| {
                    vec![
                        s.n1.to_string(),
                        s.n2.to_string(),
                        fmt_f64(e.re),
                        fmt_f64(e.im),
                        fmt_f64(de.re),
                        fmt_f64(de.im),
                    ]
                })
                .collect();
            to_csv(&["n1", "n2", "E_re", "E_im", "dE_re", "dE_im"], &rows)
        }
    }
}

pub const SWEEP_HEADER: [&str; 10] = [
    "lambda", "phase", "c1_re", "c1_im", "c2_re", "c2_im", "E00_re", "E00_im", "dE00_re", "dE00_im",
];

struct SweepRow {
    lambda: f64,
    phase: PhaseClass,
    /// `None` where the normal modes do not exist.
    values: Option<[Complex64; 4]>,
}

fn sweep_row(cfg: &RunConfig, lambda: f64) -> Result<SweepRow, CliError> {
    let p = cfg.params.with_lambda(lambda);
    let modes = derive_modes(&p)?;
    let values = match modes.normal_modes() {
        Ok(nm) => {
            let ground = StateIndex::new(0, 0);
            Some([nm.c1, nm.c2, energy(&modes, ground)?, delta_energy(&modes, ground, &p)?])
        }
        Err(_) => None,
    };
    Ok(SweepRow {
        lambda,
        phase: modes.phase,
        values,
    })
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<String, CliError> {
    cfg.validate()?;
    cfg.sweep.validate()?;
    let rows: Vec<SweepRow> = cfg
        .sweep
        .values()
        .into_par_iter()
        .map(|l| sweep_row(cfg, l))
        .collect::<Result<_, _>>()?;
    match cfg.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut out = vec![fmt_f64(r.lambda), r.phase.label().to_string()];
                    match r.values {
                        Some(vals) => {
                            for z in vals {
                                out.push(fmt_f64(z.re));
                                out.push(fmt_f64(z.im));
                            }
                        }
                        None => out.extend(std::iter::repeat_n(String::new(), 8)),
                    }
                    out
                })
                .collect();
            to_csv(&SWEEP_HEADER, &rows)
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let mut obj = serde_json::Map::new();
                    obj.insert("lambda".into(), json!(r.lambda));
                    obj.insert("phase".into(), json!(r.phase.label()));
                    for (i, key) in ["c1", "c2", "E00", "dE00"].iter().enumerate() {
                        let z = r.values.map(|v| v[i]);
                        obj.insert(format!("{key}_re"), json!(z.map(|z| z.re)));
                        obj.insert(format!("{key}_im"), json!(z.map(|z| z.im)));
                    }
                    Value::Object(obj)
                })
                .collect();
            Ok(to_json(&json!({
                "params": params_json(&cfg.params),
                "rows": rows,
            })))
        }
    }
}

pub fn cmd_correction(cfg: &RunConfig) -> Result<String, CliError> {
    let modes = modes_for(cfg)?;
    let mut reports = Vec::new();
    for s in cfg.state_list() {
        reports.push(wavefunction_correction(&modes, s, &cfg.params)?);
    }
    match cfg.format {
        Format::Json => {
            let reports: Vec<Value> = reports
                .iter()
                .map(|r| {
                    let terms: Vec<Value> = r
                        .m_coefficients
                        .iter()
                        .map(|(m, c)| {
                            let el = r.matrix_elements[m];
                            json!({
                                "m1": m.n1, "m2": m.n2,
                                "element_re": el.re, "element_im": el.im,
                                "M_re": c.re, "M_im": c.im,
                            })
                        })
                        .collect();
                    json!({
                        "n1": r.state.n1, "n2": r.state.n2,
                        "dE_re": r.delta_e.re, "dE_im": r.delta_e.im,
                        "pt_preserved": r.pt_preserved,
                        "terms": terms,
                    })
                })
                .collect();
            Ok(to_json(&json!({
                "params": params_json(&cfg.params),
                "phase": modes.phase.label(),
                "reports": reports,
            })))
        }
        Format::Csv => {
            let mut rows = Vec::new();
            for r in &reports {
                for (m, c) in &r.m_coefficients {
                    let el = r.matrix_elements[m];
                    rows.push(vec![
                        r.state.n1.to_string(),
                        r.state.n2.to_string(),
                        m.n1.to_string(),
                        m.n2.to_string(),
                        fmt_f64(el.re),
                        fmt_f64(el.im),
                        fmt_f64(c.re),
                        fmt_f64(c.im),
                    ]);
                }
            }
            to_csv(
                &["n1", "n2", "m1", "m2", "element_re", "element_im", "M_re", "M_im"],
                &rows,
            )
        }
    }
}

fn pt_json(pt: &PtEigenvalue) -> Value {
    json!({"re": pt.value.re, "im": pt.value.im, "deviation": pt.deviation})
}

pub fn cmd_wavefunction(cfg: &RunConfig) -> Result<String, CliError> {
    let modes = modes_for(cfg)?;
    let state = cfg.states.first().copied().unwrap_or(StateIndex::new(0, 0));
    let grid = SampleGrid::symmetric(cfg.grid.extent, cfg.grid.points);
    let bare = Wavefunction::new(&modes, state, &cfg.params, false)?.sample(&grid);
    let corrected = Wavefunction::new(&modes, state, &cfg.params, true)?.sample(&grid);
    let pt = |samples: &[Complex64]| -> Result<Value, CliError> {
        Ok(json!({
            "x": pt_json(&pt_eigenvalue(&grid, samples, ParityAxis::X)?),
            "y": pt_json(&pt_eigenvalue(&grid, samples, ParityAxis::Y)?),
        }))
    };
    match cfg.format {
        Format::Json => {
            let split = |v: &[Complex64]| -> (Vec<f64>, Vec<f64>) {
                (v.iter().map(|z| z.re).collect(), v.iter().map(|z| z.im).collect())
            };
            let (psi_re, psi_im) = split(&bare);
            let (corrected_re, corrected_im) = split(&corrected);
            Ok(to_json(&json!({
                "params": params_json(&cfg.params),
                "phase": modes.phase.label(),
                "state": {"n1": state.n1, "n2": state.n2},
                "grid": {
                    "extent": cfg.grid.extent,
                    "points": cfg.grid.points,
                    "order": "x-major",
                    "x": grid.xs,
                    "y": grid.ys,
                },
                "psi_re": psi_re,
                "psi_im": psi_im,
                "corrected_re": corrected_re,
                "corrected_im": corrected_im,
                "pt_eigenvalue": pt(&bare)?,
                "pt_eigenvalue_corrected": pt(&corrected)?,
            })))
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = grid
                .points()
                .zip(bare.iter().zip(&corrected))
                .map(|((x, y), (a, b))| {
                    vec![
                        fmt_f64(x),
                        fmt_f64(y),
                        fmt_f64(a.re),
                        fmt_f64(a.im),
                        fmt_f64(b.re),
                        fmt_f64(b.im),
                    ]
                })
                .collect();
            to_csv(&["x", "y", "psi_re", "psi_im", "corrected_re", "corrected_im"], &rows)
        }
    }
}
