use num_complex::Complex64;
use ptgup::model::{
    derive_modes_with, DerivedModes, ModelParams, PhaseClass, RotationConvention, StateIndex,
    potential_matrix,
};
use ptgup::oracle::{
    build_hamiltonian_guarded, compare_with, conjugate_closure_defect, eigenfunction_deviation,
    quadrature_matrix_element, BetaTracker, TruncatedHamiltonian,
};
use ptgup::perturbation::{
    delta_energy_with, h_int_matrix_element, pt_eigenvalue, selection_allowed, DeltaEnergyForm,
    ParityAxis, SampleGrid, Wavefunction, SELECTION_OFFSETS,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::json;

use crate::{fmt_f64, to_csv, to_json, CliError, Fault, Format, RunConfig};

const DEFAULT_LAMBDAS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];
const DEFAULT_BETAS: [f64; 2] = [0.0, 1e-3];
const SLOPE_STEP: f64 = 1e-5;
const SLOPE_STATES: [StateIndex; 4] = [
    StateIndex::new(0, 0),
    StateIndex::new(0, 1),
    StateIndex::new(1, 0),
    StateIndex::new(1, 1),
];

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub max_dev: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn new(name: String, max_dev: f64, tolerance: f64) -> Self {
        Self {
            pass: max_dev <= tolerance,
            name,
            max_dev,
            tolerance,
            detail: String::new(),
        }
    }

    fn detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub all_pass: bool,
}

impl VerifyReport {
    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

struct Point<'a> {
    cfg: &'a RunConfig,
    tag: String,
    params: ModelParams,
    modes: DerivedModes,
    form: DeltaEnergyForm,
}

impl Point<'_> {
    fn name(&self, check: &str) -> String {
        format!("{check}[{}]", self.tag)
    }
}

fn relative(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn zone_check(cfg: &RunConfig) -> Check {
    let limit = cfg.cutoff / 2;
    let check = Check::new("truncation_zone".into(), cfg.nmax as f64, limit as f64);
    if check.pass {
        check
    } else {
        check.detail(format!(
            "n_max {} exceeds the truncation-safe zone n1 + n2 <= {limit} of cutoff {}; \
             states beyond it are not compared",
            cfg.nmax, cfg.cutoff
        ))
    }
}

fn spectrum_checks(pt: &Point, h: &TruncatedHamiltonian) -> Result<Vec<Check>, CliError> {
    let cmp = compare_with(h, &pt.modes, pt.cfg.nmax)?;
    let mut out = vec![Check::new(pt.name("spectrum"), cmp.max_abs_deviation, 1e-7)
        .detail(format!("{} states compared", cmp.compared))];
    if pt.modes.phase.has_real_spectrum() {
        let worst = cmp.numeric.iter().take(10).map(|z| z.im.abs()).fold(0.0, f64::max);
        out.push(Check::new(pt.name("spectrum_reality"), worst, 1e-8));
    } else {
        let defect = conjugate_closure_defect(&cmp.numeric, 10);
        out.push(Check::new(pt.name("conjugate_closure"), defect, 1e-7));
    }
    Ok(out)
}

fn normal_mode_check(pt: &Point) -> Result<Check, CliError> {
    let nm = pt.modes.normal_modes()?;
    let k = nm.rotation.congruence(potential_matrix(&pt.params));
    let scale = pt.params.omega_plus_sq();
    let off = k[0][1].norm().max(k[1][0].norm());
    let diag = (k[0][0] - nm.c1 * nm.c1).norm().max((k[1][1] - nm.c2 * nm.c2).norm());
    let dev = off.max(diag) / scale;
    let dev = dev.max(nm.rotation.orthogonality_defect());
    Ok(Check::new(pt.name("normal_modes"), dev, 1e-12))
}

fn eigenfunction_check(pt: &Point, h: &TruncatedHamiltonian) -> Result<Check, CliError> {
    let grid = SampleGrid::symmetric(2.0, 9);
    let mut worst: f64 = 0.0;
    let mut culprit = None;
    for s in SLOPE_STATES.into_iter().filter(|s| s.total() <= h.cutoff / 2) {
        let dev = eigenfunction_deviation(h, &pt.modes, s, &grid)?;
        if dev > worst {
            worst = dev;
            culprit = Some(s);
        }
    }
    let check = Check::new(pt.name("eigenfunctions"), worst, 1e-6);
    Ok(match culprit {
        Some(s) if !check.pass => check.detail(format!(
            "numeric eigenvector of {s} is not the closed-form eigenfunction in the rotated coordinates"
        )),
        _ => check,
    })
}

fn slope_check(pt: &Point, h: &TruncatedHamiltonian) -> Result<Check, CliError> {
    let tracker = BetaTracker::from_hamiltonian(h.clone())?;
    let unit = pt.params.with_beta(1.0);
    let mut worst: f64 = 0.0;
    for s in SLOPE_STATES.into_iter().filter(|s| s.total() <= h.cutoff / 2) {
        let slope = tracker.slope(s, SLOPE_STEP)?;
        let want = delta_energy_with(&pt.modes, s, &unit, pt.form)?;
        // max(1e−5, 1e−3|v|) expressed as a relative deviation against 1e−3
        worst = worst.max((slope - want).norm() / want.norm().max(1e-2));
    }
    Ok(Check::new(pt.name("beta_slope"), worst, 1e-3))
}

fn pt_basis_check(pt: &Point) -> Result<Check, CliError> {
    let grid = SampleGrid::symmetric(2.5, 13);
    let mut worst: f64 = 0.0;
    for s in StateIndex::up_to_total(2) {
        let samples = Wavefunction::new(&pt.modes, s, &pt.params, false)?.sample(&grid);
        for (axis, n) in [(ParityAxis::X, s.n1), (ParityAxis::Y, s.n2)] {
            let eta = pt_eigenvalue(&grid, &samples, axis)?;
            let expected = if n % 2 == 0 { 1.0 } else { -1.0 };
            worst = worst.max(eta.deviation).max((eta.value - expected).norm());
        }
    }
    Ok(Check::new(pt.name("pt_eigenvalues"), worst, 1e-10))
}

fn delta_energy_checks(pt: &Point, rng: &mut StdRng) -> Result<Vec<Check>, CliError> {
    let states = StateIndex::up_to_total(pt.cfg.nmax);
    let mut ladder_dev: f64 = 0.0;
    for &s in &states {
        let closed = delta_energy_with(&pt.modes, s, &pt.params, pt.form)?;
        let ladder = h_int_matrix_element(&pt.modes, s, s, &pt.params)?;
        ladder_dev = ladder_dev.max(relative(closed, ladder));
    }
    let mut out = vec![Check::new(pt.name("delta_energy_ladder"), ladder_dev, 1e-12)];

    let mut selection_dev: f64 = 0.0;
    for _ in 0..200 {
        let bra = StateIndex::new(rng.gen_range(0..=10), rng.gen_range(0..=10));
        let ket = StateIndex::new(rng.gen_range(0..=10), rng.gen_range(0..=10));
        if !selection_allowed(bra, ket) {
            let v = h_int_matrix_element(&pt.modes, bra, ket, &pt.params)?;
            selection_dev = selection_dev.max(v.norm());
        }
    }
    out.push(Check::new(pt.name("selection_rules"), selection_dev, 0.0));

    if pt.modes.phase.has_real_spectrum() {
        let mut quad_dev: f64 = 0.0;
        let mut pairs: Vec<(StateIndex, StateIndex)> = states.iter().map(|&s| (s, s)).collect();
        for _ in 0..20 {
            let ket = StateIndex::new(rng.gen_range(0..=6), rng.gen_range(0..=6));
            let (d1, d2) = SELECTION_OFFSETS[rng.gen_range(0..SELECTION_OFFSETS.len())];
            if let Some(bra) = ket.offset(d1, d2) {
                pairs.push((bra, ket));
            }
        }
        for (bra, ket) in pairs {
            let order = (bra.n1 + ket.n1).max(bra.n2 + ket.n2) + 8;
            let q = quadrature_matrix_element(&pt.modes, bra, ket, &pt.params, order)?;
            let reference = if bra == ket {
                delta_energy_with(&pt.modes, ket, &pt.params, pt.form)?
            } else {
                h_int_matrix_element(&pt.modes, bra, ket, &pt.params)?
            };
            quad_dev = quad_dev.max(relative(q, reference));
        }
        out.push(Check::new(pt.name("delta_energy_quadrature"), quad_dev, 1e-9));
    } else {
        let mut dev: f64 = 0.0;
        for &s in &states {
            let a = delta_energy_with(&pt.modes, s, &pt.params, pt.form)?;
            let b = delta_energy_with(&pt.modes, s.swapped(), &pt.params, pt.form)?;
            dev = dev.max(relative(a, b.conj()));
            if s.n1 == s.n2 && a.norm() > 0.0 {
                dev = dev.max(a.im.abs() / a.norm());
            }
        }
        out.push(Check::new(pt.name("delta_energy_reality"), dev, 1e-12));
    }
    Ok(out)
}

fn pt_correction_check(pt: &Point) -> Result<Check, CliError> {
    let grid = SampleGrid::symmetric(2.5, 13);
    let mut worst: f64 = 0.0;
    for s in StateIndex::up_to_total(2) {
        let bare = Wavefunction::new(&pt.modes, s, &pt.params, false)?.sample(&grid);
        let full = Wavefunction::new(&pt.modes, s, &pt.params, true)?.sample(&grid);
        for axis in [ParityAxis::X, ParityAxis::Y] {
            let a = pt_eigenvalue(&grid, &bare, axis)?;
            let b = pt_eigenvalue(&grid, &full, axis)?;
            worst = worst.max(b.deviation).max((a.value - b.value).norm());
        }
    }
    Ok(Check::new(pt.name("pt_correction"), worst, 1e-10))
}

pub fn run_verify(cfg: &RunConfig) -> Result<VerifyReport, CliError> {
    cfg.validate()?;
    let lambdas: Vec<f64> = if cfg.lambda_given {
        vec![cfg.params.lambda]
    } else {
        DEFAULT_LAMBDAS.to_vec()
    };
    let betas: Vec<f64> = if cfg.beta_given {
        vec![cfg.params.beta]
    } else {
        DEFAULT_BETAS.to_vec()
    };
    let convention = match cfg.fault {
        Some(Fault::PrintedRotation) => RotationConvention::Printed,
        _ => RotationConvention::Orthogonal,
    };
    let form = match cfg.fault {
        Some(Fault::PrintedAlpha1) => DeltaEnergyForm::PrintedAlpha1,
        _ => DeltaEnergyForm::Corrected,
    };
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let mut checks = vec![zone_check(cfg)];

    for &lambda in &lambdas {
        let base = cfg.params.with_lambda(lambda).with_beta(0.0);
        let modes = derive_modes_with(&base, convention)?;
        match modes.phase {
            PhaseClass::Critical => {
                return Err(CliError::Domain(format!(
                    "lambda = {lambda} sits on the exceptional point; the oracle does not certify it"
                )))
            }
            PhaseClass::IsotropicBroken => {
                return Err(CliError::Domain(format!(
                    "no normal modes for the isotropic coupled system at lambda = {lambda}"
                )))
            }
            _ => {}
        }
        let h = build_hamiltonian_guarded(&base, cfg.cutoff, cfg.max_rows)?;
        let point = Point {
            cfg,
            tag: format!("lambda={}", fmt_f64(lambda)),
            params: base,
            modes,
            form,
        };
        checks.extend(spectrum_checks(&point, &h)?);
        checks.push(normal_mode_check(&point)?);
        checks.push(eigenfunction_check(&point, &h)?);
        checks.push(slope_check(&point, &h)?);
        if point.modes.phase.has_real_spectrum() {
            checks.push(pt_basis_check(&point)?);
        }

        for &beta in &betas {
            let point = Point {
                tag: format!("lambda={},beta={}", fmt_f64(lambda), fmt_f64(beta)),
                params: base.with_beta(beta),
                ..point
            };
            checks.extend(delta_energy_checks(&point, &mut rng)?);
            if point.modes.phase.has_real_spectrum() && beta != 0.0 {
                checks.push(pt_correction_check(&point)?);
            }
        }
    }
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(VerifyReport { checks, all_pass })
}

/// Runs the suite and renders the report.
pub fn cmd_verify(cfg: &RunConfig) -> Result<(String, VerifyReport), CliError> {
    let report = run_verify(cfg)?;
    let doc = match cfg.format {
        Format::Json => {
            let checks: Vec<_> = report
                .checks
                .iter()
                .map(|c| {
                    json!({
                        "name": c.name,
                        "pass": c.pass,
                        "max_dev": c.max_dev,
                        "tolerance": c.tolerance,
                        "detail": c.detail,
                    })
                })
                .collect();
            to_json(&json!({"checks": checks, "all_pass": report.all_pass}))
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .checks
                .iter()
                .map(|c| {
                    vec![
                        c.name.clone(),
                        c.pass.to_string(),
                        fmt_f64(c.max_dev),
                        fmt_f64(c.tolerance),
                        c.detail.clone(),
                    ]
                })
                .collect();
            to_csv(&["name", "pass", "max_dev", "tolerance", "detail"], &rows)?
        }
    };
    Ok((doc, report))
}
