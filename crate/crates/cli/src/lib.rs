//! Batch driver for the rotational-orbit pipeline: estimate, solve, verify and sweep.

pub mod config;
pub mod report;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rotational_orbits::estimates::{period_interval, EstimateInputs, IntervalKind, PeriodInterval};
use rotational_orbits::functional::LinkingReport;
use rotational_orbits::hamiltonian::{check_hypotheses, HypothesisReport};
use rotational_orbits::solver::{accept_filter, dedupe, solve_multistart, SolveReport};
use rotational_orbits::truncation::{growth_constants, ConstantSet, TruncationReport};
use rotational_orbits::verifier::{shoot_and_check, OrbitSolution};
use rotational_orbits::{
    verifier, ActionProblem, CriticalPoint, Error, EstimateBundle, HamiltonianModel, PhaseLayout,
    RotationVector, TruncatedHamiltonian,
};
use thiserror::Error as ThisError;

pub use config::{RunConfig, SweepGrid};
use report::{exact, write_text, Manifest};

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("hypothesis {name} violated by {amount:.3e} at z = {sample:?}")]
    HypothesisFailed { name: String, amount: f64, sample: Vec<f64> },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BOUND_UNMET: i32 = 3;
pub const EXIT_NONE_ACCEPTED: i32 = 4;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(..) | CliError::Core(Error::Divergence { .. }) => EXIT_IO,
            _ => EXIT_INPUT,
        }
    }
}

/// What a command did: its exit code and the text printed to stdout.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit_code: i32,
    pub summary: String,
}

/// Every quantity the solve pipeline needs, computed once.
pub struct Prepared {
    pub layout: PhaseLayout,
    pub model: HamiltonianModel,
    pub v: RotationVector,
    pub constants: ConstantSet,
    pub bundle: EstimateBundle,
    pub hk: TruncatedHamiltonian,
    pub truncation: TruncationReport,
    pub problem: ActionProblem<TruncatedHamiltonian>,
    pub hypotheses: HypothesisReport,
    pub linking: LinkingReport,
}

impl Prepared {
    pub fn escape_radius(&self) -> f64 {
        10.0 * self.hk.cutoff().k2()
    }
}

/// For `k > n`, the torus directions paired with torus momenta carry no winding:
/// the first and the last `k - n` components of `v` must vanish.
pub fn check_block_restriction(layout: PhaseLayout, v: &RotationVector) -> Result<(), CliError> {
    let (n, k) = (layout.n(), layout.k());
    if k <= n {
        return Ok(());
    }
    let extra = k - n;
    let c = v.components();
    if c[..extra].iter().chain(&c[k - extra..]).any(|&x| x != 0) {
        return Err(CliError::Config(format!(
            "for k > n the first and last {extra} components of v must be zero, got {c:?}"
        )));
    }
    Ok(())
}

fn model_and_rotation(cfg: &RunConfig) -> Result<(PhaseLayout, HamiltonianModel, RotationVector), CliError> {
    let layout = PhaseLayout::new(cfg.n, cfg.k)?;
    let v = RotationVector::prime(cfg.v.clone())?;
    check_block_restriction(layout, &v)?;
    let model = cfg.system.build(layout, cfg.r)?;
    Ok((layout, model, v))
}

/// The admissible period set for the configured system, independent of `T`.
pub fn admissible_interval(cfg: &RunConfig) -> Result<PeriodInterval, CliError> {
    let (layout, model, v) = model_and_rotation(cfg)?;
    let full = PeriodInterval {
        kind: IntervalKind::Full,
        delta: f64::INFINITY,
        coefficients: None,
    };
    if layout.k() <= layout.n() {
        return Ok(full);
    }
    let growth = model
        .torus_growth()
        .ok_or_else(|| Error::Hypothesis("k > n needs torus-gradient growth parameters".into()))?;
    let constants = growth_constants(&model)?;
    Ok(period_interval(model.mu(), &constants.conservative, &growth, v.norm())?)
}

pub fn prepare(cfg: &RunConfig) -> Result<Prepared, CliError> {
    cfg.solver.validate()?;
    let (layout, model, v) = model_and_rotation(cfg)?;
    let constants = growth_constants(&model)?;

    let base_problem = ActionProblem::new(model.clone(), cfg.period, v.clone(), cfg.solver.modes, cfg.solver.nodes)?;
    let beta = base_problem.beta_bound(256);

    let bundle = EstimateBundle::compute(EstimateInputs {
        period: cfg.period,
        v_norm: v.norm(),
        mu: model.mu(),
        constants: constants.conservative,
        growth: model.torus_growth(),
        mixed: layout.k() > layout.n(),
        beta,
    })?;

    let target = 2.0 * model.r().max(bundle.apriori_bound());
    let (hk, truncation) = TruncatedHamiltonian::construct(model.clone(), target, 4096)?;
    let problem = base_problem.with_hamiltonian(hk.clone())?;

    let radius = 3.0 * model.r().max(hk.cutoff().k2());
    let hypotheses = check_hypotheses(&model, cfg.hypothesis_samples, radius)?;
    let linking = problem.check_linking_conditions(bundle.r_link, 64, cfg.solver.seed)?;

    Ok(Prepared {
        layout,
        model,
        v,
        constants,
        bundle,
        hk,
        truncation,
        problem,
        hypotheses,
        linking,
    })
}

fn hypothesis_gate(p: &Prepared) -> Result<(), CliError> {
    match p.hypotheses.worst() {
        Some((name, violation)) => Err(CliError::HypothesisFailed {
            name: name.to_string(),
            amount: violation.amount,
            sample: violation.sample.clone(),
        }),
        None => Ok(()),
    }
}

pub fn manifest(cfg: &RunConfig, p: &Prepared) -> Manifest {
    let mut m = Manifest::default();
    m.text("system", cfg.system.tag());
    m.number("mu", p.model.mu());
    m.text("n", cfg.n);
    m.text("k", cfg.k);
    m.number("r", p.model.r());
    m.number("period", cfg.period);
    m.text("v", format!("{:?}", p.v.components()));
    m.text("modes", cfg.solver.modes);
    m.text("nodes", cfg.solver.nodes);
    m.text("seed", cfg.solver.seed);
    let (s, c) = (p.constants.sampled, p.constants.conservative);
    m.number("a1_sampled", s.a1);
    m.number("a2_sampled", s.a2);
    m.number("a3_sampled", s.a3);
    m.number("a1", c.a1);
    m.number("a2", c.a2);
    m.number("a3", c.a3);
    if let Some(g) = p.model.torus_growth() {
        m.number("growth_a", g.a);
        m.number("growth_b", g.b);
        m.number("growth_s", g.s);
    }
    m.number("rho", p.hk.rho());
    m.number("K1", p.hk.cutoff().k1());
    m.number("K2", p.hk.cutoff().k2());
    let b = &p.bundle;
    m.number("gamma", b.gamma);
    m.number("C", b.c);
    m.maybe("K_bound", b.k_bound);
    if let Some(c2) = &b.case2 {
        m.text("growth_case", c2.case.tag());
        m.number("K1_bound", c2.k1);
        m.number("R1", c2.r1);
        m.maybe("lambda0", c2.lambda0);
        m.maybe("R2", c2.r2);
        m.maybe("phi_max", c2.phi_max);
    }
    m.maybe("k1_below_r2", b.k1_ordering.map(|x| if x { 1.0 } else { 0.0 }));
    m.text("interval_kind", b.interval.kind.tag());
    m.number("delta", b.interval.delta);
    if let Some(coef) = &b.interval.coefficients {
        for (i, d) in coef.d.iter().enumerate() {
            m.number(&format!("D{i}"), *d);
        }
    }
    m.number("R_link", b.r_link);
    m.number("beta", b.beta);
    m.number("alpha_hat", p.linking.alpha_hat);
    m.number("beta_hat", p.linking.beta_hat);
    m.text("linking_satisfied", p.linking.satisfied);
    m.number("hypothesis_radius", p.hypotheses.radius);
    m.text("hypothesis_samples", p.hypotheses.samples);
    m.number("periodicity_violation", p.hypotheses.periodicity.amount);
    m.number("superquadratic_violation", p.hypotheses.superquadratic.amount);
    m.number("superquadratic_min_slack", p.hypotheses.superquadratic_min_slack);
    if let Some(t) = &p.hypotheses.torus_growth {
        m.number("torus_growth_violation", t.amount);
    }
    m.number("truncation_superquadratic_violation", p.truncation.superquadratic_violation);
    m.number("truncation_max_inside", p.truncation.max_inside);
    m.number("truncation_min_outside", p.truncation.min_outside);
    m
}

fn estimate_report(cfg: &RunConfig, p: &Prepared) -> String {
    let b = &p.bundle;
    let c = p.constants.conservative;
    let mut out = String::new();
    let _ = writeln!(out, "system {} (n = {}, k = {}), T = {}, v = {:?}", cfg.system.tag(), cfg.n, cfg.k, cfg.period, p.v.components());
    let _ = writeln!(out, "a1 = {:.6e}  a2 = {:.6e}  a3 = {:.6e}", c.a1, c.a2, c.a3);
    let _ = writeln!(out, "rho = {:.6e}  K1 = {:.6e}  K2 = {:.6e}", p.hk.rho(), p.hk.cutoff().k1(), p.hk.cutoff().k2());
    let _ = writeln!(out, "gamma = {}", b.gamma);
    let _ = writeln!(out, "C = {:.6e}", b.c);
    if let Some(k) = b.k_bound {
        let _ = writeln!(out, "K = {k:.6e}");
    }
    if let Some(c2) = &b.case2 {
        let _ = writeln!(out, "growth case = {}  K1 bound = {:.6e}  R1 = {:.6e}", c2.case.tag(), c2.k1, c2.r1);
        if let (Some(l0), Some(r2)) = (c2.lambda0, c2.r2) {
            let _ = writeln!(out, "lambda0 = {l0:.6e}  R2 = {r2:.6e}");
        }
    }
    let _ = writeln!(out, "kind = {}  delta = {}", b.interval.kind.tag(), b.interval.delta);
    let _ = writeln!(out, "R_link = {:.6e}  beta = {:.6e}", b.r_link, b.beta);
    let _ = writeln!(
        out,
        "linking: alpha_hat = {:.6e}  beta_hat = {:.6e}  {}",
        p.linking.alpha_hat,
        p.linking.beta_hat,
        if p.linking.satisfied { "satisfied" } else { "not satisfied" }
    );
    let h = &p.hypotheses;
    let _ = writeln!(
        out,
        "hypotheses on {} samples, |z_I| <= {:.3e}: {}",
        h.samples,
        h.radius,
        if h.passed { "passed" } else { "FAILED" }
    );
    let _ = writeln!(out, "  periodicity violation    {:.3e}", h.periodicity.amount);
    let _ = writeln!(out, "  superquadratic violation {:.3e}", h.superquadratic.amount);
    if let Some(t) = &h.torus_growth {
        let _ = writeln!(out, "  torus growth violation   {:.3e}", t.amount);
    }
    out
}

fn ensure_dir(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::Io(out.display().to_string(), e))
}

pub fn cmd_estimate(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let p = prepare(cfg)?;
    let text = estimate_report(cfg, &p);
    ensure_dir(out)?;
    write_text(&out.join("report.txt"), &text)?;
    write_text(&out.join("manifest.txt"), &manifest(cfg, &p).render())?;
    hypothesis_gate(&p)?;
    Ok(Outcome {
        exit_code: EXIT_OK,
        summary: text,
    })
}

/// An accepted critical point together with its verified orbit.
#[derive(Debug, Clone)]
pub struct AcceptedOrbit {
    pub point: CriticalPoint,
    pub orbit: OrbitSolution,
}

pub struct SolveResult {
    pub prepared: Prepared,
    pub report: SolveReport,
    pub distinct: Vec<CriticalPoint>,
    pub accepted: Vec<AcceptedOrbit>,
    /// Accepted points whose verification failed, with the reason.
    pub rejected: Vec<(CriticalPoint, String)>,
}

impl SolveResult {
    pub fn lower_bound(&self) -> usize {
        self.prepared.layout.k()
    }

    pub fn bound_met(&self) -> bool {
        self.accepted.len() >= self.lower_bound()
    }

    pub fn exit_code(&self) -> i32 {
        if self.accepted.is_empty() {
            EXIT_NONE_ACCEPTED
        } else if self.bound_met() {
            EXIT_OK
        } else {
            EXIT_BOUND_UNMET
        }
    }
}

pub fn run_solve(cfg: &RunConfig) -> Result<SolveResult, CliError> {
    let prepared = prepare(cfg)?;
    hypothesis_gate(&prepared)?;
    let p = &prepared;
    let report = solve_multistart(&p.problem, &cfg.solver, p.model.mu(), p.bundle.r_link)?;
    let distinct = dedupe(&report.points, &p.v, cfg.solver.dedup_tol, cfg.solver.theta_grid);
    let filtered = accept_filter(&distinct, &p.bundle, &p.hk);
    let original = p.problem.with_hamiltonian(p.model.clone())?;
    let mut accepted = Vec::new();
    let mut rejected = Vec::new();
    for point in filtered.into_iter().filter(|c| c.accepted) {
        match verifier::verify_loop(&original, &point.x, cfg.samples, cfg.steps, p.escape_radius()) {
            Ok(mut orbit) => {
                orbit.critical_value = Some(point.value);
                accepted.push(AcceptedOrbit { point, orbit });
            }
            Err(e) => rejected.push((point, e.to_string())),
        }
    }
    let distinct = distinct
        .into_iter()
        .map(|mut c| {
            c.accepted = accepted.iter().any(|a| a.point.start == c.start);
            c
        })
        .collect();
    Ok(SolveResult {
        prepared,
        report,
        distinct,
        accepted,
        rejected,
    })
}

fn solve_summary(cfg: &RunConfig, r: &SolveResult) -> String {
    let p = &r.prepared;
    let mut out = String::new();
    let _ = writeln!(out, "system {} (n = {}, k = {}), T = {}, v = {:?}", cfg.system.tag(), cfg.n, cfg.k, cfg.period, p.v.components());
    let _ = writeln!(out, "gamma = {}  K1 = {:.6e}  K2 = {:.6e}", p.bundle.gamma, p.hk.cutoff().k1(), p.hk.cutoff().k2());
    let _ = writeln!(
        out,
        "starts = {}  converged = {}  distinct = {}  accepted = {}",
        r.report.outcomes.len(),
        r.report.converged(),
        r.distinct.len(),
        r.accepted.len()
    );
    let diverging = r.report.outcomes.iter().filter(|o| o.telemetry.diverging).count();
    if diverging > 0 {
        let _ = writeln!(out, "starts with diverging iterates: {diverging}");
    }
    let _ = writeln!(
        out,
        "lower bound k = {}: {}",
        r.lower_bound(),
        if r.bound_met() { "met" } else { "unmet" }
    );
    let _ = writeln!(out, "{:>5} {:>24} {:>10} {:>10} {:>10} {:>10} {:>10} {:>8}", "orbit", "value", "grad", "colloc", "boundary", "shooting", "energy", "winding");
    for (i, a) in r.accepted.iter().enumerate() {
        let shot = a.orbit.shooting.as_ref();
        let _ = writeln!(
            out,
            "{:>5} {:>24} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e} {:>8}",
            i,
            exact(a.point.value),
            a.point.grad_norm,
            a.orbit.collocation_residual.unwrap_or(f64::NAN),
            a.orbit.boundary_residual,
            shot.map_or(f64::NAN, |s| s.residual),
            shot.map_or(f64::NAN, |s| s.energy_drift),
            shot.map_or("-", |s| if s.winding_matches { "ok" } else { "wrong" }),
        );
    }
    let unaccepted: Vec<&CriticalPoint> = r.distinct.iter().filter(|c| !c.accepted).collect();
    if !unaccepted.is_empty() {
        let _ = writeln!(out, "not accepted:");
        for c in unaccepted {
            let reason = r
                .rejected
                .iter()
                .find(|(q, _)| q.start == c.start)
                .map(|(_, e)| e.clone())
                .unwrap_or_else(|| {
                    if c.value > p.bundle.gamma {
                        "value above gamma".into()
                    } else {
                        "leaves the a priori ball".into()
                    }
                });
            let _ = writeln!(out, "  start {:>3} value {:>24} max|z_I| {:.3e}: {reason}", c.start, exact(c.value), c.max_free_norm);
        }
    }
    out
}

pub fn orbit_file(out: &Path, index: usize) -> PathBuf {
    out.join(format!("orbit_{index:02}.csv"))
}

pub fn cmd_solve(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let result = run_solve(cfg)?;
    ensure_dir(out)?;
    for (i, a) in result.accepted.iter().enumerate() {
        report::write_trajectory(&orbit_file(out, i), &a.orbit)?;
    }
    let summary = solve_summary(cfg, &result);
    write_text(&out.join("summary.txt"), &summary)?;
    let mut m = manifest(cfg, &result.prepared);
    m.text("accepted", result.accepted.len());
    for (i, a) in result.accepted.iter().enumerate() {
        m.number(&format!("orbit_{i:02}_value"), a.point.value);
    }
    write_text(&out.join("manifest.txt"), &m.render())?;
    Ok(Outcome {
        exit_code: result.exit_code(),
        summary,
    })
}

/// Re-reads every `orbit_*.csv` in `out` and shoots the original flow from its first sample.
pub fn cmd_verify(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let (layout, model, v) = model_and_rotation(cfg)?;
    let mut files: Vec<PathBuf> = fs::read_dir(out)
        .map_err(|e| CliError::Io(out.display().to_string(), e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("orbit_") && n.ends_with(".csv"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Config(format!("no orbit_*.csv files in {}", out.display())));
    }
    let mut text = String::new();
    let _ = writeln!(text, "{:<16} {:>10} {:>10} {:>10} {:>8}", "file", "boundary", "shooting", "energy", "winding");
    for path in &files {
        let (times, states) = report::read_trajectory(path)?;
        if states[0].len() != layout.dim() {
            return Err(CliError::Config(format!(
                "{}: {} state columns, expected {}",
                path.display(),
                states[0].len(),
                layout.dim()
            )));
        }
        let period = times[times.len() - 1] - times[0];
        let z0 = &states[0];
        let boundary = boundary_gap(z0, &states[states.len() - 1], &v);
        let escape = 10.0 * (1.0 + states.iter().map(|z| layout.free_norm(z)).fold(0.0, f64::max)).max(model.r());
        let shot = shoot_and_check(&model, z0, period, &v, cfg.steps, escape)?;
        let _ = writeln!(
            text,
            "{:<16} {:>10.3e} {:>10.3e} {:>10.3e} {:>8}",
            path.file_name().and_then(|n| n.to_str()).unwrap_or("?"),
            boundary,
            shot.residual,
            shot.energy_drift,
            if shot.winding_matches { "ok" } else { "wrong" }
        );
    }
    write_text(&out.join("verify.txt"), &text)?;
    Ok(Outcome {
        exit_code: EXIT_OK,
        summary: text,
    })
}

/// `‖z1 - z0 - (0, v)‖`, the boundary residual of a sampled trajectory.
pub fn boundary_gap(z0: &[f64], z1: &[f64], v: &RotationVector) -> f64 {
    let offset = z0.len() - v.len();
    z0.iter()
        .zip(z1)
        .enumerate()
        .map(|(c, (a, b))| {
            let shift = if c >= offset { v.components()[c - offset] as f64 } else { 0.0 };
            (b - a - shift).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

/// One row of a sweep table.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub period: f64,
    pub found: usize,
    pub accepted: usize,
    pub min_value: Option<f64>,
    pub note: Option<String>,
}

pub struct SweepResult {
    pub interval: PeriodInterval,
    pub rows: Vec<SweepRow>,
    pub lower_bound: usize,
}

impl SweepResult {
    pub fn bound_met(&self) -> bool {
        let solved: Vec<&SweepRow> = self.rows.iter().filter(|r| r.note.is_none()).collect();
        !solved.is_empty() && solved.iter().all(|r| r.accepted >= self.lower_bound)
    }
}

pub fn run_sweep(cfg: &RunConfig) -> Result<SweepResult, CliError> {
    let grid = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("sweep needs sweep_periods or sweep_min/sweep_max".into()))?;
    let interval = admissible_interval(cfg)?;
    let mut rows = Vec::new();
    for period in grid.periods() {
        if !interval.contains(period) {
            rows.push(SweepRow {
                period,
                found: 0,
                accepted: 0,
                min_value: None,
                note: Some(format!("skipped: outside (0, {})", interval.delta)),
            });
            continue;
        }
        let mut point_cfg = cfg.clone();
        point_cfg.period = period;
        match run_solve(&point_cfg) {
            Ok(r) => rows.push(SweepRow {
                period,
                found: r.distinct.len(),
                accepted: r.accepted.len(),
                min_value: r.accepted.iter().map(|a| a.point.value).min_by(f64::total_cmp),
                note: None,
            }),
            Err(e @ CliError::Io(..)) => return Err(e),
            Err(e) => rows.push(SweepRow {
                period,
                found: 0,
                accepted: 0,
                min_value: None,
                note: Some(format!("error: {e}")),
            }),
        }
    }
    Ok(SweepResult {
        interval,
        rows,
        lower_bound: cfg.k,
    })
}

pub fn cmd_sweep(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let result = run_sweep(cfg)?;
    let mut text = String::new();
    let _ = writeln!(text, "interval kind = {}  delta = {}", result.interval.kind.tag(), result.interval.delta);
    let _ = writeln!(text, "{:>24} {:>6} {:>9} {:>24}  note", "T", "found", "accepted", "min value");
    for r in &result.rows {
        let _ = writeln!(
            text,
            "{:>24} {:>6} {:>9} {:>24}  {}",
            exact(r.period),
            r.found,
            r.accepted,
            r.min_value.map_or("-".into(), exact),
            r.note.as_deref().unwrap_or("")
        );
    }
    let _ = writeln!(
        text,
        "lower bound k = {}: {}",
        result.lower_bound,
        if result.bound_met() { "met" } else { "unmet" }
    );
    ensure_dir(out)?;
    write_text(&out.join("sweep.txt"), &text)?;
    Ok(Outcome {
        exit_code: if result.bound_met() { EXIT_OK } else { EXIT_BOUND_UNMET },
        summary: text,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_restriction() {
        let layout = PhaseLayout::new(2, 3).unwrap();
        assert!(check_block_restriction(layout, &RotationVector::new(vec![0, 1, 0])).is_ok());
        assert!(check_block_restriction(layout, &RotationVector::new(vec![1, 1, 0])).is_err());
        assert!(check_block_restriction(layout, &RotationVector::new(vec![0, 1, 1])).is_err());
        let square = PhaseLayout::new(2, 2).unwrap();
        assert!(check_block_restriction(square, &RotationVector::new(vec![1, 1])).is_ok());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), EXIT_INPUT);
        assert_eq!(CliError::Core(Error::NotPrime(vec![2, 4])).exit_code(), EXIT_INPUT);
        let io = std::io::Error::new(std::io::ErrorKind::NotFound, "gone");
        assert_eq!(CliError::Io("f".into(), io).exit_code(), EXIT_IO);
    }
}
