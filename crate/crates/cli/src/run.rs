//! Subcommand dispatch. Analysis outcomes (conclusive, found, confined) are
//! data in the output; errors are reserved for bad configuration, solver
//! failures and I/O.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};

use tennis_core::explorer::{lyapunov_max, oscillation, rotation_number};
use tennis_core::kam::{
    d_bounds, estimate_bc, records_along, refined_criterion, second_variation, simple_criterion,
    tennis_thresholds, DBounds, EIGEN_TOL, MARGIN_TOL,
};
use tennis_core::{RacketProfile, StandardMap, TennisParams, TwistSystem};

use crate::config::{parse_config, BoundsSource, CriterionChoice, MapKind, RunConfig};
use crate::output::{criterion_block, inapplicable_block, orbit_rows, real, threshold_block, write_orbit_csv, Block};
use crate::parallel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Portrait,
    Criterion,
    Threshold,
    Diffusion,
    Lyapunov,
    Scan,
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub steps: Option<usize>,
    pub t0: Option<f64>,
    pub v0: Option<f64>,
    pub k: Option<f64>,
    pub amplitude: Option<f64>,
    pub budget: Option<u64>,
    pub seed: Option<u64>,
}

/// Parses `text` (or builds a standard-map config from `--k` alone) and
/// applies the overrides.
pub fn load(text: Option<&str>, o: &Overrides) -> Result<RunConfig> {
    let text = match (text, o.k) {
        (Some(t), _) => t.to_string(),
        (None, Some(k)) => format!("[map]\nkind = standard\nk = {k}\n"),
        (None, None) => bail!("no configuration: pass --config FILE, or --k for a standard map"),
    };
    let mut c = parse_config(&text).map_err(|e| anyhow!("invalid configuration:\n{e}"))?;
    if let Some(k) = o.k {
        if c.map.kind != MapKind::Standard {
            bail!("--k applies to map kind standard, not {}", c.map.kind.name());
        }
        if !(k >= 0.0) {
            bail!("--k must be non-negative");
        }
        c.map.k = k;
    }
    if let Some(out) = &o.out {
        c.run.output = Some(out.clone());
    }
    if let Some(n) = o.steps {
        c.run.steps = n;
        c.ensemble.n_steps = n.max(1);
    }
    if let Some(t) = o.t0 {
        c.run.t0 = t;
    }
    if let Some(v) = o.v0 {
        if !(v >= 0.0) {
            bail!("--v0 must be non-negative");
        }
        c.run.v0 = Some(v);
    }
    if let Some(a) = o.amplitude {
        if !(a > 0.0) {
            bail!("--amplitude must be positive");
        }
        c.analysis.amplitude = a;
    }
    if let Some(b) = o.budget {
        c.analysis.budget = b;
    }
    if let Some(s) = o.seed {
        c.run.seed = s;
        c.ensemble.seed = s;
    }
    Ok(c)
}

pub enum Model {
    Tennis(TennisParams),
    Standard(StandardMap),
}

impl Model {
    pub fn from_config(c: &RunConfig) -> Result<Model> {
        Ok(match c.map.kind {
            MapKind::Standard => Model::Standard(StandardMap::new(c.map.k)?),
            kind => {
                let profile = match kind {
                    MapKind::Tennis => c.profile.clone().unwrap_or_else(|| RacketProfile::constant(0.0)),
                    _ => RacketProfile::constant(0.0),
                };
                let mut p = TennisParams::new(profile, c.map.g)?.with_root_tol(c.map.root_tol)?;
                if let Some(v) = c.map.v_star {
                    p = p.with_v_star(v)?;
                }
                if let Some(s) = c.map.march_step {
                    p = p.with_march_step(s)?;
                }
                Model::Tennis(p)
            }
        })
    }

    pub fn system(&self) -> &(dyn TwistSystem + Sync) {
        match self {
            Model::Tennis(p) => p,
            Model::Standard(m) => m,
        }
    }

    /// Name of the momentum-like column.
    fn value_name(&self) -> &'static str {
        match self {
            Model::Tennis(_) => "e",
            Model::Standard(_) => "y",
        }
    }

    /// Initial momentum-like value in the system's coordinates.
    fn initial_value(&self, c: &RunConfig) -> f64 {
        match self {
            Model::Tennis(p) => {
                let v = c.run.v0.unwrap_or_else(|| default_tennis_v0(p));
                0.5 * v * v
            }
            Model::Standard(_) => c.run.v0.unwrap_or(1.0),
        }
    }
}

fn default_tennis_v0(p: &TennisParams) -> f64 {
    (2.0 * p.v_star).max(10.0)
}

/// Result of a subcommand.
#[derive(Debug, Clone, PartialEq)]
pub enum Artifact {
    /// Report block; always printed, and written to the output path if set.
    Report(String),
    /// Table written to the output path (or stdout), with an optional
    /// summary block printed when the table goes to a file.
    Table { csv: String, summary: Option<String> },
}

impl Artifact {
    pub fn text(&self) -> &str {
        match self {
            Artifact::Report(s) => s,
            Artifact::Table { csv, .. } => csv,
        }
    }

    pub fn emit(&self, out: Option<&Path>) -> Result<()> {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        match (self, out) {
            (Artifact::Report(s), Some(p)) => {
                write_file(p, s)?;
                lock.write_all(s.as_bytes())?;
            }
            (Artifact::Report(s), None) | (Artifact::Table { csv: s, .. }, None) => lock.write_all(s.as_bytes())?,
            (Artifact::Table { csv, summary }, Some(p)) => {
                write_file(p, csv)?;
                if let Some(s) = summary {
                    lock.write_all(s.as_bytes())?;
                }
            }
        }
        Ok(())
    }
}

fn write_file(p: &Path, s: &str) -> Result<()> {
    std::fs::write(p, s).with_context(|| format!("writing {}", p.display()))
}

pub fn execute(c: &RunConfig, cmd: Command) -> Result<Artifact> {
    let model = Model::from_config(c)?;
    match cmd {
        Command::Simulate => simulate(c, &model),
        Command::Portrait => portrait(c, &model),
        Command::Criterion => criterion(c, &model),
        Command::Threshold => threshold(&model),
        Command::Diffusion => diffusion(c, &model),
        Command::Lyapunov => lyapunov(c, &model),
        Command::Scan => scan(c, &model),
    }
}

fn simulate(c: &RunConfig, model: &Model) -> Result<Artifact> {
    let seg = match model {
        Model::Tennis(p) => {
            let v0 = c.run.v0.unwrap_or_else(|| default_tennis_v0(p));
            p.bouncing_motion(c.run.t0, v0, c.run.steps)?
        }
        Model::Standard(m) => m.trace(c.run.t0, model.initial_value(c), c.run.steps)?,
    };
    let mut csv = Vec::new();
    write_orbit_csv(&mut csv, &orbit_rows(&seg, model.system().period()))?;
    let mut summary = Block::new();
    summary.put("rows", seg.len().to_string()).flag("absorbed", seg.absorbed);
    Ok(Artifact::Table { csv: String::from_utf8(csv)?, summary: Some(summary.render()) })
}

fn portrait(c: &RunConfig, model: &Model) -> Result<Artifact> {
    let sys = model.system();
    let segs = parallel::ensemble_trace(sys, &c.ensemble)?;
    let mut csv = format!("t_mod1,{},orbit_id\n", model.value_name());
    let period = sys.period();
    for (id, seg) in segs.iter().enumerate() {
        for s in &seg.states {
            let _ = writeln!(csv, "{},{},{id}", real(s.t_mod(period)), real(s.value));
        }
    }
    let mut summary = Block::new();
    summary
        .put("orbits", segs.len().to_string())
        .put("absorbed", segs.iter().filter(|s| s.absorbed).count().to_string());
    Ok(Artifact::Table { csv, summary: Some(summary.render()) })
}

/// `[x₋₁, x₀, x₁, …, x_N]` with `N = samples`.
fn sample_angles(c: &RunConfig, model: &Model) -> Result<Vec<f64>> {
    let sys = model.system();
    let (x0, y0) = (c.run.t0, model.initial_value(c));
    let (x_prev, _) = sys.retreat(x0, y0)?;
    let seg = sys.trace(x0, y0, c.analysis.samples)?;
    let mut angles = vec![x_prev];
    angles.extend(seg.angles());
    Ok(angles)
}

fn criterion(c: &RunConfig, model: &Model) -> Result<Artifact> {
    let sys = model.system();
    let angles = sample_angles(c, model)?;
    let records = records_along(sys, &angles)?;
    let choice = c.analysis.criterion;
    let mut blocks = Vec::new();
    if matches!(choice, CriterionChoice::Simple | CriterionChoice::All) {
        blocks.push(criterion_block(&simple_criterion(&records, MARGIN_TOL)?));
    }
    if matches!(choice, CriterionChoice::Refined | CriterionChoice::All) {
        let bounds: DBounds = match (c.analysis.bounds, model) {
            (BoundsSource::ClosedForm, Model::Standard(m)) => m.standard_dbounds()?,
            (BoundsSource::ClosedForm, Model::Tennis(_)) => bail!("closed_form bounds need a standard map"),
            (BoundsSource::Estimate, _) => {
                let e = estimate_bc(&records, c.analysis.safety)?;
                d_bounds(e.b_plus, e.b_minus, e.c_plus, e.c_minus)
            }
        };
        blocks.push(if bounds.is_defined() {
            criterion_block(&refined_criterion(&records, &bounds, MARGIN_TOL)?)
        } else {
            inapplicable_block(&bounds)
        });
    }
    if matches!(choice, CriterionChoice::SecondVariation | CriterionChoice::All) {
        blocks.push(criterion_block(&second_variation(sys, &angles, EIGEN_TOL)?));
    }
    let text = blocks.iter().map(Block::render).collect::<Vec<_>>().join("\n");
    Ok(Artifact::Report(text))
}

fn threshold(model: &Model) -> Result<Artifact> {
    let Model::Tennis(p) = model else {
        bail!("threshold needs map kind tennis or integrable");
    };
    let rep = tennis_thresholds(p.norms(), p.g, p.v_star);
    let main = p.norms().check_main_condition(p.g);
    Ok(Artifact::Report(threshold_block(&rep, main.holds, main.margin).render()))
}

fn diffusion(c: &RunConfig, model: &Model) -> Result<Artifact> {
    let sys = model.system();
    let a = &c.analysis;
    let r = parallel::diffusion_search(sys, a.amplitude, a.budget, &c.ensemble)?;
    let mut b = Block::new();
    b.real("amplitude", a.amplitude)
        .flag("found", r.found)
        .real("achieved_amplitude", r.achieved_amplitude)
        .put("budget", a.budget.to_string())
        .put("budget_used", r.budget_used.to_string());
    if let Some(best) = r.best {
        b.real("witness_t0", best.ic.t)
            .real(&format!("witness_{}0", model.value_name()), best.ic.value)
            .put("witness_steps", best.steps.to_string());
        if let Some(dv) = best.velocity_oscillation() {
            b.real("velocity_oscillation", dv);
        }
    }
    if r.found {
        b.real("replayed_amplitude", oscillation(&r.orbit));
    }
    Ok(Artifact::Report(b.render()))
}

fn lyapunov(c: &RunConfig, model: &Model) -> Result<Artifact> {
    let sys = model.system();
    let ic = (c.run.t0, model.initial_value(c));
    let n = c.run.steps.max(1);
    let est = lyapunov_max(sys, ic, n, c.analysis.renorm_every)?;
    let mut b = Block::new();
    b.real("t0", ic.0)
        .real(&format!("{}0", model.value_name()), ic.1)
        .put("steps", est.steps.to_string())
        .put("renorm_every", c.analysis.renorm_every.to_string())
        .real("lambda", est.lambda)
        .real("lambda_last_quarter", est.last_quarter);
    if let Ok(seg) = sys.trace(ic.0, ic.1, n.min(100_000)) {
        if let Some(rot) = rotation_number(&seg) {
            b.real("rotation", rot.omega).real("rotation_error_bar", rot.error_bar);
        }
    }
    Ok(Artifact::Report(b.render()))
}

fn scan(c: &RunConfig, model: &Model) -> Result<Artifact> {
    let sys = model.system();
    let a = &c.analysis;
    let range = a.scan_range.unwrap_or(c.ensemble.e_range);
    let res = parallel::layer_scan(sys, range, a.scan_resolution, &a.probe)?;
    let mut csv = format!("{},confined,max_oscillation\n", model.value_name());
    for l in &res.levels {
        let _ = writeln!(csv, "{},{},{}", real(l.e), l.confined, real(l.max_oscillation));
    }
    let mut b = Block::new();
    b.put("levels", res.levels.len().to_string())
        .real("beta", a.probe.beta)
        .opt_real("lowest_non_confined", res.lowest_non_confined);
    Ok(Artifact::Table { csv, summary: Some(b.render()) })
}
