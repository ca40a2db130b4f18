//! Run configuration: a line-oriented `key = value` format with `[section]`
//! headers.
//!
//! ```text
//! [map]
//! kind = tennis          # tennis | standard | integrable
//! g = 1
//!
//! [profile]
//! harmonic = 1, 0.01, 0  # k, cosine coefficient, sine coefficient
//! ```
//!
//! Parsing is strict: unknown sections and keys, keys that do not belong to
//! the selected map kind, duplicates and malformed values are all reported
//! together, each with its line number.

use std::fmt;
use std::fmt::Write as _;
use std::path::PathBuf;

use tennis_core::explorer::{EnsembleSpec, ProbeSpec};
use tennis_core::kam::SafetyFactors;
use tennis_core::profile::{Harmonic, RacketProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    Tennis,
    Standard,
    /// The Tennis map with a flat racket.
    Integrable,
}

impl MapKind {
    pub fn name(&self) -> &'static str {
        match self {
            MapKind::Tennis => "tennis",
            MapKind::Standard => "standard",
            MapKind::Integrable => "integrable",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "tennis" => Some(MapKind::Tennis),
            "standard" => Some(MapKind::Standard),
            "integrable" => Some(MapKind::Integrable),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionChoice {
    Simple,
    Refined,
    SecondVariation,
    All,
}

impl CriterionChoice {
    pub fn name(&self) -> &'static str {
        match self {
            CriterionChoice::Simple => "simple",
            CriterionChoice::Refined => "refined",
            CriterionChoice::SecondVariation => "second_variation",
            CriterionChoice::All => "all",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "simple" => Some(CriterionChoice::Simple),
            "refined" => Some(CriterionChoice::Refined),
            "second_variation" => Some(CriterionChoice::SecondVariation),
            "all" => Some(CriterionChoice::All),
            _ => None,
        }
    }
}

/// Where the refined criterion takes its `B±`, `C±` from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundsSource {
    /// Sample extrema with safety factors.
    Estimate,
    /// `B± = 2 + k`, `C± = 1`; standard map only.
    ClosedForm,
}

impl BoundsSource {
    pub fn name(&self) -> &'static str {
        match self {
            BoundsSource::Estimate => "estimate",
            BoundsSource::ClosedForm => "closed_form",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapSection {
    pub kind: MapKind,
    pub g: f64,
    pub v_star: Option<f64>,
    pub root_tol: f64,
    pub march_step: Option<f64>,
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSection {
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub steps: usize,
    pub t0: f64,
    /// Initial relative velocity (Tennis) or momentum (standard map).
    pub v0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisSection {
    pub criterion: CriterionChoice,
    pub bounds: BoundsSource,
    pub samples: usize,
    pub safety: SafetyFactors,
    pub amplitude: f64,
    pub budget: u64,
    pub renorm_every: usize,
    pub scan_range: Option<(f64, f64)>,
    pub scan_resolution: usize,
    pub probe: ProbeSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub map: MapSection,
    /// Present for `kind = tennis` only.
    pub profile: Option<RacketProfile>,
    pub ensemble: EnsembleSpec,
    pub run: RunSection,
    pub analysis: AnalysisSection,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// 1-based; 0 for problems not tied to a line.
    pub line: usize,
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.key.is_empty()) {
            (0, true) => write!(f, "{}", self.message),
            (0, false) => write!(f, "{}: {}", self.key, self.message),
            (l, true) => write!(f, "line {l}: {}", self.message),
            (l, false) => write!(f, "line {l}: {}: {}", self.key, self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    section: String,
    key: String,
    value: String,
    used: bool,
}

struct Parser {
    entries: Vec<Entry>,
    errors: Vec<ConfigError>,
}

const SECTIONS: [&str; 5] = ["map", "profile", "ensemble", "run", "analysis"];

const TENNIS_ONLY: [&str; 3] = ["v_star", "root_tol", "march_step"];

impl Parser {
    fn lex(text: &str) -> Self {
        let mut entries = Vec::new();
        let mut errors = Vec::new();
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() || content.starts_with(';') {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                match rest.strip_suffix(']') {
                    Some(name) if SECTIONS.contains(&name.trim()) => section = name.trim().to_string(),
                    Some(name) => {
                        errors.push(err(line, "", format!("unknown section [{}]", name.trim())));
                        section = format!("?{}", name.trim());
                    }
                    None => errors.push(err(line, "", "unterminated section header".into())),
                }
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                errors.push(err(line, "", format!("expected `key = value`, got `{content}`")));
                continue;
            };
            let key = key.trim();
            if section.is_empty() {
                errors.push(err(line, key, "key outside any section".into()));
                continue;
            }
            if section.starts_with('?') {
                // already reported with the header
                continue;
            }
            if key != "harmonic" && entries.iter().any(|e: &Entry| e.section == section && e.key == key) {
                errors.push(err(line, key, "duplicate key".into()));
                continue;
            }
            entries.push(Entry {
                line,
                section: section.clone(),
                key: key.to_string(),
                value: value.trim().to_string(),
                used: false,
            });
        }
        Parser { entries, errors }
    }

    fn take(&mut self, section: &str, key: &str) -> Option<(usize, String)> {
        let e = self
            .entries
            .iter_mut()
            .find(|e| !e.used && e.section == section && e.key == key)?;
        e.used = true;
        Some((e.line, e.value.clone()))
    }

    fn take_all(&mut self, section: &str, key: &str) -> Vec<(usize, String)> {
        let mut out = Vec::new();
        while let Some(v) = self.take(section, key) {
            out.push(v);
        }
        out
    }

    fn real(&mut self, section: &str, key: &str) -> Option<f64> {
        let (line, v) = self.take(section, key)?;
        match parse_real(&v) {
            Some(x) => Some(x),
            None => {
                self.errors.push(err(line, key, format!("expected a real number, got `{v}`")));
                None
            }
        }
    }

    fn real_where(&mut self, section: &str, key: &str, ok: fn(f64) -> bool, what: &str) -> Option<f64> {
        let line = self.line_of(section, key);
        let x = self.real(section, key)?;
        if ok(x) {
            Some(x)
        } else {
            self.errors.push(err(line, key, format!("must be {what}, got {x}")));
            None
        }
    }

    fn integer(&mut self, section: &str, key: &str, min: u64) -> Option<u64> {
        let (line, v) = self.take(section, key)?;
        match parse_integer(&v) {
            Some(n) if n >= min => Some(n),
            Some(n) => {
                self.errors.push(err(line, key, format!("must be at least {min}, got {n}")));
                None
            }
            None => {
                self.errors.push(err(line, key, format!("expected an integer, got `{v}`")));
                None
            }
        }
    }

    fn line_of(&self, section: &str, key: &str) -> usize {
        self.entries
            .iter()
            .find(|e| !e.used && e.section == section && e.key == key)
            .map_or(0, |e| e.line)
    }

    fn has_section(&self, section: &str) -> Option<usize> {
        self.entries.iter().find(|e| e.section == section).map(|e| e.line)
    }
}

fn err(line: usize, key: &str, message: String) -> ConfigError {
    ConfigError { line, key: key.to_string(), message }
}

fn parse_real(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

/// Plain integers, or reals such as `1e5` with an exact integer value.
/// Non-negative integer, also in exponent form such as `1e5`.
pub fn parse_integer(s: &str) -> Option<u64> {
    if let Ok(n) = s.parse::<u64>() {
        return Some(n);
    }
    let x = parse_real(s)?;
    (x >= 0.0 && x.fract() == 0.0 && x < 2f64.powi(63)).then_some(x as u64)
}

fn positive(x: f64) -> bool {
    x > 0.0
}

fn non_negative(x: f64) -> bool {
    x >= 0.0
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigErrors> {
    let mut p = Parser::lex(text);

    let kind = match p.take("map", "kind") {
        Some((line, v)) => MapKind::parse(&v).or_else(|| {
            p.errors.push(err(line, "kind", format!("unknown map kind `{v}`")));
            None
        }),
        None => {
            p.errors.push(err(0, "kind", "missing required key in [map]".into()));
            None
        }
    };

    let mut map = MapSection {
        kind: kind.unwrap_or(MapKind::Tennis),
        g: 1.0,
        v_star: None,
        root_tol: 1e-12,
        march_step: None,
        k: 0.0,
    };
    let mut profile = None;
    match kind {
        Some(MapKind::Standard) => {
            let line = p.line_of("map", "k");
            match p.real_where("map", "k", non_negative, "non-negative") {
                Some(k) => map.k = k,
                None if line == 0 => p.errors.push(err(0, "k", "missing required key in [map] for map kind standard".into())),
                None => {}
            }
            for key in ["g"].iter().chain(TENNIS_ONLY.iter()) {
                for (line, _) in p.take_all("map", key) {
                    p.errors.push(err(line, key, "unknown key for map kind standard".into()));
                }
            }
            if let Some(line) = p.has_section("profile") {
                p.errors.push(err(line, "", "section [profile] is not used by map kind standard".into()));
                p.take_all_section("profile");
            }
        }
        Some(k @ (MapKind::Tennis | MapKind::Integrable)) => {
            let line = p.line_of("map", "g");
            match p.real_where("map", "g", positive, "positive") {
                Some(g) => map.g = g,
                None if line == 0 => p.errors.push(err(0, "g", "missing required key in [map]".into())),
                None => {}
            }
            map.v_star = p.real_where("map", "v_star", positive, "positive");
            if let Some(tol) = p.real_where("map", "root_tol", positive, "positive") {
                map.root_tol = tol;
            }
            map.march_step = p.real_where("map", "march_step", positive, "positive");
            for (line, _) in p.take_all("map", "k") {
                p.errors.push(err(line, "k", format!("unknown key for map kind {}", k.name())));
            }
            if k == MapKind::Tennis {
                profile = Some(parse_profile(&mut p));
            } else if let Some(line) = p.has_section("profile") {
                p.errors.push(err(line, "", "section [profile] is not used by map kind integrable".into()));
                p.take_all_section("profile");
            }
        }
        None => {}
    }

    let mut ensemble = EnsembleSpec { t_grid: 10, e_grid: 10, e_range: (50.0, 60.0), n_steps: 1000, seed: 0 };
    if let Some(n) = p.integer("ensemble", "t_grid", 1) {
        ensemble.t_grid = n as usize;
    }
    if let Some(n) = p.integer("ensemble", "e_grid", 1) {
        ensemble.e_grid = n as usize;
    }
    let lo_line = p.line_of("ensemble", "e_lo");
    let lo = p.real_where("ensemble", "e_lo", positive, "positive");
    let hi = p.real("ensemble", "e_hi");
    if let Some(lo) = lo {
        ensemble.e_range.0 = lo;
    }
    if let Some(hi) = hi {
        ensemble.e_range.1 = hi;
    }
    if ensemble.e_range.1 < ensemble.e_range.0 {
        p.errors.push(err(lo_line, "e_hi", "must not be below e_lo".into()));
    }
    if let Some(n) = p.integer("ensemble", "n_steps", 1) {
        ensemble.n_steps = n as usize;
    }

    let mut run = RunSection { seed: 0, output: None, steps: 1000, t0: 0.0, v0: None };
    if let Some(s) = p.integer("run", "seed", 0) {
        run.seed = s;
    }
    ensemble.seed = run.seed;
    run.output = p.take("run", "output").map(|(_, v)| PathBuf::from(v));
    if let Some(n) = p.integer("run", "steps", 0) {
        run.steps = n as usize;
    }
    if let Some(t0) = p.real("run", "t0") {
        run.t0 = t0;
    }
    run.v0 = p.real_where("run", "v0", non_negative, "non-negative");

    let mut analysis = AnalysisSection {
        criterion: CriterionChoice::All,
        bounds: BoundsSource::Estimate,
        samples: 64,
        safety: SafetyFactors::default(),
        amplitude: 20.0,
        budget: 100_000_000,
        renorm_every: 1,
        scan_range: None,
        scan_resolution: 16,
        probe: ProbeSpec::default(),
    };
    if let Some((line, v)) = p.take("analysis", "criterion") {
        match CriterionChoice::parse(&v) {
            Some(c) => analysis.criterion = c,
            None => p.errors.push(err(line, "criterion", format!("unknown criterion `{v}`"))),
        }
    }
    if let Some((line, v)) = p.take("analysis", "bounds") {
        match v.as_str() {
            "estimate" => analysis.bounds = BoundsSource::Estimate,
            "closed_form" if kind == Some(MapKind::Standard) => analysis.bounds = BoundsSource::ClosedForm,
            "closed_form" => p.errors.push(err(line, "bounds", "closed_form bounds need map kind standard".into())),
            _ => p.errors.push(err(line, "bounds", format!("unknown bounds source `{v}`"))),
        }
    }
    if let Some(n) = p.integer("analysis", "samples", 1) {
        analysis.samples = n as usize;
    }
    if let Some(b) = p.real_where("analysis", "safety_b", positive, "positive") {
        analysis.safety.b = b;
    }
    if let Some(c) = p.real_where("analysis", "safety_c", positive, "positive") {
        analysis.safety.c = c;
    }
    if let Some(a) = p.real_where("analysis", "amplitude", positive, "positive") {
        analysis.amplitude = a;
    }
    if let Some(b) = p.integer("analysis", "budget", 1) {
        analysis.budget = b;
    }
    if let Some(n) = p.integer("analysis", "renorm_every", 1) {
        analysis.renorm_every = n as usize;
    }
    let scan_line = p.line_of("analysis", "scan_lo").max(p.line_of("analysis", "scan_hi"));
    match (p.real("analysis", "scan_lo"), p.real("analysis", "scan_hi")) {
        (Some(lo), Some(hi)) if hi >= lo => analysis.scan_range = Some((lo, hi)),
        (Some(_), Some(_)) => p.errors.push(err(scan_line, "scan_hi", "must not be below scan_lo".into())),
        (None, None) => {}
        _ => p.errors.push(err(scan_line, "", "scan_lo and scan_hi must be given together".into())),
    }
    if let Some(n) = p.integer("analysis", "scan_resolution", 1) {
        analysis.scan_resolution = n as usize;
    }
    if let Some(n) = p.integer("analysis", "probe_t", 1) {
        analysis.probe.t_count = n as usize;
    }
    if let Some(n) = p.integer("analysis", "probe_steps", 1) {
        analysis.probe.n_steps = n as usize;
    }
    if let Some(b) = p.real_where("analysis", "beta", positive, "positive") {
        analysis.probe.beta = b;
    }

    // without a valid kind the [map] keys cannot be judged
    let leftovers: Vec<_> = p
        .entries
        .iter()
        .filter(|e| !e.used && !(e.section == "map" && kind.is_none()))
        .cloned()
        .collect();
    for e in leftovers {
        p.errors.push(err(e.line, &e.key, format!("unknown key in [{}]", e.section)));
    }

    if p.errors.is_empty() {
        Ok(RunConfig { map, profile, ensemble, run, analysis })
    } else {
        p.errors.sort_by_key(|e| e.line);
        Err(ConfigErrors(p.errors))
    }
}

impl Parser {
    fn take_all_section(&mut self, section: &str) {
        for e in self.entries.iter_mut().filter(|e| e.section == section) {
            e.used = true;
        }
    }
}

fn parse_profile(p: &mut Parser) -> RacketProfile {
    let mean = p.real("profile", "mean_height").unwrap_or(0.0);
    let mut harmonics = Vec::new();
    for (line, v) in p.take_all("profile", "harmonic") {
        let parts: Vec<&str> = v.split(',').map(str::trim).collect();
        let parsed = match parts.as_slice() {
            [k, c, s] => parse_integer(k)
                .filter(|&k| (1..=u32::MAX as u64).contains(&k))
                .zip(parse_real(c))
                .zip(parse_real(s))
                .map(|((k, c), s)| Harmonic::new(k as u32, c, s)),
            _ => None,
        };
        match parsed {
            Some(h) if harmonics.iter().any(|o: &Harmonic| o.k == h.k) => {
                p.errors.push(err(line, "harmonic", format!("wavenumber {} given twice", h.k)))
            }
            Some(h) => harmonics.push(h),
            None => p.errors.push(err(
                line,
                "harmonic",
                format!("expected `k, cos_coeff, sin_coeff` with integer k >= 1, got `{v}`"),
            )),
        }
    }
    RacketProfile::new(harmonics, mean)
}

impl RunConfig {
    /// Normalised text form; parsing it gives back an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let m = &self.map;
        let _ = writeln!(s, "[map]\nkind = {}", m.kind.name());
        match m.kind {
            MapKind::Standard => {
                let _ = writeln!(s, "k = {}", m.k);
            }
            MapKind::Tennis | MapKind::Integrable => {
                let _ = writeln!(s, "g = {}", m.g);
                if let Some(v) = m.v_star {
                    let _ = writeln!(s, "v_star = {v}");
                }
                let _ = writeln!(s, "root_tol = {:e}", m.root_tol);
                if let Some(v) = m.march_step {
                    let _ = writeln!(s, "march_step = {v}");
                }
            }
        }
        if let Some(p) = &self.profile {
            let _ = writeln!(s, "\n[profile]\nmean_height = {}", p.mean_height);
            for h in &p.harmonics {
                let _ = writeln!(s, "harmonic = {}, {}, {}", h.k, h.cos_coeff, h.sin_coeff);
            }
        }
        let e = &self.ensemble;
        let _ = writeln!(
            s,
            "\n[ensemble]\nt_grid = {}\ne_grid = {}\ne_lo = {}\ne_hi = {}\nn_steps = {}",
            e.t_grid, e.e_grid, e.e_range.0, e.e_range.1, e.n_steps
        );
        let r = &self.run;
        let _ = writeln!(s, "\n[run]\nseed = {}", r.seed);
        if let Some(o) = &r.output {
            let _ = writeln!(s, "output = {}", o.display());
        }
        let _ = writeln!(s, "steps = {}\nt0 = {}", r.steps, r.t0);
        if let Some(v) = r.v0 {
            let _ = writeln!(s, "v0 = {v}");
        }
        let a = &self.analysis;
        let _ = writeln!(
            s,
            "\n[analysis]\ncriterion = {}\nbounds = {}\nsamples = {}\nsafety_b = {}\nsafety_c = {}\n\
             amplitude = {}\nbudget = {}\nrenorm_every = {}",
            a.criterion.name(),
            a.bounds.name(),
            a.samples,
            a.safety.b,
            a.safety.c,
            a.amplitude,
            a.budget,
            a.renorm_every
        );
        if let Some((lo, hi)) = a.scan_range {
            let _ = writeln!(s, "scan_lo = {lo}\nscan_hi = {hi}");
        }
        let _ = writeln!(
            s,
            "scan_resolution = {}\nprobe_t = {}\nprobe_steps = {}\nbeta = {}",
            a.scan_resolution, a.probe.t_count, a.probe.n_steps, a.probe.beta
        );
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[map]\nkind = tennis\ng = 1\n\n[profile]\nharmonic = 1, 0.01, 0\n";

    #[test]
    fn minimal_tennis_fills_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.map.kind, MapKind::Tennis);
        assert_eq!(c.map.v_star, None);
        assert_eq!(c.map.root_tol, 1e-12);
        assert_eq!(c.run.seed, 0);
        assert_eq!(c.profile.unwrap().harmonics, vec![Harmonic::new(1, 0.01, 0.0)]);
    }

    #[test]
    fn k_rejected_for_tennis() {
        let text = "[map]\nkind = tennis\ng = 1\nk = 2\n";
        let e = parse_config(text).unwrap_err();
        assert_eq!(e.0.len(), 1);
        assert_eq!((e.0[0].line, e.0[0].key.as_str()), (4, "k"));
        assert!(e.0[0].message.contains("unknown key for map kind"));
    }

    #[test]
    fn scientific_notation() {
        let c = parse_config("[map]\nkind = tennis\ng = 1\nroot_tol = 1e-12\n[ensemble]\nn_steps = 1e5\n").unwrap();
        assert_eq!(c.map.root_tol, 1e-12);
        assert_eq!(c.ensemble.n_steps, 100_000);
    }

    #[test]
    fn all_errors_reported() {
        let text = "[map]\nkind = standard\nk = -1\ng = 2\n[run]\nseed = x\nbogus = 1\n[nowhere]\na = 1\n";
        let e = parse_config(text).unwrap_err();
        let lines: Vec<usize> = e.0.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![3, 4, 6, 7, 8]);
    }

    #[test]
    fn missing_kind() {
        let e = parse_config("[map]\ng = 1\n").unwrap_err();
        assert!(e.0.iter().any(|e| e.key == "kind"));
    }

    #[test]
    fn standard_requires_k() {
        let e = parse_config("[map]\nkind = standard\n").unwrap_err();
        assert_eq!(e.0[0].key, "k");
    }

    #[test]
    fn round_trip() {
        let text = format!(
            "{MINIMAL}harmonic = 3, 0, 1e-3\n[run]\nseed = 9\nv0 = 12.5\noutput = out.csv\n\
             [analysis]\nscan_lo = 10\nscan_hi = 20\n"
        );
        let c = parse_config(&text).unwrap();
        let once = c.to_text();
        let c2 = parse_config(&once).unwrap();
        assert_eq!(c, c2);
        assert_eq!(once, c2.to_text());
    }

    #[test]
    fn bad_harmonic() {
        let e = parse_config("[map]\nkind = tennis\ng = 1\n[profile]\nharmonic = 0, 1, 1\nharmonic = 1, x\n").unwrap_err();
        assert_eq!(e.0.len(), 2);
    }
}
