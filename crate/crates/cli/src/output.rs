//! CSV tables and `key: value` report blocks.
//!
//! Reals are written with 17 significant digits so that output round-trips
//! exactly and is byte-stable across IEEE-754 platforms.

use std::fmt::Write as _;
use std::io::{self, Write};

use tennis_core::kam::{CriterionReport, DBounds, ThresholdReport};
use tennis_core::system::{Coord, OrbitSegment};

pub const ORBIT_HEADER: &str = "n,t_lift,t_mod1,v,e,residual";

/// Full-precision real.
pub fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn opt_real(x: Option<f64>) -> String {
    x.map_or_else(|| "undefined".to_string(), real)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputRow {
    pub n: usize,
    pub t_lift: f64,
    pub t_mod1: f64,
    pub v: f64,
    pub e: f64,
    pub residual: f64,
}

impl OutputRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n,
            real(self.t_lift),
            real(self.t_mod1),
            real(self.v),
            real(self.e),
            real(self.residual)
        )
    }
}

/// One row per state; `v` is recovered from `e` (or the reverse) so that
/// `e = v²/2` holds on every row.
pub fn orbit_rows(segment: &OrbitSegment, period: f64) -> Vec<OutputRow> {
    segment
        .states
        .iter()
        .enumerate()
        .map(|(n, s)| {
            let (v, e) = match s.coord {
                Coord::Energy => ((2.0 * s.value).sqrt(), s.value),
                Coord::Velocity | Coord::Momentum => (s.value, 0.5 * s.value * s.value),
            };
            OutputRow {
                n,
                t_lift: s.t,
                t_mod1: s.t_mod(period),
                v,
                e,
                residual: if n == 0 { 0.0 } else { segment.residuals[n - 1] },
            }
        })
        .collect()
}

pub fn write_orbit_csv<W: Write>(out: &mut W, rows: &[OutputRow]) -> io::Result<()> {
    writeln!(out, "{ORBIT_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.csv())?;
    }
    Ok(())
}

/// Ordered `key: value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Block {
    lines: Vec<(String, String)>,
}

impl Block {
    pub fn new() -> Self {
        Block::default()
    }

    pub fn put(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.lines.push((key.to_string(), value.into()));
        self
    }

    pub fn real(&mut self, key: &str, x: f64) -> &mut Self {
        self.put(key, real(x))
    }

    pub fn opt_real(&mut self, key: &str, x: Option<f64>) -> &mut Self {
        self.put(key, opt_real(x))
    }

    pub fn flag(&mut self, key: &str, b: bool) -> &mut Self {
        self.put(key, if b { "true" } else { "false" })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.lines {
            let _ = writeln!(s, "{k}: {v}");
        }
        s
    }
}

/// Reads a rendered block back; later duplicates are ignored.
pub fn parse_block(text: &str) -> Block {
    let mut b = Block::new();
    for line in text.lines() {
        if let Some((k, v)) = line.split_once(": ") {
            if b.get(k).is_none() {
                b.put(k, v);
            }
        }
    }
    b
}

fn put_dbounds(b: &mut Block, d: &DBounds) {
    b.real("constants.b_plus", d.b_plus)
        .real("constants.b_minus", d.b_minus)
        .real("constants.c_plus", d.c_plus)
        .real("constants.c_minus", d.c_minus)
        .real("constants.discriminant_plus", d.discriminant_plus)
        .real("constants.discriminant_minus", d.discriminant_minus)
        .opt_real("constants.d_plus", d.d_plus)
        .opt_real("constants.d_minus", d.d_minus);
}

pub fn criterion_block(r: &CriterionReport) -> Block {
    let mut b = Block::new();
    b.put("criterion", r.criterion.name())
        .flag("conclusive", r.conclusive)
        .real("witness", r.witness)
        .real("margin", r.margin);
    match &r.constants {
        Some(d) => put_dbounds(&mut b, d),
        None => {
            b.put("constants", "none");
        }
    }
    b
}

/// Refined criterion that could not run because `D±` is undefined.
pub fn inapplicable_block(d: &DBounds) -> Block {
    let mut b = Block::new();
    b.put("criterion", "refined").put("applicable", "false").put("conclusive", "false");
    put_dbounds(&mut b, d);
    b
}

pub fn threshold_block(r: &ThresholdReport, main_holds: bool, main_margin: f64) -> Block {
    let mut b = Block::new();
    let n = &r.norms;
    b.real("g", r.g)
        .real("v_star", r.v_star)
        .real("e_star_domain", 0.5 * r.v_star * r.v_star)
        .real("norm.m", n.m)
        .real("norm.big_m", n.big_m)
        .real("norm.sup_df", n.sup_df)
        .real("norm.sup_ddf", n.sup_ddf)
        .real("norm.argmin_ddf", n.argmin_ddf)
        .flag("simple.applicable", r.e_star_simple.is_some())
        .opt_real("e_star_simple", r.e_star_simple);
    if let Some(t) = &r.simple_terms {
        b.real("simple.sqrt_2e", t.sqrt_2e())
            .real("simple.term_base", t.base)
            .real("simple.term_remainder", t.remainder)
            .real("simple.term_buffer", t.buffer);
    }
    b.flag("main_condition.holds", main_holds)
        .real("main_condition.margin", main_margin)
        .flag("refined.applicable", r.e_star_refined.is_some())
        .opt_real("e_star_refined", r.e_star_refined)
        .opt_real("e_line_refined", r.e_line_refined)
        .put("surrogate_note", r.surrogate_note);
    b
}
