//! Capacitance report: `m,C_pF,gamma_re,gamma_im`.

use anyhow::{bail, Context, Result};
use rislink::geometry::ElementGeometry;
use rislink::varactor::{cap_to_gamma, LoadBounds, LoadVector, VaractorModel};
use std::fmt::Write as _;
use std::path::Path;

pub const HEADER: &str = "m,C_pF,gamma_re,gamma_im";

pub fn render(
    elements: &[ElementGeometry],
    caps: &LoadVector,
    freq_hz: f64,
    z0_ohm: f64,
    model: &VaractorModel,
) -> String {
    let mut out = format!("{HEADER}\n");
    for (el, &c) in elements.iter().zip(caps.as_slice()) {
        let g = cap_to_gamma(c, freq_hz, z0_ohm, model);
        let _ = writeln!(out, "{},{:.6},{:.9},{:.9}", el.index_m, c * 1e12, g.re, g.im);
    }
    out
}

/// Read a report (or a hand-written file with at least `m,C_pF`) and order
/// the values like `elements`.
pub fn read(path: &Path, elements: &[ElementGeometry], bounds: &LoadBounds) -> Result<LoadVector> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let Some((_, header)) = lines.next() else {
        bail!("{}: empty capacitance file", path.display());
    };
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 2 || cols[0] != "m" || cols[1] != "C_pF" {
        bail!("{}:1: header must start with `m,C_pF`", path.display());
    }
    let mut by_index = std::collections::BTreeMap::new();
    for (i, line) in lines {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        let at = || format!("{}:{}", path.display(), i + 1);
        if f.len() < 2 {
            bail!("{}: expected at least 2 columns", at());
        }
        let m: usize = f[0].parse().with_context(|| format!("{}: bad element index", at()))?;
        let c: f64 = f[1].parse().with_context(|| format!("{}: bad capacitance", at()))?;
        if by_index.insert(m, c * 1e-12).is_some() {
            bail!("{}: element {m} listed twice", at());
        }
    }
    let caps = elements
        .iter()
        .map(|el| {
            by_index
                .get(&el.index_m)
                .copied()
                .with_context(|| format!("{}: no capacitance for element {}", path.display(), el.index_m))
        })
        .collect::<Result<Vec<f64>>>()?;
    if by_index.len() != elements.len() {
        bail!(
            "{}: {} rows for {} elements",
            path.display(),
            by_index.len(),
            elements.len()
        );
    }
    // six decimals in pF can land just outside the bounds; clamp that away
    let tol = 1e-6 * 1e-12;
    let caps = caps
        .into_iter()
        .map(|c| {
            if c < bounds.c_min() - tol || c > bounds.c_max() + tol {
                c
            } else {
                bounds.clamp(c)
            }
        })
        .collect();
    LoadVector::new(caps, bounds).with_context(|| format!("{}", path.display()))
}
