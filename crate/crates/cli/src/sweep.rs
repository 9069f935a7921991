//! Grid over the GHZ-diagonal simplex `l0+ + l0- + 2 (l1 + l2 + l3) = 1`.
//!
//! Coordinates are named `l0p`, `l0m`, `l1`, `l2`, `l3`. Coordinates can be
//! pinned (`--fix l3=0`) or tied (`--tie l1,l2,l3`). Tied coordinates form
//! one axis. The probability mass left after the pinned coordinates is split
//! into `steps - 1` equal units, and every way of distributing those units
//! over the free axes is one grid point. Points that are not canonical
//! (`l0+` at least `l0-` and every `l_j`) are dropped.

use anyhow::{anyhow, bail};
use triqap::distill::negativity_ghz_params;
use triqap::mermin::mermin_max_ghz_params;
use triqap::telecap::f_i_ghz_params;
use triqap::GhzDiagonalParams;

use crate::report::{cell, npt, sig12, useful, violates};

pub const NAMES: [&str; 5] = ["l0p", "l0m", "l1", "l2", "l3"];

/// Each `l_j` weighs two GHZ projectors.
const MULTIPLICITY: [f64; 5] = [1.0, 1.0, 2.0, 2.0, 2.0];

/// Pinned mass may exceed 1 by this much before the grid counts as empty.
const MASS_TOL: f64 = 1e-10;

pub const CSV_HEADER: [&str; 15] = [
    "lambda0_plus",
    "lambda0_minus",
    "lambda1",
    "lambda2",
    "lambda3",
    "f1",
    "f2",
    "f3",
    "N1",
    "N2",
    "N3",
    "mermin",
    "useful",
    "npt_all_cuts",
    "violates",
];

fn coordinate(name: &str) -> anyhow::Result<usize> {
    NAMES
        .iter()
        .position(|n| *n == name.trim())
        .ok_or_else(|| anyhow!("unknown coordinate {name:?}; expected one of {}", NAMES.join(", ")))
}

/// `NAME=VALUE`.
pub fn parse_fix(s: &str) -> anyhow::Result<(usize, f64)> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| anyhow!("expected NAME=VALUE, got {s:?}"))?;
    let v: f64 = value.trim().parse().map_err(|_| anyhow!("{value:?} is not a number"))?;
    if !v.is_finite() {
        bail!("{value:?} is not finite");
    }
    Ok((coordinate(name)?, v))
}

/// `NAME,NAME[,...]`.
pub fn parse_tie(s: &str) -> anyhow::Result<Vec<usize>> {
    let v = s.split(',').map(coordinate).collect::<anyhow::Result<Vec<_>>>()?;
    if v.len() < 2 {
        bail!("a tie needs at least two coordinates, got {s:?}");
    }
    Ok(v)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Constraints {
    pub fixed: Vec<(usize, f64)>,
    pub ties: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Row {
    pub params: GhzDiagonalParams,
    pub f: [f64; 3],
    pub negativity: [f64; 3],
    pub mermin: f64,
    pub useful: bool,
    pub npt_all_cuts: bool,
    pub violates: bool,
}

impl Row {
    fn new(params: GhzDiagonalParams, tol: f64) -> Option<Self> {
        let f = f_i_ghz_params(&params).ok()?.map(sig12);
        let negativity = negativity_ghz_params(&params).ok()?.map(sig12);
        let mermin = sig12(mermin_max_ghz_params(&params).ok()?);
        Some(Self {
            params,
            f,
            negativity,
            mermin,
            useful: useful(&f, tol),
            npt_all_cuts: npt(&negativity, tol),
            violates: violates(mermin, tol),
        })
    }

    pub fn csv_row(&self) -> Vec<String> {
        let mut row: Vec<String> = self
            .params
            .as_array()
            .iter()
            .map(|&x| sig12(x))
            .chain(self.f)
            .chain(self.negativity)
            .chain([self.mermin])
            .map(cell)
            .collect();
        row.extend([self.useful, self.npt_all_cuts, self.violates].map(|b| b.to_string()));
        row
    }
}

/// Axes after merging ties: member coordinates and, if pinned, their value.
fn axes(c: &Constraints) -> Option<Vec<(Vec<usize>, Option<f64>)>> {
    let mut group: [usize; 5] = [0, 1, 2, 3, 4];
    for tie in &c.ties {
        let target = group[tie[0]];
        for &k in &tie[1..] {
            let old = group[k];
            for g in group.iter_mut() {
                if *g == old {
                    *g = target;
                }
            }
        }
    }
    let mut out: Vec<(Vec<usize>, Option<f64>)> = Vec::new();
    for root in 0..5 {
        let members: Vec<usize> = (0..5).filter(|&k| group[k] == root).collect();
        if members.is_empty() {
            continue;
        }
        let mut value = None;
        for &(k, v) in &c.fixed {
            if members.contains(&k) {
                match value {
                    Some(old) if old != v => return None,
                    _ => value = Some(v),
                }
            }
        }
        out.push((members, value));
    }
    Some(out)
}

/// Calls `visit` with every way of writing `total` as an ordered sum of `parts` non-negative integers.
fn compositions(total: usize, parts: usize, visit: &mut impl FnMut(&[usize])) {
    fn go(rest: usize, slot: usize, acc: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
        if slot == acc.len() - 1 {
            acc[slot] = rest;
            visit(acc);
            return;
        }
        for u in 0..=rest {
            acc[slot] = u;
            go(rest - u, slot + 1, acc, visit);
        }
    }
    if parts == 0 {
        if total == 0 {
            visit(&[]);
        }
        return;
    }
    go(total, 0, &mut vec![0; parts], visit);
}

/// Canonical grid points with their derived quantities, in enumeration order.
pub fn sweep(steps: usize, constraints: &Constraints, tol: f64) -> Vec<Row> {
    let Some(axes) = axes(constraints) else {
        return Vec::new();
    };
    let mut base = [0.0; 5];
    let mut pinned = 0.0;
    let mut free = Vec::new();
    for (members, value) in &axes {
        match value {
            Some(v) => {
                for &k in members {
                    base[k] = *v;
                    pinned += v * MULTIPLICITY[k];
                }
            }
            None => free.push((members.clone(), members.iter().map(|&k| MULTIPLICITY[k]).sum::<f64>())),
        }
    }
    let rest = 1.0 - pinned;
    if rest < -MASS_TOL || (free.is_empty() && rest.abs() > MASS_TOL) {
        return Vec::new();
    }
    let rest = rest.max(0.0);
    let units = if free.is_empty() { 0 } else { steps - 1 };
    let mut rows = Vec::new();
    compositions(units, free.len(), &mut |split| {
        let mut x = base;
        for ((members, weight), &u) in free.iter().zip(split) {
            let v = u as f64 * rest / (units as f64 * weight);
            for &k in members {
                x[k] = v;
            }
        }
        let Ok(p) = GhzDiagonalParams::new(x[0], x[1], [x[2], x[3], x[4]]) else {
            return;
        };
        if let Some(row) = p.is_canonical().then(|| Row::new(p, tol)).flatten() {
            rows.push(row);
        }
    });
    rows
}
