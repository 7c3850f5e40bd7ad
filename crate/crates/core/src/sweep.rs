//! The `(l, g°)` grid for fixed `q` and `d`: which region and regime each
//! shape falls in, and the resulting bounds. Renders to CSV and to a static
//! SVG map.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use svg::node::element::{Rectangle, Text};
use svg::Document;

use crate::bounds::{classify_region, region_bound, BoundError, LacunaryShape};
use crate::field::FieldError;
use crate::iteration::{best_bound, min_bound_lemma};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub ell: u64,
    pub g_degree: u64,
    pub region: Option<u8>,
    pub case: u8,
    pub regime_value: u64,
    pub region_value: Option<u64>,
    /// Smaller of the regime value and the region value.
    pub best_value: u64,
    pub degree_bound: u64,
    /// Index into `d(l_i + g_i°)` of the smallest term among the first five,
    /// or `None` when `f°` beats all of them.
    pub best_term: Option<u32>,
    pub improved: bool,
}

impl SweepRow {
    pub const CSV_HEADER: [&'static str; 10] = [
        "ell",
        "g_degree",
        "region",
        "case",
        "regime_value",
        "region_value",
        "best_value",
        "degree_bound",
        "best_term",
        "improved",
    ];

    pub fn csv_record(&self) -> [String; 10] {
        let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_else(|| "none".into());
        [
            self.ell.to_string(),
            self.g_degree.to_string(),
            opt(self.region.map(u64::from)),
            self.case.to_string(),
            self.regime_value.to_string(),
            opt(self.region_value),
            self.best_value.to_string(),
            self.degree_bound.to_string(),
            opt(self.best_term.map(u64::from)),
            self.improved.to_string(),
        ]
    }
}

pub fn sweep_row(shape: &LacunaryShape) -> Result<SweepRow, BoundError> {
    let region = classify_region(shape);
    let region_value = match region {
        Some(_) => region_bound(shape)?.value,
        None => None,
    };
    let best = best_bound(shape)?;
    let degree = shape.degree();
    let lemma = min_bound_lemma(shape, 3)?;
    let best_value = region_value.map_or(best.value, |r| r.min(best.value));
    Ok(SweepRow {
        ell: shape.ell,
        g_degree: shape.g_degree,
        region,
        case: best.case,
        regime_value: best.value,
        region_value,
        best_value,
        degree_bound: degree,
        best_term: (lemma.value < degree).then_some(lemma.index),
        improved: best_value < degree,
    })
}

/// Every valid shape `0 <= l <= M - 2`, `1 <= g° <= M - l - 1`, in `(l, g°)`
/// order.
pub fn sweep(order: u64, d: u64) -> Result<Vec<SweepRow>, BoundError> {
    if d < 2 {
        return Err(BoundError::DEqualsOne);
    }
    if order % d != 0 {
        return Err(FieldError::NotADivisor { d, order }.into());
    }
    let m = order / d;
    let shapes: Vec<(u64, u64)> = (0..m.saturating_sub(1))
        .flat_map(|l| (1..m - l).map(move |g| (l, g)))
        .collect();
    shapes
        .par_iter()
        .map(|&(l, g)| sweep_row(&LacunaryShape::new(order, d, l, g)?))
        .collect()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SweepRow::CSV_HEADER)?;
    for r in rows {
        w.write_record(r.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColorMode {
    /// Regime 1-4 of the best bound.
    #[default]
    Case,
    /// Which of the first five iterated terms is smallest.
    Term,
    /// Improvement region 1-3.
    Region,
}

const PALETTE: [&str; 6] = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1", "#d0d0d0"];

fn category(row: &SweepRow, mode: ColorMode) -> (usize, String) {
    match mode {
        ColorMode::Case => ((row.case - 1) as usize, format!("case {}", row.case)),
        ColorMode::Term => match row.best_term {
            Some(i) => (i as usize, format!("d(l_{i} + g_{i})")),
            None => (5, "degree".into()),
        },
        ColorMode::Region => match row.region {
            Some(r) => ((r - 1) as usize, format!("region {r}")),
            None => (5, "none".into()),
        },
    }
}

/// One filled cell per row; `g°` runs left to right, `l` bottom to top.
pub fn render_svg(rows: &[SweepRow], mode: ColorMode, title: &str) -> String {
    let max_g = rows.iter().map(|r| r.g_degree).max().unwrap_or(1);
    let max_l = rows.iter().map(|r| r.ell).max().unwrap_or(0);
    let cell = (480.0 / (max_g.max(max_l + 1)) as f64).clamp(1.0, 24.0);
    let (left, top) = (50.0, 30.0);
    let plot_w = cell * max_g as f64;
    let plot_h = cell * (max_l + 1) as f64;
    let width = left + plot_w + 160.0;
    let height = top + plot_h + 50.0;

    let mut doc = Document::new()
        .set("viewBox", (0, 0, width, height))
        .set("width", width)
        .set("height", height)
        .set("font-family", "sans-serif")
        .set("font-size", 12);
    doc = doc.add(Text::new(title).set("x", left).set("y", 18));

    let mut legend = BTreeMap::new();
    for r in rows {
        let (idx, label) = category(r, mode);
        legend.insert(idx, label);
        let x = left + cell * (r.g_degree - 1) as f64;
        let y = top + plot_h - cell * (r.ell + 1) as f64;
        doc = doc.add(
            Rectangle::new()
                .set("x", x)
                .set("y", y)
                .set("width", cell)
                .set("height", cell)
                .set("fill", PALETTE[idx]),
        );
    }
    doc = doc
        .add(
            Rectangle::new()
                .set("x", left)
                .set("y", top)
                .set("width", plot_w)
                .set("height", plot_h)
                .set("fill", "none")
                .set("stroke", "black"),
        )
        .add(Text::new("g°").set("x", left + plot_w / 2.0).set("y", top + plot_h + 30.0))
        .add(Text::new("l").set("x", 20).set("y", top + plot_h / 2.0))
        .add(Text::new("1").set("x", left).set("y", top + plot_h + 15.0))
        .add(Text::new(max_g.to_string()).set("x", left + plot_w - 10.0).set("y", top + plot_h + 15.0))
        .add(Text::new("0").set("x", left - 15.0).set("y", top + plot_h))
        .add(Text::new(max_l.to_string()).set("x", left - 30.0).set("y", top + 10.0));

    let lx = left + plot_w + 20.0;
    for (n, (idx, label)) in legend.into_iter().enumerate() {
        let ly = top + 20.0 * n as f64;
        doc = doc
            .add(
                Rectangle::new()
                    .set("x", lx)
                    .set("y", ly)
                    .set("width", 12)
                    .set("height", 12)
                    .set("fill", PALETTE[idx]),
            )
            .add(Text::new(label).set("x", lx + 18.0).set("y", ly + 11.0));
    }
    doc.to_string()
}
