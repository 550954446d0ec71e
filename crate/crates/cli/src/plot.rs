//! Companion matplotlib scripts for sweep tables.

use crate::table::ResultTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Wall offset against σ1σ2 for the D1Q3 schemes.
    Fig2,
    /// σ5σ8 against the wall offset for D2Q9.
    Fig4,
}

impl Figure {
    fn schema(self) -> [&'static str; 4] {
        match self {
            Figure::Fig2 => ["sigma1", "sigma2", "product", "delta_q_over_dx"],
            Figure::Fig4 => ["sigma5", "sigma8", "product", "delta_q_over_dx"],
        }
    }

    fn product_label(self) -> &'static str {
        match self {
            Figure::Fig2 => "σ₁σ₂",
            Figure::Fig4 => "σ₅σ₈",
        }
    }

    fn title(self) -> &'static str {
        match self {
            Figure::Fig2 => "Δq versus σ₁σ₂",
            Figure::Fig4 => "Product σ₅σ₈ versus solid wall location",
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlotError {
    #[error("table has no rows to plot")]
    Empty,
    #[error("table columns {found:?} do not match the {figure:?} schema {expected:?}")]
    Schema {
        figure: Figure,
        expected: [&'static str; 4],
        found: Vec<String>,
    },
    #[error("table metadata has no numeric predictor")]
    NoPredictor,
}

/// A self-contained Python script plotting `csv_name` (resolved next to
/// the script) with a vertical marker at the predicted magic product.
pub fn emit_plot_script(table: &ResultTable, figure: Figure, csv_name: &str) -> Result<String, PlotError> {
    let expected = figure.schema();
    if table.column_names() != expected {
        return Err(PlotError::Schema {
            figure,
            expected,
            found: table.column_names().iter().map(|s| s.to_string()).collect(),
        });
    }
    if table.rows.is_empty() {
        return Err(PlotError::Empty);
    }
    let predictor: f64 = table
        .meta("predictor")
        .and_then(|p| p.parse().ok())
        .ok_or(PlotError::NoPredictor)?;
    let variant = table.meta("variant").unwrap_or("");

    Ok(format!(
        r##"#!/usr/bin/env python3
# {title}
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
with open(os.path.join(here, {csv:?})) as handle:
    rows = list(csv.DictReader(line for line in handle if not line.startswith("#")))
product = [float(r["product"]) for r in rows]
delta_q = [float(r["delta_q_over_dx"]) for r in rows]
predictor = {predictor:?}

fig, ax = plt.subplots(figsize=(5, 4))
ax.plot(product, delta_q, "o-", label="measured ({variant})")
ax.axvline(predictor, color="k", linestyle="--", label="predicted {product_label} = %g" % predictor)
ax.axhline(0.5, color="0.6", linewidth=0.8)
ax.set_xlabel("{product_label}")
ax.set_ylabel("Δq / Δx")
ax.set_title("{title}")
ax.legend()
fig.tight_layout()
out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, {png:?})
fig.savefig(out, dpi=150)
"##,
        title = figure.title(),
        csv = csv_name,
        product_label = figure.product_label(),
        png = csv_name.trim_end_matches(".csv").to_string() + ".png",
    ))
}
