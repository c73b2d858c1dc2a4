//! CSV and JSON renderings of every artifact.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so parsing
//! a field back yields the same `f64`. FPC columns are numbered from 1.

use frfx_core::explain::{
    AnovaRow, BubblePlotData, ClassConditionalScores, HeatmapGrid, ImportanceTable, PdpCurve,
    PermutationImportance, ReconstructionBands,
};
use frfx_core::{FpcaModel, Matrix, TimeGrid};
use serde::Serialize;

use crate::error::Result;

fn csv_string<I>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().expect("writing to memory cannot fail");
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn f(v: f64) -> String {
    v.to_string()
}

fn opt(v: Option<f64>) -> String {
    v.map(f).unwrap_or_default()
}

pub fn json<T: Serialize>(artifact: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(artifact)?;
    s.push('\n');
    Ok(s)
}

/// `score,value`, one row per grid point.
pub fn pdp_csv(curve: &PdpCurve) -> Result<String> {
    csv_string(
        &["score", "value"],
        curve
            .score_grid
            .iter()
            .zip(&curve.values)
            .map(|(&s, &v)| vec![f(s), f(v)]),
    )
}

/// `fpc,score,value` for several curves in one table.
pub fn pdp_long_csv(curves: &[PdpCurve]) -> Result<String> {
    csv_string(
        &["fpc", "score", "value"],
        curves.iter().flat_map(|c| {
            c.score_grid
                .iter()
                .zip(&c.values)
                .map(move |(&s, &v)| vec![(c.fpc + 1).to_string(), f(s), f(v)])
        }),
    )
}

pub fn heatmap_csv(hm: &HeatmapGrid) -> Result<String> {
    csv_string(
        &["fpc", "index", "score", "probability"],
        hm.fpcs.iter().enumerate().flat_map(|(c, &k)| {
            hm.score_grids[c]
                .iter()
                .zip(&hm.probabilities[c])
                .enumerate()
                .map(move |(m, (&s, &p))| vec![(k + 1).to_string(), m.to_string(), f(s), f(p)])
        }),
    )
}

pub const IMPORTANCE_COLUMNS: [&str; 7] = [
    "fpc",
    "mdg",
    "permutation_importance",
    "f_statistic",
    "p_value",
    "eta_squared",
    "explained_variance_fraction",
];

pub fn importance_csv(table: &ImportanceTable) -> Result<String> {
    csv_string(
        &IMPORTANCE_COLUMNS,
        table.rows.iter().map(|r| {
            vec![
                (r.fpc + 1).to_string(),
                f(r.mdg),
                f(r.permutation_importance),
                f(r.f_statistic),
                f(r.p_value),
                f(r.eta_squared),
                f(r.explained_variance_fraction),
            ]
        }),
    )
}

pub fn permutation_csv(pi: &PermutationImportance) -> Result<String> {
    csv_string(
        &["fpc", "repeat", "error_increase"],
        pi.per_repeat.iter().enumerate().flat_map(|(k, reps)| {
            reps.iter()
                .enumerate()
                .map(move |(r, &d)| vec![(k + 1).to_string(), r.to_string(), f(d)])
        }),
    )
}

pub fn anova_csv(rows: &[AnovaRow]) -> Result<String> {
    csv_string(
        &[
            "fpc", "ss_model", "ss_error", "ss_total", "df_model", "df_error", "f_statistic",
            "p_value", "eta_squared", "infinite_f",
        ],
        rows.iter().map(|r| {
            vec![
                (r.fpc + 1).to_string(),
                f(r.ss_model),
                f(r.ss_error),
                f(r.ss_total),
                f(r.df_model),
                f(r.df_error),
                f(r.f_statistic),
                f(r.p_value),
                f(r.eta_squared),
                r.infinite_f.to_string(),
            ]
        }),
    )
}

pub fn violin_summary_csv(c: &ClassConditionalScores) -> Result<String> {
    csv_string(
        &["fpc", "class", "n", "q1", "median", "q3", "bandwidth"],
        c.distributions.iter().flatten().map(|d| {
            let q = d.quartiles;
            vec![
                (d.fpc + 1).to_string(),
                d.class.to_string(),
                d.sample.len().to_string(),
                opt(q.map(|q| q[0])),
                opt(q.map(|q| q[1])),
                opt(q.map(|q| q[2])),
                opt(d.quartiles.map(|_| d.bandwidth)),
            ]
        }),
    )
}

pub fn violin_density_csv(c: &ClassConditionalScores) -> Result<String> {
    csv_string(
        &["fpc", "class", "score", "density"],
        c.distributions.iter().flatten().flat_map(|d| {
            d.density_grid
                .iter()
                .zip(&d.density)
                .map(move |(&x, &y)| vec![(d.fpc + 1).to_string(), d.class.to_string(), f(x), f(y)])
        }),
    )
}

pub fn bubble_csv(b: &BubblePlotData) -> Result<String> {
    csv_string(
        &["fpc", "external", "internal", "size", "quadrant", "median_external", "median_internal"],
        b.points.iter().map(|p| {
            vec![
                (p.fpc + 1).to_string(),
                f(p.external),
                f(p.internal),
                f(p.size),
                p.quadrant.label().to_owned(),
                f(b.median_external),
                f(b.median_internal),
            ]
        }),
    )
}

pub fn bands_csv(bands: &[ReconstructionBands], grid: &TimeGrid) -> Result<String> {
    csv_string(
        &["fpc", "window", "lower_score", "upper_score", "t", "lower", "upper", "mean"],
        bands.iter().flat_map(|b| {
            b.windows.iter().enumerate().flat_map(move |(w, win)| {
                grid.points().iter().enumerate().map(move |(j, &t)| {
                    vec![
                        (b.fpc + 1).to_string(),
                        (w + 1).to_string(),
                        f(win.lower_score),
                        f(win.upper_score),
                        f(t),
                        f(win.lower[j]),
                        f(win.upper[j]),
                        f(b.mean_curve[j]),
                    ]
                })
            })
        }),
    )
}

pub fn eigenvalues_csv(model: &FpcaModel) -> Result<String> {
    let fractions = model.explained_variance()?;
    let mut cumulative = 0.0;
    csv_string(
        &["fpc", "eigenvalue", "explained_variance_fraction", "cumulative"],
        model
            .eigenvalues
            .iter()
            .zip(&fractions)
            .enumerate()
            .map(|(k, (&l, &fr))| {
                cumulative += fr;
                vec![(k + 1).to_string(), f(l), f(fr), f(cumulative)]
            })
            .collect::<Vec<_>>(),
    )
}

fn fpc_header(lead: &[&str], k: usize) -> Vec<String> {
    lead.iter()
        .map(|s| (*s).to_owned())
        .chain((1..=k).map(|i| format!("fpc{i}")))
        .collect()
}

pub fn eigenfunctions_csv(model: &FpcaModel) -> Result<String> {
    let k = model.n_components();
    let header = fpc_header(&["t", "mean"], k);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_string(
        &header,
        model.grid.points().iter().enumerate().map(|(j, &t)| {
            let mut row = vec![f(t), f(model.mean_curve[j])];
            row.extend((0..k).map(|c| f(model.eigenfunctions.get(c, j))));
            row
        }),
    )
}

pub fn scores_csv(scores: &Matrix, labels: Option<&[u8]>) -> Result<String> {
    let header = fpc_header(&["row", "label"], scores.cols());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_string(
        &header,
        scores.row_iter().enumerate().map(|(i, row)| {
            let mut out = vec![
                (i + 1).to_string(),
                labels.map(|l| l[i].to_string()).unwrap_or_default(),
            ];
            out.extend(row.iter().map(|&v| f(v)));
            out
        }),
    )
}

pub fn predictions_csv(probabilities: &[f64], predicted: &[u8], labels: Option<&[u8]>) -> Result<String> {
    csv_string(
        &["row", "label", "predicted", "probability"],
        probabilities.iter().zip(predicted).enumerate().map(|(i, (&p, &y))| {
            vec![
                (i + 1).to_string(),
                labels.map(|l| l[i].to_string()).unwrap_or_default(),
                y.to_string(),
                f(p),
            ]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use frfx_core::explain::PdpScale;

    #[test]
    fn pdp_rows_and_header() {
        let curve = PdpCurve {
            fpc: 2,
            score_grid: (0..50).map(|i| i as f64 / 7.0).collect(),
            values: (0..50).map(|i| 1.0 / (i as f64 + 3.0)).collect(),
            scale: PdpScale::Probability,
        };
        let text = pdp_csv(&curve).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 51);
        assert_eq!(lines[0], "score,value");
        let mut r = csv::Reader::from_reader(text.as_bytes());
        for (i, rec) in r.records().enumerate() {
            let rec = rec.unwrap();
            assert_eq!(rec[0].parse::<f64>().unwrap(), curve.score_grid[i]);
            assert_eq!(rec[1].parse::<f64>().unwrap(), curve.values[i]);
        }
    }

    #[test]
    fn infinity_survives() {
        assert_eq!(f(f64::INFINITY).parse::<f64>().unwrap(), f64::INFINITY);
    }
}
