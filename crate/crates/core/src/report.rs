//! CSV and Markdown rendering of Monte-Carlo tables and rate tables.
//!
//! Output contains no timestamps or host details, so equal inputs give
//! byte-identical files.

use serde::Serialize;

use crate::asymptotics::{burr_tail_rate_rows, mef_rate_rows, weibull_tail_rate_rows, MEF_TABLE_P};
use crate::distributions::fmt_param;
use crate::error::{Error, Result};
use crate::simulation::{EstimatorSummary, Study, TableId, TableRun, TABLE_SAMPLE_SIZES};

/// Formats a Monte-Carlo table entry with about four significant digits
/// (`0.806`, `26.62`, `136.8`, `1546`), switching to `a×10^k` beyond 10⁵.
pub fn format_mc_value(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return "∞".into();
    }
    let a = v.abs();
    if a < 10.0 {
        format!("{v:.3}")
    } else if a < 100.0 {
        format!("{v:.2}")
    } else if a < 1000.0 {
        format!("{v:.1}")
    } else if a < 1e5 {
        format!("{v:.0}")
    } else {
        let k = a.log10().floor() as i32;
        let mut m = (v / 10f64.powi(k)).round();
        let mut k = k;
        if m.abs() >= 10.0 {
            m /= 10.0;
            k += 1;
        }
        if m == 1.0 {
            format!("10^{k}")
        } else {
            format!("{m}×10^{k}")
        }
    }
}

fn mean_cell(s: &EstimatorSummary) -> (String, String) {
    if s.show_infinite {
        ("∞".into(), "--".into())
    } else {
        (format_mc_value(s.rel_mse_x100), format_mc_value(s.sd_x100))
    }
}

/// Paper-layout Markdown: one block per sample size, three constant groups
/// side by side, a mean and an sd column per estimator.
pub fn table_markdown(run: &TableRun) -> String {
    let estimators = run.id.estimators();
    let (family, row_head, constant) = match run.id {
        TableId::T3 | TableId::T6 => ("Burr", "c,ℓ", "C1"),
        TableId::T4 | TableId::T7 => ("Weibull", "κ,C", "C2"),
    };
    let what = match run.id.study() {
        Study::Tail => "tail probability",
        Study::Mef => "mean excess",
    };
    let mut out = format!(
        "# Table {}: relative MSE (×100) and sd (×100), {what}, {family}\n\n\
         replications per cell: {}; base seed: {}\n",
        run.id.number(),
        run.replications,
        run.base_seed
    );
    for n in TABLE_SAMPLE_SIZES {
        let cells: Vec<_> = run.cells.iter().filter(|c| c.n == n).collect();
        let mut constants: Vec<f64> = Vec::new();
        for c in &cells {
            if !constants.contains(&c.constant) {
                constants.push(c.constant);
            }
        }
        let mut rows: Vec<&str> = Vec::new();
        for c in &cells {
            if !rows.contains(&c.row.as_str()) {
                rows.push(&c.row);
            }
        }
        out.push_str(&format!("\n## n = 2^{}\n\n", n.trailing_zeros()));
        let mut head = format!("| {family} ");
        let mut groups = format!("| {row_head} ");
        for &k in &constants {
            for e in &estimators {
                head.push_str(&format!("| {e} | sd "));
                groups.push_str(&format!("| {constant}={} | ", fmt_param(k)));
            }
        }
        out.push_str(&head);
        out.push_str("|\n");
        out.push_str(&groups);
        out.push_str("|\n|");
        for _ in 0..(1 + 2 * estimators.len() * constants.len()) {
            out.push_str("---|");
        }
        out.push('\n');
        for row in rows {
            out.push_str(&format!("| {row} "));
            for &k in &constants {
                let cell = cells.iter().find(|c| c.row == row && c.constant == k);
                for e in &estimators {
                    let (m, sd) = cell
                        .and_then(|c| c.result.summary(*e))
                        .map(mean_cell)
                        .unwrap_or(("".into(), "".into()));
                    out.push_str(&format!("| {m} | {sd} "));
                }
            }
            out.push_str("|\n");
        }
    }
    out
}

#[derive(Serialize)]
struct CsvRow<'a> {
    table: u32,
    row: &'a str,
    law: &'a str,
    n: usize,
    constant: f64,
    study: &'static str,
    estimator: &'static str,
    x: f64,
    u: f64,
    truth: f64,
    rel_mse_x100: f64,
    sd_x100: f64,
    raw_mean_x100: f64,
    trimmed_mean_x100: f64,
    n_finite: usize,
    n_nonfinite: usize,
    n_flagged: usize,
    unstable: bool,
    replications: usize,
    base_seed: u64,
    kappa_above_one: bool,
}

/// One CSV row per estimator per cell with full diagnostics.
pub fn table_csv(run: &TableRun) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for cell in &run.cells {
        let r = &cell.result;
        for s in &r.estimators {
            w.serialize(CsvRow {
                table: run.id.number(),
                row: &cell.row,
                law: &r.label,
                n: r.n,
                constant: cell.constant,
                study: match r.study {
                    Study::Tail => "tail",
                    Study::Mef => "mef",
                },
                estimator: s.estimator.label(),
                x: r.resolved.x,
                u: r.resolved.u,
                truth: r.resolved.truth,
                rel_mse_x100: s.rel_mse_x100,
                sd_x100: s.sd_x100,
                raw_mean_x100: s.raw_mean_x100,
                trimmed_mean_x100: s.trimmed_mean_x100,
                n_finite: s.n_finite,
                n_nonfinite: s.n_nonfinite,
                n_flagged: s.n_flagged,
                unstable: s.unstable,
                replications: r.replications,
                base_seed: r.base_seed,
                kappa_above_one: r.kappa_above_one,
            })
            .map_err(|e| Error::Numerical(format!("csv serialization failed: {e}")))?;
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Numerical(format!("csv flush failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Numerical(e.to_string()))
}

/// The symbolic rate table for the tail estimators.
pub fn rate_table1_markdown() -> String {
    "# Table 1: relative-MSE rates of the tail estimators\n\n\
     x ∼ C1 n^δ (Hall class), x ∼ C2 (ln n)^{1/κ} (Weibull class), δ = 1/(2β+α)\n\n\
     | | NE | PT | PI |\n|---|---|---|---|\n\
     | Hall class | n^{δα−1} | n^{δα−1} | n^{2δα−2} (ln n)^2 |\n\
     | Weibull class | n^{−1+C C2^κ} | n^{−1+C C2^κ} | -- |\n"
        .to_string()
}

/// Numeric tail-rate examples, Burr and Weibull blocks.
pub fn rate_table2_markdown() -> String {
    let mut out = String::from(
        "# Table 2: polynomial rates of the tail estimators' relative MSE\n\n\
         ## Burr\n\n| c,ℓ | α | β | NE | PT | PI |\n|---|---|---|---|---|---|\n",
    );
    for r in burr_tail_rate_rows() {
        out.push_str(&format!(
            "| {},{} | {} | {} | {} | {} | {} |\n",
            fmt_param(r.c),
            fmt_param(r.ell),
            fmt_param(r.alpha),
            fmt_param(r.beta),
            r.rates.ne.cell(),
            r.rates.pt.cell(),
            r.rates.pi.cell()
        ));
    }
    out.push_str("\n## Weibull\n\n| κ | C | C2 | NE | PT |\n|---|---|---|---|---|\n");
    for r in weibull_tail_rate_rows() {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} |\n",
            fmt_param(r.kappa),
            fmt_param(r.scale_c),
            fmt_param(r.c2),
            r.rates.ne.cell(),
            r.rates.pt.cell()
        ));
    }
    out
}

fn p_label(p: f64) -> String {
    format!("u=n^{}", fmt_param(p))
}

/// Mean-excess rate table.
pub fn rate_table5_markdown() -> String {
    let mut out = String::from(
        "# Table 5: polynomial rates of the mean-excess estimators' MSE\n\n| c,ℓ | α | β ",
    );
    for p in MEF_TABLE_P {
        let l = p_label(p);
        out.push_str(&format!("| NE ({l}) | PT ({l}) | PI ({l}) "));
    }
    out.push_str("|\n|---|---|---|");
    for _ in 0..3 * MEF_TABLE_P.len() {
        out.push_str("---|");
    }
    out.push('\n');
    for r in mef_rate_rows() {
        out.push_str(&format!(
            "| {},{} | {} | {} ",
            fmt_param(r.c),
            fmt_param(r.ell),
            fmt_param(r.alpha),
            fmt_param(r.beta)
        ));
        for m in r.rates {
            out.push_str(&format!(
                "| {} | {} | {} ",
                m.ne.cell(),
                m.pt.cell(),
                m.pi.cell()
            ));
        }
        out.push_str("|\n");
    }
    out
}

fn dat_value(v: Option<f64>) -> String {
    v.map_or_else(|| "NaN".to_string(), |x| format!("{x}"))
}

/// Whitespace-separated rate data (gnuplot reads `NaN` as a gap).
pub fn rates_dat() -> String {
    let mut out = String::from("# burr tail rates: c ell alpha beta NE PT PI\n");
    for r in burr_tail_rate_rows() {
        out.push_str(&format!(
            "{} {} {} {} {} {} {}\n",
            r.c,
            r.ell,
            r.alpha,
            r.beta,
            dat_value(r.rates.ne.value),
            dat_value(r.rates.pt.value),
            dat_value(r.rates.pi.value)
        ));
    }
    out.push_str("\n\n# weibull tail rates: kappa C C2 NE PT\n");
    for r in weibull_tail_rate_rows() {
        out.push_str(&format!(
            "{} {} {} {} {}\n",
            r.kappa,
            r.scale_c,
            r.c2,
            dat_value(r.rates.ne.value),
            dat_value(r.rates.pt.value)
        ));
    }
    out.push_str("\n\n# mean-excess rates: c ell alpha beta p NE PT PI\n");
    for r in mef_rate_rows() {
        for (p, m) in MEF_TABLE_P.iter().zip(r.rates) {
            out.push_str(&format!(
                "{} {} {} {} {} {} {} {}\n",
                r.c,
                r.ell,
                r.alpha,
                r.beta,
                p,
                dat_value(m.ne.value),
                dat_value(m.pt.value),
                dat_value(m.pi.value)
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mc_value_formats() {
        assert_eq!(format_mc_value(0.8061), "0.806");
        assert_eq!(format_mc_value(26.624), "26.62");
        assert_eq!(format_mc_value(136.84), "136.8");
        assert_eq!(format_mc_value(1546.2), "1546");
        assert_eq!(format_mc_value(2.1e4 * 10.0), "2×10^5");
        assert_eq!(format_mc_value(1.02e18), "10^18");
        assert_eq!(format_mc_value(f64::INFINITY), "∞");
    }

    #[test]
    fn rate_tables_contain_known_cells() {
        let t2 = rate_table2_markdown();
        assert!(t2.contains("| 1,1 | 1 | 1 | -- | -0.667 | -1.333 |"));
        assert!(t2.contains("| 3 | 1 | 1/3 | -0.963 | -0.963 |"));
        let t5 = rate_table5_markdown();
        assert!(t5.contains("| 3,3 | 9 | 3 | -0.313 | -- | -0.275 | -- | 0.375 | -0.15 | -- | 1.75 | 0.1 | -- | 3.125 | 0.35 |"));
    }
}
