//! Deterministic CSV emission.
//!
//! Every file starts with one `#` metadata line (tool version, neighbourhood,
//! seed, parameters), then the mandatory header row. Fields are
//! comma-separated with `.` decimals; floats print in shortest round-trip
//! form. Nothing here reads the clock or the environment, so identical runs
//! produce identical bytes.

use std::fmt::Write as _;

use crate::experiments::{BoundsRow, DecayFit, GammaScan, ScalingTable, SurvivalCurve};
use crate::simulate::TauEstimate;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn meta_line(command: &str, fields: &[(&str, String)]) -> String {
    let mut s = format!("# percpca {TOOL_VERSION} command={command}");
    for (k, v) in fields {
        let _ = write!(s, " {k}={v}");
    }
    s.push('\n');
    s
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn survival_csv(c: &SurvivalCurve) -> String {
    let mut s = meta_line(
        "sweep",
        &[
            ("U", c.neighborhood.clone()),
            ("n", c.n.to_string()),
            ("T", c.t_end.to_string()),
            ("R", c.replicas.to_string()),
            ("seed", c.master_seed.to_string()),
        ],
    );
    s.push_str("p,P_hat,stderr\n");
    for r in &c.rows {
        let _ = writeln!(s, "{},{},{}", r.p, r.p_hat, r.stderr);
    }
    s
}

pub fn scaling_csv(t: &ScalingTable) -> String {
    let mut s = meta_line(
        "tau-scaling",
        &[
            ("U", t.neighborhood.clone()),
            ("p", t.p.to_string()),
            ("replicas", t.replicas.to_string()),
            ("t_max", t.t_max.to_string()),
            ("seed", t.master_seed.to_string()),
            ("regime", format!("{:?}", t.fit.regime)),
        ],
    );
    s.push_str("n,mean_tau,stderr,censored\n");
    for r in &t.rows {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            r.n,
            opt(r.mean_tau),
            opt(r.stderr),
            r.censored
        );
    }
    s
}

pub fn gamma_csv(g: &GammaScan) -> String {
    let mut s = meta_line(
        "gamma-scan",
        &[
            ("U", g.neighborhood.clone()),
            ("m_max", g.m_max.to_string()),
            ("replicas", g.replicas.to_string()),
            ("seed", g.master_seed.to_string()),
            ("crossing", opt(g.crossing)),
        ],
    );
    s.push_str("p,gamma_hat,stderr\n");
    for r in &g.rows {
        let _ = writeln!(s, "{},{},{}", r.p, r.gamma_hat, r.stderr);
    }
    s
}

pub fn bounds_csv(rows: &[BoundsRow]) -> String {
    let debug = rows.iter().any(|r| r.p2_alt_exponent.is_some());
    let mut s = meta_line("bounds", &[("rows", rows.len().to_string())]);
    s.push_str(if debug {
        "neighborhood,span,p1,p2,p2_alt_exponent\n"
    } else {
        "neighborhood,span,p1,p2\n"
    });
    for r in rows {
        // the neighbourhood field contains commas: quote it
        let _ = write!(
            s,
            "\"{}\",{},{:.3},{:.3}",
            r.neighborhood, r.span, r.p1, r.p2
        );
        if debug {
            match r.p2_alt_exponent {
                Some(v) => {
                    let _ = write!(s, ",{v:.3}");
                }
                None => s.push(','),
            }
        }
        s.push('\n');
    }
    s
}

pub fn decay_csv(d: &DecayFit) -> String {
    let mut s = meta_line(
        "decay",
        &[
            ("U", d.neighborhood.clone()),
            ("p", d.p.to_string()),
            ("replicas", d.replicas.to_string()),
            ("seed", d.master_seed.to_string()),
            ("h_hat", opt(d.h_hat)),
            ("r2", opt(d.r2)),
            ("fit_ok", d.exponential_fit_ok.to_string()),
        ],
    );
    s.push_str("m,P_hat,stderr\n");
    for r in &d.rows {
        let _ = writeln!(s, "{},{},{}", r.m, r.p_hat, r.stderr);
    }
    s
}

/// Minimal deterministic SVG line chart. Cosmetic plumbing for a quick look
/// at a curve; the CSV remains the data format of record.
pub fn line_chart_svg(title: &str, points: &[(f64, f64)]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const M: f64 = 48.0;
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if points.is_empty() {
        x0 = 0.0;
        x1 = 1.0;
        y0 = 0.0;
        y1 = 1.0;
    }
    if x1 - x0 < 1e-300 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-300 {
        y1 = y0 + 1.0;
    }
    let px = |x: f64| M + (x - x0) / (x1 - x0) * (W - 2.0 * M);
    let py = |y: f64| H - M - (y - y0) / (y1 - y0) * (H - 2.0 * M);
    let mut path = String::new();
    for (i, &(x, y)) in points.iter().enumerate() {
        let _ = write!(
            path,
            "{}{:.2},{:.2}",
            if i == 0 { "" } else { " " },
            px(x),
            py(y)
        );
    }
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">"
    );
    let _ = writeln!(s, "  <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "  <text x=\"{:.2}\" y=\"24\" font-family=\"monospace\" font-size=\"14\" text-anchor=\"middle\">{title}</text>",
        W / 2.0
    );
    let _ = writeln!(
        s,
        "  <line x1=\"{M}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
        H - M,
        W - M,
        H - M
    );
    let _ = writeln!(
        s,
        "  <line x1=\"{M}\" y1=\"{M}\" x2=\"{M}\" y2=\"{:.2}\" stroke=\"black\"/>",
        H - M
    );
    for (v, xpos, anchor) in [(x0, M, "start"), (x1, W - M, "end")] {
        let _ = writeln!(
            s,
            "  <text x=\"{xpos:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"{anchor}\">{v}</text>",
            H - M + 16.0
        );
    }
    for (v, ypos) in [(y0, H - M), (y1, M)] {
        let _ = writeln!(
            s,
            "  <text x=\"{:.2}\" y=\"{ypos:.2}\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">{v}</text>",
            M - 6.0
        );
    }
    let _ = writeln!(
        s,
        "  <polyline points=\"{path}\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\"/>"
    );
    s.push_str("</svg>\n");
    s
}

pub struct SimulatePoint<'a> {
    pub neighborhood: String,
    pub n: i64,
    pub p: f64,
    pub t_max: u64,
    pub master_seed: u64,
    pub estimate: &'a TauEstimate,
}

pub fn simulate_csv(pt: &SimulatePoint) -> String {
    let mut s = meta_line(
        "simulate",
        &[
            ("U", pt.neighborhood.clone()),
            ("n", pt.n.to_string()),
            ("p", pt.p.to_string()),
            ("replicas", pt.estimate.replicas.to_string()),
            ("t_max", pt.t_max.to_string()),
            ("seed", pt.master_seed.to_string()),
        ],
    );
    s.push_str("n,p,mean_tau,stderr,censored\n");
    let _ = writeln!(
        s,
        "{},{},{},{},{}",
        pt.n,
        pt.p,
        opt(pt.estimate.mean),
        opt(pt.estimate.stderr),
        pt.estimate.censored
    );
    s
}
