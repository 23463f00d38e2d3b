//! Output writers: the diagnostics CSV (bit-stable format), snapshot
//! files, and simple polyline SVG plots.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fracrd::stepper::Trajectory;

use crate::CliError;

/// 17-significant-digit scientific notation; fixed format so identical
/// runs produce identical bytes.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub const CSV_HEADER: &str = "t,linf_u,linf_v,l2_u,l2_v,mass_u,mass_v,lyapunov";

/// Diagnostics CSV: LF endings, fixed header, `lyapunov` empty outside
/// regimes I/II.
pub fn diagnostics_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(traj.rows.len() * 160);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &traj.rows {
        let lyap = row.lyapunov.map(fmt_f64).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(row.t),
            fmt_f64(row.linf_u),
            fmt_f64(row.linf_v),
            fmt_f64(row.l2_u),
            fmt_f64(row.l2_v),
            fmt_f64(row.mass_u),
            fmt_f64(row.mass_v),
            lyap,
        );
    }
    out
}

/// Snapshot CSV `x,u,v` for one stored time level.
pub fn snapshot_csv(xs: &[f64], u: &[f64], v: &[f64]) -> String {
    let mut out = String::from("x,u,v\n");
    for i in 0..xs.len() {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_f64(xs[i]),
            fmt_f64(u[i]),
            fmt_f64(v[i])
        );
    }
    out
}

/// Write and remember the path so the caller can list each emitted file
/// exactly once.
pub struct FileSink {
    written: Vec<PathBuf>,
}

impl FileSink {
    pub fn new() -> Self {
        Self {
            written: Vec::new(),
        }
    }

    pub fn write(&mut self, path: &Path, contents: &str) -> Result<(), CliError> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Io(format!("creating {}: {e}", parent.display())))?;
        }
        std::fs::write(path, contents)
            .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
        self.written.push(path.to_path_buf());
        Ok(())
    }

    pub fn emitted(&self) -> &[PathBuf] {
        &self.written
    }
}

impl Default for FileSink {
    fn default() -> Self {
        Self::new()
    }
}

/// One labelled, colored series of (t, value) points.
type Series<'a> = (&'a str, &'a str, Vec<(f64, f64)>);

/// Static polyline chart of selected trajectory columns against time.
pub fn trajectory_svg(traj: &Trajectory) -> String {
    let width = 800.0;
    let height = 500.0;
    let margin = 60.0;

    let series: Vec<Series> = {
        let mut s: Vec<Series> = vec![
            (
                "linf_u",
                "#1f77b4",
                traj.rows.iter().map(|r| (r.t, r.linf_u)).collect(),
            ),
            (
                "linf_v",
                "#d62728",
                traj.rows.iter().map(|r| (r.t, r.linf_v)).collect(),
            ),
            (
                "mass_u",
                "#2ca02c",
                traj.rows.iter().map(|r| (r.t, r.mass_u)).collect(),
            ),
        ];
        if traj.rows.iter().any(|r| r.lyapunov.is_some()) {
            s.push((
                "lyapunov",
                "#9467bd",
                traj.rows
                    .iter()
                    .filter_map(|r| r.lyapunov.map(|l| (r.t, l)))
                    .collect(),
            ));
        }
        s
    };

    let t_max = traj.rows.last().map(|r| r.t).unwrap_or(1.0).max(1e-300);
    let y_max = series
        .iter()
        .flat_map(|(_, _, pts)| pts.iter().map(|p| p.1))
        .fold(0.0f64, f64::max)
        .max(1e-300);

    let x_of = |t: f64| margin + (width - 2.0 * margin) * t / t_max;
    let y_of = |v: f64| height - margin - (height - 2.0 * margin) * v / (1.05 * y_max);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    );
    // axes
    let _ = writeln!(
        svg,
        r#"<line x1="{m}" y1="{yb}" x2="{xe}" y2="{yb}" stroke="black"/><line x1="{m}" y1="{m}" x2="{m}" y2="{yb}" stroke="black"/>"#,
        m = margin,
        yb = height - margin,
        xe = width - margin
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="12">t = 0</text><text x="{}" y="{}" font-size="12">t = {:.4}</text><text x="{}" y="{}" font-size="12">{:.4e}</text>"#,
        margin,
        height - margin + 16.0,
        width - margin - 40.0,
        height - margin + 16.0,
        t_max,
        4.0,
        margin - 30.0,
        1.05 * y_max
    );
    for (i, (name, color, pts)) in series.iter().enumerate() {
        let path: String = pts
            .iter()
            .enumerate()
            .map(|(j, (t, v))| {
                format!(
                    "{}{:.2},{:.2}",
                    if j == 0 { "M" } else { "L" },
                    x_of(*t),
                    y_of(*v)
                )
            })
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            svg,
            r#"<path d="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="12" fill="{color}">{name}</text>"#,
            width - margin + 4.0,
            margin + 16.0 * i as f64
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_has_17_significant_digits() {
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        // round trip exactly
        for x in [std::f64::consts::PI, 1e-17, 123456.789, -2.5e8] {
            let back: f64 = fmt_f64(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
